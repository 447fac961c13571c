import os
import stat

import numpy as np
import pytest
from hypothesis import given, settings

from battery import P3, pmfs
from onestep.dist import DiscreteDist, GridDensity, l2_distance, mix
from onestep.errors import ConfigError, ShapeError
from onestep.io import (
    distribution_from_csv,
    distribution_from_json,
    distribution_to_csv,
    distribution_to_json,
    load_distribution,
    read_csv_table,
    table_to_csv,
    write_atomic,
)
from onestep.presets import GRID_PRESETS, discrete_perturbations, grid_preset, resolve


class TestCsv:
    def test_quoting_and_header(self):
        text = table_to_csv(["a", "b"], [("x,y", 1.5), ('say "hi"', 2)])
        header, rows = read_csv_table(text)
        assert header == ["a", "b"]
        assert rows == [["x,y", "1.5"], ['say "hi"', "2"]]
        assert text.endswith("\r\n")

    def test_floats_round_trip(self):
        vals = [0.1, 1 / 3, 1e-300, -2.5e17]
        _, rows = read_csv_table(table_to_csv(["v"], [(v,) for v in vals]))
        assert [float(r[0]) for r in rows] == vals

    def test_empty(self):
        with pytest.raises(ShapeError):
            read_csv_table("")


class TestDistributionFiles:
    @pytest.mark.parametrize("name", sorted(GRID_PRESETS))
    def test_grid_csv_round_trip(self, name):
        P = grid_preset(name, 256)
        back = distribution_from_csv(distribution_to_csv(P))
        assert back.same_support(P)
        np.testing.assert_allclose(back.values, P.values, rtol=1e-15)

    def test_shifted_interval(self):
        P = GridDensity(np.arange(1.0, 9.0), -2.0, 3.0)
        back = distribution_from_csv(distribution_to_csv(P))
        assert (back.lower, back.upper) == (-2.0, 3.0)

    @settings(max_examples=30, deadline=None)
    @given(pmfs())
    def test_discrete_round_trips(self, P):
        assert distribution_from_csv(distribution_to_csv(P)) == P
        assert distribution_from_json(distribution_to_json(P)) == P

    def test_grid_json(self, beta22):
        assert distribution_from_json(distribution_to_json(beta22)) == beta22

    def test_labelled_atoms(self):
        P = DiscreteDist(P3, ["a", "b", "c"])
        back = distribution_from_csv(distribution_to_csv(P))
        assert back.atoms.tolist() == ["a", "b", "c"]

    def test_bad_header(self):
        with pytest.raises(ShapeError):
            distribution_from_csv("x,y\r\n1,2\r\n")

    def test_non_uniform_grid(self):
        with pytest.raises(ShapeError):
            distribution_from_csv("z,value\r\n0.1,1\r\n0.2,1\r\n0.5,1\r\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_distribution(tmp_path / "nope.csv")


class TestWriteAtomic:
    def test_writes_and_replaces(self, tmp_path):
        f = tmp_path / "sub" / "out.txt"
        write_atomic(f, "one")
        write_atomic(f, "two")
        assert f.read_text() == "two"
        assert os.listdir(f.parent) == ["out.txt"]

    def test_permissions_follow_umask(self, tmp_path):
        old = os.umask(0o022)
        try:
            write_atomic(tmp_path / "p.txt", "x")
        finally:
            os.umask(old)
        assert stat.S_IMODE((tmp_path / "p.txt").stat().st_mode) == 0o644


class TestPresets:
    def test_beta22(self, beta22):
        np.testing.assert_allclose(beta22(np.array([0.25, 0.5])), [1.125, 1.5], atol=1e-6)

    def test_twobump_is_symmetric(self, twobump):
        np.testing.assert_allclose(twobump.values, twobump.values[::-1], rtol=1e-12)

    def test_mixture_syntax(self, beta22, uniform):
        P = resolve("mix(beta22,uniform,0.25)")
        np.testing.assert_array_equal(P.values, mix(beta22, uniform, 0.25).values)
        assert l2_distance(beta22, P) == pytest.approx(0.25 * np.sqrt(0.2), abs=1e-6)

    def test_nested_mixture(self, beta22):
        P = resolve("mix(mix(beta22,uniform,0.5),linear,0.5)")
        assert P.same_support(beta22)

    def test_pmf(self):
        assert resolve("pmf(0.5, 0.3, 0.2)") == DiscreteDist(P3)

    def test_file(self, tmp_path, linear):
        f = tmp_path / "d.csv"
        f.write_text(distribution_to_csv(linear))
        assert resolve(str(f)) == linear

    def test_unknown(self):
        with pytest.raises(ConfigError):
            resolve("gamma")

    def test_perturbations_are_reproducible(self):
        P = DiscreteDist(P3)
        a = discrete_perturbations(P, 3, seed=1)
        b = discrete_perturbations(P, 3, seed=1)
        assert all(x == y for x, y in zip(a, b))
        assert all(x.same_support(P) for x in a)
