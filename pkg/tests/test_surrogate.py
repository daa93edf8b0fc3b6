"""Quantile surrogate table: fit quality, lookup, persistence."""
import numpy as np
import pytest

from masec.gammainc import inverse_lower_incomplete_gamma
from masec.surrogate import (
    fit_linear_surrogate,
    load_table,
    save_table,
    surrogate_lookup,
)


class TestFit:
    def test_grid_layout(self, table):
        assert table.eps_grid[0] == pytest.approx(0.01)
        assert table.max_eps == pytest.approx(0.99)
        assert table.eps_grid.size == 99
        assert np.allclose(np.diff(table.eps_grid), 0.01)

    def test_slopes_strictly_positive(self, table):
        assert np.all(table.slope > 0.0)

    def test_slope_and_intercept_nondecreasing(self, table):
        assert np.all(np.diff(table.slope) >= 0.0)
        assert np.all(np.diff(table.intercept) >= 0.0)

    def test_median_line_is_nearly_identity(self, table):
        # quantile(0.5, a) ~ a - 1/3 for large shapes, so the mid row of
        # the table must fit a line close to slope 1, intercept -1/3
        slope, intercept = surrogate_lookup(table, 0.5)
        assert slope == pytest.approx(1.0, abs=0.005)
        assert intercept == pytest.approx(-1.0 / 3.0, abs=0.01)

    def test_pointwise_error_at_median(self, table):
        a = np.linspace(2.0, 100.0, 200)
        slope, intercept = surrogate_lookup(table, 0.5)
        truth = inverse_lower_incomplete_gamma(0.5, a)
        rel = np.abs(slope * a + intercept - truth) / truth
        assert np.max(rel) < 0.02

    def test_sup_relative_error_band(self, table):
        # worst case across the grid stays under 5% of the function's size
        a = np.linspace(2.0, 100.0, 200)
        worst = 0.0
        for eps in table.eps_grid[::7]:
            slope, intercept = surrogate_lookup(table, float(eps))
            truth = inverse_lower_incomplete_gamma(float(eps), a)
            dev = np.max(np.abs(slope * a + intercept - truth))
            worst = max(worst, dev / np.max(truth))
        assert worst < 0.05

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            fit_linear_surrogate(tau=0.0)
        with pytest.raises(ValueError):
            fit_linear_surrogate(tau=1.0)

    def test_rejects_bad_range(self):
        with pytest.raises(ValueError):
            fit_linear_surrogate(fit_range=(5.0, 2.0))

    def test_coarse_table(self):
        coarse = fit_linear_surrogate(tau=0.1, n_fit_points=50)
        assert coarse.eps_grid.size == 9
        assert coarse.max_eps == pytest.approx(0.9)


class TestLookup:
    def test_exact_on_grid_points(self, table):
        for j in (0, 7, 50, 98):
            slope, intercept = surrogate_lookup(table, float(table.eps_grid[j]))
            assert slope == table.slope[j]
            assert intercept == table.intercept[j]

    def test_interpolates_between_grid_points(self, table):
        s1, r1 = surrogate_lookup(table, 0.30)
        s2, r2 = surrogate_lookup(table, 0.31)
        sm, rm = surrogate_lookup(table, 0.305)
        assert sm == pytest.approx(0.5 * (s1 + s2), rel=1e-12)
        assert rm == pytest.approx(0.5 * (r1 + r2), rel=1e-12)

    def test_zero_eps_anchors_at_origin(self, table):
        slope, intercept = surrogate_lookup(table, 0.0)
        assert slope == 0.0
        assert intercept == 0.0
        # halfway to the first grid point: half the first row
        s, r = surrogate_lookup(table, 0.005)
        assert s == pytest.approx(0.5 * table.slope[0], rel=1e-12)
        assert r == pytest.approx(0.5 * table.intercept[0], rel=1e-12)

    def test_rejects_out_of_domain(self, table):
        with pytest.raises(ValueError):
            surrogate_lookup(table, -0.01)
        with pytest.raises(ValueError):
            surrogate_lookup(table, 0.999)


class TestPersistence:
    def test_round_trip_exact(self, table, tmp_path):
        path = tmp_path / "table.txt"
        save_table(table, path)
        back = load_table(path)
        assert np.array_equal(back.eps_grid, table.eps_grid)
        assert np.array_equal(back.slope, table.slope)
        assert np.array_equal(back.intercept, table.intercept)
        assert back.fit_lo == table.fit_lo
        assert back.fit_hi == table.fit_hi
        assert back.tau == table.tau
        assert back.n_fit_points == table.n_fit_points

    def test_rewrite_is_byte_identical(self, table, tmp_path):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        save_table(table, p1)
        save_table(load_table(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.txt"
        path.write_text("not a table\n1 2 3\n")
        with pytest.raises(ValueError, match="masec-surrogate"):
            load_table(path)
