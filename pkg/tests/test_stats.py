import math

import numpy as np
import pytest

from causaluplift.data import ColumnSpec, Dataset
from causaluplift.errors import ContinuousColumn, DegenerateColumnWarning, EmptyColumn
from causaluplift.stats import (
    contingency,
    discretize,
    discretize_dataset,
    g2_from_table,
    g2_test,
    ContingencyTable,
)


def binary_dataset(**cols):
    specs = [ColumnSpec(name, "binary") for name in cols]
    return Dataset(specs, {k: np.asarray(v) for k, v in cols.items()})


def categorical_dataset(arities, **cols):
    specs = [
        ColumnSpec(name, "categorical", categories=tuple(str(i) for i in range(arities[name])))
        for name in cols
    ]
    return Dataset(specs, {k: np.asarray(v) for k, v in cols.items()})


def g2_oracle(counts):
    """Hand evaluation of 2 * sum O ln(O/E) per stratum, written naively."""
    counts = np.asarray(counts, dtype=float)
    total = 0.0
    for s in range(counts.shape[2]):
        slab = counts[:, :, s]
        n = slab.sum()
        if n == 0:
            continue
        for i in range(slab.shape[0]):
            for j in range(slab.shape[1]):
                o = slab[i, j]
                if o > 0:
                    e = slab[i, :].sum() * slab[:, j].sum() / n
                    total += 2.0 * o * math.log(o / e)
    return total


class TestDiscretize:
    def test_median_split(self):
        disc = discretize(np.arange(1.0, 11.0), bins=2)
        assert disc.codes.tolist() == [0] * 5 + [1] * 5
        assert disc.n_bins == 2
        assert not disc.degenerate

    def test_constant_column_flagged(self):
        with pytest.warns(DegenerateColumnWarning):
            disc = discretize(np.full(20, 3.5), bins=3)
        assert disc.degenerate
        assert disc.n_bins == 1
        assert set(disc.codes.tolist()) == {0}

    def test_normal_draws_balanced(self):
        values = np.random.default_rng(3).standard_normal(1000)
        disc = discretize(values, bins=3)
        counts = np.bincount(disc.codes, minlength=3)
        assert all(abs(c - 1000 / 3) <= 1 for c in counts)

    def test_ties_go_to_lower_bin(self):
        values = np.array([0.0, 1.0, 1.0, 1.0, 2.0, 3.0])
        disc = discretize(values, bins=2)
        # median is 1.0; the tied values land in the lower bin
        assert disc.codes.tolist() == [0, 0, 0, 0, 1, 1]

    def test_empty_column(self):
        with pytest.raises(EmptyColumn):
            discretize(np.empty(0), bins=2)

    def test_arity_bounded_by_bins(self):
        values = np.array([0.0, 0.0, 0.0, 0.0, 1.0, 1.0])
        disc = discretize(values, bins=4)
        assert disc.n_bins <= 4

    def test_deterministic(self):
        values = np.random.default_rng(9).normal(size=500)
        a = discretize(values, bins=3)
        b = discretize(values, bins=3)
        assert np.array_equal(a.codes, b.codes)


class TestDiscretizeDataset:
    def test_continuous_replaced(self):
        data = Dataset(
            [ColumnSpec("a", "continuous"), ColumnSpec("b", "binary")],
            {"a": np.linspace(0, 1, 30), "b": np.zeros(30, dtype=int)},
        )
        out = discretize_dataset(data, bins=3)
        assert out.spec("a").kind == "categorical"
        assert out.arity("a") == 3
        assert out.spec("b").kind == "binary"
        # original untouched
        assert data.spec("a").kind == "continuous"


class TestContingency:
    def test_two_by_two_all_ones(self):
        data = binary_dataset(x=[0, 0, 1, 1], y=[0, 1, 0, 1])
        table = contingency(data, "x", "y")
        assert table.counts.shape == (2, 2, 1)
        assert np.array_equal(table.counts[:, :, 0], np.ones((2, 2), dtype=int))
        assert table.total == 4

    def test_z_slices(self):
        data = binary_dataset(
            x=[0, 0, 1, 1, 0, 0, 1, 1],
            y=[0, 1, 0, 1, 0, 1, 0, 1],
            z=[0, 0, 0, 0, 1, 1, 1, 1],
        )
        table = contingency(data, "x", "y", ["z"])
        assert table.counts.shape == (2, 2, 2)
        assert table.counts.sum() == 8
        assert np.array_equal(table.counts[:, :, 0], table.counts[:, :, 1])

    def test_matches_group_by_oracle(self):
        rng = np.random.default_rng(17)
        data = binary_dataset(
            x=rng.integers(0, 2, 500),
            y=rng.integers(0, 2, 500),
            z=rng.integers(0, 2, 500),
        )
        table = contingency(data, "x", "y", ["z"])
        naive = {}
        xv, yv, zv = data.values("x"), data.values("y"), data.values("z")
        for i in range(500):
            key = (xv[i], yv[i], zv[i])
            naive[key] = naive.get(key, 0) + 1
        for (i, j, s), count in naive.items():
            assert table.counts[i, j, s] == count
        assert table.counts.sum() == 500

    def test_continuous_rejected(self):
        data = Dataset(
            [ColumnSpec("x", "continuous"), ColumnSpec("y", "binary")],
            {"x": np.linspace(0, 1, 10), "y": np.zeros(10, dtype=int)},
        )
        with pytest.raises(ContinuousColumn):
            contingency(data, "x", "y")

    def test_arity_from_full_dataset(self):
        # category 2 of z never co-occurs with x=1; its slot must still exist
        data = categorical_dataset(
            {"x": 2, "y": 2, "z": 3},
            x=[0, 0, 1, 1],
            y=[0, 1, 0, 1],
            z=[2, 2, 0, 1],
        )
        table = contingency(data, "x", "y", ["z"])
        assert table.counts.shape == (2, 2, 3)


class TestG2:
    def test_perfectly_independent_table(self):
        table = ContingencyTable(
            dims=(2, 2), counts=np.array([[25, 25], [25, 25]]).reshape(2, 2, 1), total=100
        )
        res = g2_from_table(table, alpha=0.01)
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert res.independent

    def test_hand_computed_dependent_table(self):
        # 2 * (30 ln(30/20) + 10 ln(10/20)) * 2 = 20.9299...
        table = ContingencyTable(
            dims=(2, 2), counts=np.array([[30, 10], [10, 30]]).reshape(2, 2, 1), total=80
        )
        res = g2_from_table(table, alpha=0.01)
        want = 2 * (30 * math.log(30 / 20) + 10 * math.log(10 / 20)) * 2
        assert res.statistic == pytest.approx(want, rel=1e-12)
        assert res.statistic == pytest.approx(20.929925750581913, rel=1e-10)
        assert res.dof == 1
        assert not res.independent

    def test_copy_column(self):
        half = 50
        data = binary_dataset(x=[0] * half + [1] * half, y=[0] * half + [1] * half)
        res = g2_test(data, "x", "y", alpha=0.01)
        assert res.statistic == pytest.approx(2 * 100 * math.log(2), rel=1e-12)
        assert res.p_value < 1e-6

    def test_statistic_matches_oracle_random_tables(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            counts = rng.integers(0, 12, size=(3, 2, 4))
            table = ContingencyTable(dims=(3, 2, 2, 2), counts=counts, total=int(counts.sum()))
            res = g2_from_table(table, alpha=0.05)
            assert res.statistic == pytest.approx(g2_oracle(counts), rel=1e-12, abs=1e-12)

    def test_swap_xy_invariant(self):
        rng = np.random.default_rng(29)
        data = binary_dataset(
            x=rng.integers(0, 2, 400), y=rng.integers(0, 2, 400), z=rng.integers(0, 2, 400)
        )
        a = g2_test(data, "x", "y", ["z"])
        b = g2_test(data, "y", "x", ["z"])
        assert a.statistic == pytest.approx(b.statistic, rel=1e-15)
        assert a.dof == b.dof

    def test_empty_stratum_reduces_dof_not_stat(self):
        counts = np.array([[[12, 0], [3, 0]], [[5, 0], [9, 0]]])  # stratum 1 empty
        with_empty = ContingencyTable(dims=(2, 2, 2), counts=counts, total=29)
        res = g2_from_table(with_empty, alpha=0.05)
        squeezed = ContingencyTable(
            dims=(2, 2, 1), counts=counts[:, :, :1], total=29
        )
        base = g2_from_table(squeezed, alpha=0.05)
        assert res.statistic == pytest.approx(base.statistic, rel=1e-15)
        assert res.dof == base.dof == 1

    def test_dof_zero_is_independent_unreliable(self):
        counts = np.array([[5], [7]]).reshape(2, 1, 1)  # y has a single category
        table = ContingencyTable(dims=(2, 1), counts=counts, total=12)
        res = g2_from_table(table, alpha=0.05)
        assert res.independent and not res.reliable
        assert res.dof == 0 and res.p_value == 1.0

    def test_unreliable_counts_as_independent(self):
        # 12 rows, dof 4 after conditioning -> needs 20; verdict forced to
        # independent with the flag down
        data = categorical_dataset(
            {"x": 2, "y": 2, "z": 4},
            x=[0, 1] * 6,
            y=[0, 0, 1, 1] * 3,
            z=[0, 1, 2, 3] * 3,
        )
        res = g2_test(data, "x", "y", ["z"], alpha=0.5)
        assert not res.reliable
        assert res.independent

    def test_statistic_non_negative(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            counts = rng.integers(0, 30, size=(2, 3, 2))
            table = ContingencyTable(dims=(2, 3, 2), counts=counts, total=int(counts.sum()))
            assert g2_from_table(table, alpha=0.05).statistic >= 0

    def test_p_value_monotone_in_statistic(self):
        from causaluplift.special import chi_square_sf

        stats = np.linspace(0, 40, 50)
        ps = [chi_square_sf(float(s), 3) for s in stats]
        assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_null_calibration(self):
        # X indep Y given Z by construction; rejection rate at alpha=.05
        # stays in the calibration band
        rng = np.random.default_rng(37)
        n, sims = 250, 2000
        rejections = 0
        for _ in range(sims):
            z = rng.integers(0, 2, n)
            x = (rng.random(n) < 0.3 + 0.4 * z).astype(int)
            y = (rng.random(n) < 0.6 - 0.3 * z).astype(int)
            data = binary_dataset(x=x, y=y, z=z)
            res = g2_test(data, "x", "y", ["z"], alpha=0.05)
            rejections += 0 if res.p_value > 0.05 else 1
        rate = rejections / sims
        assert 0.03 <= rate <= 0.07

    def test_alpha_validated(self):
        data = binary_dataset(x=[0, 1], y=[0, 1])
        with pytest.raises(ValueError):
            g2_test(data, "x", "y", alpha=1.5)
