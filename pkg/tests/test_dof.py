import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import grid_sum_dof, grid_uncovered
from timeia.dof import (DelayMatrix, DutyCycle, NormalizedDelayMatrix, TransmitDelays,
                        batch_pair_dof, batch_sum_dof, normalize, pair_dof, sum_dof)

PERFECT = np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])


def test_duty_cycle_bounds():
    DutyCycle(0.4)
    DutyCycle(0.5)
    with pytest.raises(ValueError):
        DutyCycle(1 / 3)
    DutyCycle(1 / 3, permissive=True)
    with pytest.raises(ValueError):
        DutyCycle(0.3, permissive=True)
    with pytest.raises(ValueError):
        DutyCycle(0.51)
    assert float(DutyCycle(0.45)) == 0.45


def test_delay_matrix_validation():
    with pytest.raises(ValueError):
        DelayMatrix(np.ones((2, 3)), 1e-4)
    with pytest.raises(ValueError):
        DelayMatrix(np.array([[1.0, -1.0], [1.0, 1.0]]), 1e-4)
    with pytest.raises(ValueError):
        DelayMatrix(np.array([[1.0, np.inf], [1.0, 1.0]]), 1e-4)
    with pytest.warns(RuntimeWarning):
        DelayMatrix(np.full((3, 3), 2e-4), 1e-4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        DelayMatrix(np.full((3, 3), 0.12), 1e-4)


def test_transmit_delays_range():
    with pytest.raises(ValueError):
        TransmitDelays([0.0, 1.0, 0.2])
    assert len(TransmitDelays.zeros(3)) == 3


@pytest.mark.parametrize("entry, delta, expected", [
    (2.5e-4, 0.0, 0.5),
    (2.5e-4, 0.25, 0.75),
    (1e-4, 0.0, 0.0),
])
def test_normalize_examples(entry, delta, expected):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        a = DelayMatrix(np.full((3, 3), entry), 1e-4)
    d = normalize(a, TransmitDelays([delta] * 3))
    assert d.entries == pytest.approx(np.full((3, 3), expected), abs=1e-12)


def test_normalize_dimension_mismatch():
    a = DelayMatrix(np.full((3, 3), 0.12), 1e-4)
    with pytest.raises(ValueError):
        normalize(a, TransmitDelays([0.1, 0.2]))


def test_normalize_zero_delta_is_plain_reduction():
    a = DelayMatrix(np.random.default_rng(3).uniform(0.1, 0.2, (3, 3)), 25e-6)
    assert np.array_equal(normalize(a).entries, normalize(a, TransmitDelays.zeros(3)).entries)


def test_perfect_alignment():
    res = sum_dof(PERFECT, 0.5)
    assert res.per_pair == pytest.approx([0.5, 0.5, 0.5])
    assert res.sum == pytest.approx(1.5)


def test_full_overlap():
    res = sum_dof(np.zeros((3, 3)), 0.5)
    assert res.sum == 0.0
    assert np.all(res.per_pair == 0.0)


def test_pair_dof_derived_example():
    d = np.array([[0.2, 0.0, 0.55], [0.1, 0.2, 0.3], [0.4, 0.5, 0.6]])
    assert pair_dof(d, 0, 0.4) == pytest.approx(0.15, abs=1e-12)
    assert grid_uncovered((0.2, 0.4), [(0.0, 0.4), (0.55, 0.4)]) == pytest.approx(0.15, abs=4e-5)


def test_pair_dof_index_error():
    with pytest.raises(IndexError):
        pair_dof(PERFECT, 3, 0.5)


def test_sum_dof_matches_grid_oracle():
    rng = np.random.default_rng(11)
    for _ in range(5):
        d = rng.random((3, 3))
        assert sum_dof(d, 0.43).sum == pytest.approx(grid_sum_dof(d, 0.43), abs=1e-4)


unit = arrays(np.float64, (3, 3), elements=st.floats(0.0, 1.0, exclude_max=True))
rhos = st.floats(1 / 3, 0.5)


@settings(max_examples=200, deadline=None)
@given(unit, rhos)
def test_batch_path_matches_sweep(d, rho):
    ref = sum_dof(d, rho)
    fast = batch_pair_dof(d, rho)
    assert fast == pytest.approx(ref.per_pair, abs=1e-12)
    assert np.all(ref.per_pair <= rho + 1e-12)
    assert ref.sum <= 3 * rho + 1e-12


@settings(max_examples=100, deadline=None)
@given(unit, rhos, arrays(np.float64, 3, elements=st.floats(0.0, 1.0, exclude_max=True)))
def test_row_shift_invariance(d, rho, c):
    shifted = np.mod(d + c[:, None], 1.0)
    shifted[shifted >= 1.0] = 0.0
    assert batch_pair_dof(shifted, rho) == pytest.approx(batch_pair_dof(d, rho), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(0.1, 0.2)), rhos,
       arrays(np.float64, 3, elements=st.floats(0.0, 1.0, exclude_max=True)),
       st.floats(0.0, 1.0, exclude_max=True))
def test_column_shift_and_global_shift(a, rho, delta, c):
    slot = 25e-6
    a = DelayMatrix(a, slot)
    via_normalize = sum_dof(normalize(a, TransmitDelays(delta)), rho)
    via_columns = sum_dof(normalize(a).shift_columns(delta), rho)
    assert via_normalize.sum == pytest.approx(via_columns.sum, abs=1e-9)
    moved = np.mod(delta + c, 1.0)
    moved[moved >= 1.0] = 0.0
    assert sum_dof(normalize(a, TransmitDelays(moved)), rho).sum == pytest.approx(
        via_normalize.sum, abs=1e-9)


def test_generic_k():
    d = np.random.default_rng(2).random((4, 4))
    rho = 0.3
    assert batch_sum_dof(d, rho) == pytest.approx(
        sum(pair_dof(d, i, DutyCycle(rho, k=4)) for i in range(4)), abs=1e-12)


def test_normalized_matrix_validation():
    with pytest.raises(ValueError):
        NormalizedDelayMatrix(np.full((3, 3), 1.0))
