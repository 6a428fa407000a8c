import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotNormalizedError,
    ZeroVectorError,
)
from src.observables import (
    HermitianOperator,
    StateVector,
    commutator,
    expectation,
    is_anti_hermitian,
    is_eigenstate,
    random_hermitian,
    random_state,
    robertson_report,
    std_dev,
    variance_radicand,
)
from src.zero_bound import generator_catalog

TOL = 1e-12


def sigma(name):
    return generator_catalog().get(name)


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        HermitianOperator(np.array([[0, 1], [0, 0]]))


def test_hermitian_operator_rejects_non_square():
    with pytest.raises(DimensionMismatchError):
        HermitianOperator(np.zeros((2, 3)))


def test_hermitian_operator_is_read_only():
    A = HermitianOperator(np.eye(2))
    with pytest.raises(ValueError):
        A.entries[0, 0] = 5


def test_state_vector_requires_unit_norm():
    with pytest.raises(NotNormalizedError):
        StateVector(np.array([1.0, 1.0]))


def test_from_components_normalizes_and_rejects_zero():
    phi = StateVector.from_components([3, 4j])
    assert np.linalg.norm(phi.amplitudes) == pytest.approx(1.0, abs=TOL)
    with pytest.raises(ZeroVectorError):
        StateVector.from_components([0, 0])


def test_expectation_of_sigma_z():
    phi = StateVector.from_components([1, 0])
    assert expectation(sigma("sigma_z"), phi) == pytest.approx(1.0, abs=TOL)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        expectation(sigma("sigma_x"), StateVector.from_components([1, 0, 0]))


def test_std_dev_zero_on_eigenvector():
    phi = StateVector.from_components([1, 1])
    assert std_dev(sigma("sigma_x"), phi) <= TOL
    assert is_eigenstate(sigma("sigma_x"), phi)


def test_std_dev_matches_radicand(rng):
    A = random_hermitian(4, rng)
    phi = random_state(4, rng)
    assert std_dev(A, phi) ** 2 == pytest.approx(variance_radicand(A, phi), rel=1e-9)


@pytest.mark.parametrize("scale", [1e4, 1e6, 1e8])
def test_std_dev_near_eigenstate_of_large_operator(scale):
    rng = np.random.default_rng(17)
    A = sigma("sigma_x")
    large = A.scaled(scale)
    for _ in range(200):
        noise = rng.normal(size=2) + 1j * rng.normal(size=2)
        phi = StateVector.from_components(np.array([1, 1]) + 1e-9 * noise)
        assert std_dev(large, phi) == pytest.approx(scale * std_dev(A, phi), rel=1e-6, abs=1e-12 * scale)


def test_commutator_of_pauli_matrices():
    comm = commutator(sigma("sigma_x"), sigma("sigma_y"))
    assert np.allclose(comm, 2j * sigma("sigma_z").entries)
    assert is_anti_hermitian(comm)


def test_commutator_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        commutator(sigma("sigma_x"), sigma("lambda_3"))


def test_pauli_phi1_report():
    report = robertson_report(sigma("sigma_x"), sigma("sigma_y"), StateVector.from_components([1, 1]))
    assert report.bound == pytest.approx(0.0, abs=TOL)
    assert report.delta_a == pytest.approx(0.0, abs=TOL)
    assert report.delta_b == pytest.approx(1.0, abs=TOL)
    assert report.bound_is_zero
    assert report.a_eigenstate and not report.b_eigenstate


def test_pauli_basis_state_saturates():
    report = robertson_report(sigma("sigma_x"), sigma("sigma_y"), StateVector.from_components([1, 0]))
    assert report.product == pytest.approx(1.0, abs=TOL)
    assert report.bound == pytest.approx(1.0, abs=TOL)
    assert report.gap == pytest.approx(0.0, abs=1e-10)


def test_report_sum_of_squares():
    report = robertson_report(sigma("sigma_x"), sigma("sigma_y"), StateVector.from_components([1, 1j]))
    assert report.sum_of_squares == pytest.approx(1.0, abs=TOL)


def test_report_to_dict_encodes_complex():
    report = robertson_report(sigma("sigma_x"), sigma("sigma_y"), StateVector.from_components([1, 0]))
    data = report.to_dict()
    assert data["commutator_expectation"] == {"re": 0.0, "im": 2.0}


def test_robertson_floor_random_sweep():
    rng = np.random.default_rng(3)
    worst = math.inf
    for _ in range(10_000):
        dim = int(rng.integers(2, 9))
        report = robertson_report(random_hermitian(dim, rng), random_hermitian(dim, rng), random_state(dim, rng))
        worst = min(worst, report.gap)
    assert worst >= -1e-10


@st.composite
def operator_state(draw, max_dim=5):
    dim = draw(st.integers(min_value=2, max_value=max_dim))
    state_seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(state_seed)
    return random_hermitian(dim, rng), random_hermitian(dim, rng), random_state(dim, rng)


@seed(1)
@settings(max_examples=60, deadline=None)
@given(case=operator_state(), factor=st.floats(min_value=-5.0, max_value=5.0).filter(lambda c: abs(c) > 1e-3))
def test_scale_equivariance(case, factor):
    A, B, phi = case
    base = robertson_report(A, B, phi)
    scaled = robertson_report(A.scaled(factor), B, phi)
    assert scaled.delta_a == pytest.approx(abs(factor) * base.delta_a, rel=1e-9, abs=1e-12)
    assert scaled.bound == pytest.approx(abs(factor) * base.bound, rel=1e-9, abs=1e-12)


@seed(2)
@settings(max_examples=60, deadline=None)
@given(case=operator_state(), shift=st.floats(min_value=-10.0, max_value=10.0))
def test_shift_invariance(case, shift):
    A, B, phi = case
    base = robertson_report(A, B, phi)
    shifted = robertson_report(A.shifted(shift), B, phi)
    assert shifted.delta_a == pytest.approx(base.delta_a, rel=1e-8, abs=1e-10)
    assert shifted.bound == pytest.approx(base.bound, rel=1e-8, abs=1e-10)


@seed(3)
@settings(max_examples=60, deadline=None)
@given(case=operator_state(), angle=st.floats(min_value=0.0, max_value=2 * math.pi))
def test_global_phase_invariance(case, angle):
    A, B, phi = case
    base = robertson_report(A, B, phi)
    rotated = robertson_report(A, B, phi.with_phase(angle))
    assert rotated.product == pytest.approx(base.product, rel=1e-9, abs=1e-12)
    assert rotated.bound == pytest.approx(base.bound, rel=1e-9, abs=1e-12)


@seed(4)
@settings(max_examples=100, deadline=None)
@given(case=operator_state(max_dim=8))
def test_robertson_floor_property(case):
    A, B, phi = case
    assert robertson_report(A, B, phi).gap >= -1e-10


def test_commuting_pair_has_zero_bound(rng):
    A = random_hermitian(3, rng)
    B = A.scaled(2.0)
    report = robertson_report(A, B, random_state(3, rng))
    assert report.bound <= 1e-12
