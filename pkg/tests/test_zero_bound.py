import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.errors import DimensionMismatchError, EmptyFamilyError, ZeroVectorError
from src.observables import StateVector, random_hermitian, robertson_report
from src.zero_bound import (
    LAMBDA_5_SIGN_VS_STANDARD,
    FamilyDescriptor,
    FamilyKind,
    Objective,
    batch_objective,
    brute_force_minimum,
    classify_family,
    generator_catalog,
    gellmann_bound_closed_form,
    minimize_objective,
    pauli_bound_closed_form,
    pauli_moments,
    sphere_grid,
)

TOL = 1e-12


@pytest.fixture(scope="module")
def catalog():
    return generator_catalog()


def test_catalog_names(catalog):
    assert set(catalog.names()) == {"sigma_x", "sigma_y", "sigma_z", "lambda_3", "lambda_4", "lambda_5"}


def test_catalog_unknown_name(catalog):
    with pytest.raises(KeyError, match="sigma_x"):
        catalog.get("sigma_w")


def test_gellmann_commutator_convention(catalog):
    l3, l4, l5 = (catalog.get(n).entries for n in ("lambda_3", "lambda_4", "lambda_5"))
    assert np.allclose(l3 @ l4 - l4 @ l3, -1j * l5)
    assert LAMBDA_5_SIGN_VS_STANDARD == -1


def test_pauli_closed_form_zero_iff_equal_modulus():
    assert pauli_bound_closed_form(1, 1) == pytest.approx(0.0, abs=TOL)
    assert pauli_bound_closed_form(1, 1j) == pytest.approx(0.0, abs=TOL)
    assert pauli_bound_closed_form(2, 1) == pytest.approx(0.6, abs=TOL)


def test_closed_forms_reject_zero_vector():
    with pytest.raises(ZeroVectorError):
        pauli_bound_closed_form(0, 0)
    with pytest.raises(ZeroVectorError):
        gellmann_bound_closed_form(0, 0, 0)


def test_pauli_moments_phi1():
    moments = pauli_moments(1, 1)
    assert moments["mean_x"] == pytest.approx(1.0, abs=TOL)
    assert moments["mean_y"] == pytest.approx(0.0, abs=TOL)
    assert moments["delta_x"] == pytest.approx(0.0, abs=1e-7)
    assert moments["delta_y"] == pytest.approx(1.0, abs=TOL)


complex_numbers = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


@seed(5)
@settings(max_examples=80, deadline=None)
@given(a=complex_numbers, b=complex_numbers)
def test_pauli_closed_form_matches_report(catalog, a, b):
    if abs(a) ** 2 + abs(b) ** 2 < 1e-6:
        return
    report = robertson_report(catalog.get("sigma_x"), catalog.get("sigma_y"), StateVector.from_components([a, b]))
    assert report.bound == pytest.approx(pauli_bound_closed_form(a, b), abs=1e-12)
    moments = pauli_moments(a, b)
    assert report.delta_a == pytest.approx(moments["delta_x"], abs=1e-7)
    assert report.delta_b == pytest.approx(moments["delta_y"], abs=1e-7)


@seed(6)
@settings(max_examples=80, deadline=None)
@given(a=complex_numbers, b=complex_numbers, c=complex_numbers)
def test_gellmann_closed_form_matches_report(catalog, a, b, c):
    if abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 < 1e-6:
        return
    report = robertson_report(catalog.get("lambda_3"), catalog.get("lambda_4"), StateVector.from_components([a, b, c]))
    assert report.bound == pytest.approx(gellmann_bound_closed_form(a, b, c), abs=1e-12)


def test_closed_forms_match_reports_random_sweep(catalog):
    rng = np.random.default_rng(8)
    sx, sy = catalog.get("sigma_x"), catalog.get("sigma_y")
    l3, l4 = catalog.get("lambda_3"), catalog.get("lambda_4")
    for _ in range(10_000):
        a, b, c = rng.normal(size=3) + 1j * rng.normal(size=3)
        pauli = robertson_report(sx, sy, StateVector.from_components([a, b]))
        assert abs(pauli.bound - pauli_bound_closed_form(a, b)) <= 1e-12
        gellmann = robertson_report(l3, l4, StateVector.from_components([a, b, c]))
        assert abs(gellmann.bound - gellmann_bound_closed_form(a, b, c)) <= 1e-12


def test_gellmann_psi1(catalog):
    report = robertson_report(catalog.get("lambda_3"), catalog.get("lambda_4"), StateVector.from_components([1, 1, 1]))
    assert report.bound == pytest.approx(0.0, abs=TOL)


def test_real_family_has_zero_bound(catalog):
    verdict = classify_family(
        FamilyDescriptor(FamilyKind.REAL), catalog.get("lambda_3"), catalog.get("lambda_4"), samples=1000, seed=1
    )
    assert verdict.bound_zero_on_family
    assert verdict.sample_count == 1000
    assert verdict.max_bound <= TOL


def test_proportional_family_has_zero_bound(catalog):
    family = FamilyDescriptor(FamilyKind.PROPORTIONAL)
    verdict = classify_family(family, catalog.get("lambda_3"), catalog.get("lambda_4"), samples=1000, seed=2)
    assert verdict.bound_zero_on_family
    assert verdict.counter_states == []
    assert any("beta = 0" in note for note in verdict.notes)


def test_proportional_family_first_draw_has_beta_zero():
    family = FamilyDescriptor(FamilyKind.PROPORTIONAL)
    first = next(family.sample_components(1, np.random.default_rng(0)))
    assert first[2] == 0


def test_complex_family_anchor_is_a_counter_state(catalog):
    family = FamilyDescriptor(FamilyKind.COMPLEX, anchors=((1, 0, 1j),))
    verdict = classify_family(family, catalog.get("lambda_3"), catalog.get("lambda_4"), samples=50, seed=3)
    assert not verdict.bound_zero_on_family
    anchor = StateVector.from_components([1, 0, 1j])
    assert robertson_report(catalog.get("lambda_3"), catalog.get("lambda_4"), anchor).bound > 1e-3
    assert np.allclose(verdict.counter_states[0].amplitudes, anchor.amplitudes)


def test_equal_modulus_family_is_zero_for_pauli(catalog):
    family = FamilyDescriptor(FamilyKind.EQUAL_MODULUS, dim=2)
    verdict = classify_family(family, catalog.get("sigma_x"), catalog.get("sigma_y"), samples=200, seed=4)
    assert verdict.bound_zero_on_family


def test_family_dimension_errors(catalog):
    with pytest.raises(DimensionMismatchError):
        FamilyDescriptor(FamilyKind.PROPORTIONAL, dim=2)
    with pytest.raises(DimensionMismatchError):
        classify_family(FamilyDescriptor(FamilyKind.REAL, dim=2), catalog.get("lambda_3"), catalog.get("lambda_4"))


def test_empty_family(catalog):
    with pytest.raises(EmptyFamilyError):
        classify_family(FamilyDescriptor(FamilyKind.REAL), catalog.get("lambda_3"), catalog.get("lambda_4"), samples=0)


def test_default_samples_scale_with_parameters():
    assert FamilyDescriptor(FamilyKind.REAL).default_samples() == 512 * 2
    assert FamilyDescriptor(FamilyKind.COMPLEX).default_samples() == 512 * 3


def test_classify_family_is_deterministic(catalog):
    family = FamilyDescriptor(FamilyKind.COMPLEX)
    A, B = catalog.get("lambda_3"), catalog.get("lambda_4")
    first = classify_family(family, A, B, samples=100, seed=9).to_dict()
    second = classify_family(family, A, B, samples=100, seed=9).to_dict()
    assert first == second


def test_witness_echo_limit(catalog):
    verdict = classify_family(
        FamilyDescriptor(FamilyKind.REAL), catalog.get("lambda_3"), catalog.get("lambda_4"), samples=100, seed=1
    )
    data = verdict.to_dict(echo_limit=3)
    assert data["witness_count"] == 100
    assert len(data["witness_states"]) == 3


def test_batch_objective_matches_reports(rng):
    A, B = random_hermitian(3, rng), random_hermitian(3, rng)
    states = sphere_grid(3, 5)
    values = batch_objective(A, B, states, Objective.GAP)
    for row, value in zip(states[:20], values[:20]):
        assert value == pytest.approx(robertson_report(A, B, StateVector.from_components(row)).gap, abs=1e-12)


def test_sphere_grid_rows_are_unit():
    for dim in (2, 3):
        grid = sphere_grid(dim, 6)
        assert np.allclose(np.linalg.norm(grid, axis=1), 1.0)
    with pytest.raises(DimensionMismatchError):
        sphere_grid(4, 6)


@pytest.mark.parametrize("objective", [Objective.PRODUCT, Objective.BOUND])
def test_optimizer_reaches_zero_for_pauli(catalog, objective):
    result = minimize_objective(catalog.get("sigma_x"), catalog.get("sigma_y"), objective, seed=0)
    assert result.best_value <= 1e-8
    brute, _ = brute_force_minimum(catalog.get("sigma_x"), catalog.get("sigma_y"), objective)
    assert result.best_value <= brute + 1e-6


def test_optimizer_against_brute_force_dim3(catalog):
    A, B = catalog.get("lambda_3"), catalog.get("lambda_4")
    result = minimize_objective(A, B, Objective.GAP, seed=1, restarts=12)
    brute, _ = brute_force_minimum(A, B, Objective.GAP, points=12)
    assert result.best_value <= brute + 1e-6
    assert result.best_value >= -1e-9


def test_optimizer_is_deterministic(catalog):
    A, B = catalog.get("sigma_x"), catalog.get("sigma_z")
    first = minimize_objective(A, B, Objective.PRODUCT, seed=4, restarts=2)
    second = minimize_objective(A, B, Objective.PRODUCT, seed=4, restarts=2)
    assert first.best_value == second.best_value
    assert np.array_equal(first.best_state.amplitudes, second.best_state.amplitudes)


def test_optimizer_rejects_bad_input(catalog):
    with pytest.raises(DimensionMismatchError):
        minimize_objective(catalog.get("sigma_x"), catalog.get("lambda_3"))
    with pytest.raises(ValueError):
        minimize_objective(catalog.get("sigma_x"), catalog.get("sigma_y"), restarts=0)
