"""
Scenario Handlers for uncertainty-lab.
One handler per scenario kind; each turns a validated scenario into report
records carrying their embedded checks.
"""

import logging
import math
import time
from typing import Callable, Optional

import numpy as np

from .boxlab import (
    MomentumExtension,
    apply_momentum,
    apply_position,
    canonical_uncertainty_report,
    commutator_expectation_canonical,
    domain_check,
    eigenfunction,
    eigenvalue,
    inner_product,
    momentum_spread,
    position_spread,
    random_phase_state,
    random_smooth_state,
    wall_vanishing_state,
    xm_commutator_expectation,
    xm_commutator_quadrature,
    xm_uncertainty_report,
)
from .config import get_config
from .errors import UnsupportedIntervalError
from .observables import (
    HermitianOperator,
    StateVector,
    inf_norm,
    random_hermitian,
    random_state,
    robertson_report,
)
from .pt_symmetry import (
    Phase,
    cpt_inner_product,
    exchange_parity,
    find_non_universal_pair,
    hermitian_limit_path,
    make_model,
    non_universality_demo,
    prepare_model,
    random_unbroken_model,
    signed_permutation,
    solve_spectrum,
    two_level_eigenvalues,
    two_level_model,
)
from .reports import ReportRecord, to_plain
from .scenarios import (
    BoxOperation,
    BoxParameters,
    BoxState,
    FamilyScanParameters,
    FiniteDimParameters,
    OperatorSpec,
    PTModelParameters,
    PTNonUniversalityParameters,
    PTOperation,
    ScenarioConfig,
    ScenarioKind,
    SearchParameters,
)
from .serialization import decode_matrix, decode_vector
from .wavefunctions import BoxInterval, BoxWavefunction
from .zero_bound import (
    FamilyDescriptor,
    brute_force_minimum,
    classify_family,
    generator_catalog,
    gellmann_bound_closed_form,
    minimize_objective,
    pauli_bound_closed_form,
)

logger = logging.getLogger(__name__)

# Closed-form bounds for named generator pairs, keyed by (operator_a, operator_b)
CLOSED_FORM_BOUNDS: dict[tuple[str, str], Callable[..., float]] = {
    ("sigma_x", "sigma_y"): pauli_bound_closed_form,
    ("lambda_3", "lambda_4"): gellmann_bound_closed_form,
}
CLOSED_FORM_TOLERANCE = 1e-12


class Recorder:
    """Collects records for one scenario, timing each since the previous one."""

    def __init__(self, scenario: ScenarioConfig, module: str):
        self.scenario = scenario
        self.module = module
        self.records: list[ReportRecord] = []
        self._mark = time.perf_counter()

    def record(self, operation: str, inputs: dict, outputs: dict, notes=()) -> ReportRecord:
        now = time.perf_counter()
        record = ReportRecord(
            scenario_id=self.scenario.scenario_id,
            module=self.module,
            operation=operation,
            inputs=to_plain(inputs),
            outputs=to_plain(outputs),
            provenance=self.scenario.provenance,
            notes=list(notes),
            wall_time_ms=(now - self._mark) * 1000.0,
        )
        self._mark = now
        self.records.append(record)
        return record


def resolve_operator(spec: OperatorSpec, label: str) -> HermitianOperator:
    """Catalog name or explicit matrix."""
    if isinstance(spec, str):
        return generator_catalog().get(spec)
    return HermitianOperator(decode_matrix(spec), label=label)


def _closed_form_for(params) -> Optional[Callable[..., float]]:
    if isinstance(params.operator_a, str) and isinstance(params.operator_b, str):
        return CLOSED_FORM_BOUNDS.get((params.operator_a, params.operator_b))
    return None


def _angle_distance(a: float, b: float) -> float:
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


# observable-core

def handle_finite_dim(scenario: ScenarioConfig) -> list[ReportRecord]:
    params: FiniteDimParameters = scenario.params
    recorder = Recorder(scenario, "observable-core")

    if params.random_trials:
        rng = np.random.default_rng(scenario.seed)
        min_gap, max_bound, worst_ratio = math.inf, 0.0, 0.0
        for _ in range(params.random_trials):
            dim = int(rng.choice(params.random_dims))
            report = robertson_report(
                random_hermitian(dim, rng), random_hermitian(dim, rng), random_state(dim, rng)
            )
            min_gap = min(min_gap, report.gap)
            max_bound = max(max_bound, report.bound)
            worst_ratio = max(worst_ratio, report.bound / report.product if report.product else 0.0)
        record = recorder.record(
            "robertson_report",
            {"random_trials": params.random_trials, "random_dims": params.random_dims, "seed": scenario.seed},
            {"min_gap": min_gap, "max_bound": max_bound, "max_bound_over_product": worst_ratio},
        )
        floor = -1e-10
        record.add_check("robertson_floor", min_gap >= floor, min_gap, f">= {floor}", 1e-10)
        return recorder.records

    A = resolve_operator(params.operator_a, "A")
    B = resolve_operator(params.operator_b, "B")
    closed_form = _closed_form_for(params)
    for index, components in enumerate(params.states):
        raw = decode_vector(components)
        state = StateVector.from_components(raw)
        report = robertson_report(A, B, state)
        outputs = report.to_dict()
        record = recorder.record(
            "robertson_report",
            {"operator_a": A.label, "operator_b": B.label, "state": raw},
            outputs,
        )
        record.add_check("robertson_floor", report.gap >= -report.tolerance,
                         report.gap, ">= 0", report.tolerance)
        if closed_form is not None:
            expected = closed_form(*raw)
            record.add_check(
                "closed_form_bound",
                abs(expected - report.bound) <= CLOSED_FORM_TOLERANCE,
                report.bound,
                expected,
                CLOSED_FORM_TOLERANCE,
            )
        if params.expect:
            for key, expected in sorted(params.expect[index].items()):
                actual = outputs.get(key)
                passed = actual is not None and abs(float(actual) - expected) <= params.expect_tolerance
                record.add_check(f"expect_{key}", passed, actual, expected, params.expect_tolerance)
    return recorder.records


# zero-bound-explorer

def handle_family_scan(scenario: ScenarioConfig) -> list[ReportRecord]:
    params: FamilyScanParameters = scenario.params
    recorder = Recorder(scenario, "zero-bound-explorer")
    A = resolve_operator(params.operator_a, "A")
    B = resolve_operator(params.operator_b, "B")
    spec = params.family
    family = FamilyDescriptor(
        kind=spec.kind,
        dim=spec.dim,
        amplitude_range=tuple(spec.amplitude_range),
        beta_range=tuple(spec.beta_range),
        include_beta_zero=spec.include_beta_zero,
        anchors=tuple(tuple(decode_vector(anchor)) for anchor in spec.anchors),
    )
    verdict = classify_family(family, A, B, samples=params.samples, seed=scenario.seed)
    outputs = verdict.to_dict()
    record = recorder.record(
        "classify_family",
        {"operator_a": A.label, "operator_b": B.label, "family": family, "samples": params.samples},
        outputs,
        notes=verdict.notes,
    )

    if params.expect_bound_zero is not None:
        record.add_check(
            "bound_zero_on_family",
            verdict.bound_zero_on_family == params.expect_bound_zero,
            verdict.bound_zero_on_family,
            params.expect_bound_zero,
        )
    if params.expect_anchor_bound_above is not None:
        for index, anchor in enumerate(family.anchors):
            bound = robertson_report(A, B, StateVector.from_components(anchor)).bound
            record.add_check(
                f"anchor_{index}_bound",
                bound > params.expect_anchor_bound_above,
                bound,
                f"> {params.expect_anchor_bound_above}",
            )

    closed_form = _closed_form_for(params)
    if closed_form is not None:
        worst = 0.0
        for state in verdict.witness_states + verdict.counter_states:
            bound = robertson_report(A, B, state).bound
            worst = max(worst, abs(bound - closed_form(*state.amplitudes)))
        record.add_check("closed_form_agreement", worst <= CLOSED_FORM_TOLERANCE,
                         worst, 0.0, CLOSED_FORM_TOLERANCE)
    return recorder.records


def handle_search(scenario: ScenarioConfig) -> list[ReportRecord]:
    params: SearchParameters = scenario.params
    recorder = Recorder(scenario, "zero-bound-explorer")
    A = resolve_operator(params.operator_a, "A")
    B = resolve_operator(params.operator_b, "B")

    result = minimize_objective(A, B, params.objective, seed=scenario.seed, restarts=params.restarts)
    outputs = result.to_dict()
    checks = []
    if params.brute_force:
        value, state = brute_force_minimum(A, B, params.objective, params.brute_force_points)
        outputs["brute_force_value"] = value
        outputs["brute_force_state"] = state
        checks.append((
            "not_worse_than_grid",
            result.best_value <= value + params.brute_force_tolerance,
            result.best_value,
            f"<= {value!r} + {params.brute_force_tolerance}",
            params.brute_force_tolerance,
        ))
    if params.expect_max_value is not None:
        checks.append((
            "best_value",
            result.best_value <= params.expect_max_value,
            result.best_value,
            f"<= {params.expect_max_value}",
            params.expect_max_value,
        ))
    rob = get_config().tolerances.rob
    checks.append(("above_floor", result.best_value >= -rob, result.best_value, f">= -{rob}", rob))

    record = recorder.record(
        "minimize_objective",
        {"operator_a": A.label, "operator_b": B.label, "objective": params.objective, "seed": scenario.seed},
        outputs,
    )
    for check in checks:
        record.add_check(*check)
    return recorder.records


# boxlab

def _box_interval(scenario: ScenarioConfig, params: BoxParameters) -> BoxInterval:
    variant = "standard" if scenario.kind is ScenarioKind.BOX_STANDARD else "symmetric"
    return BoxInterval.of(variant, params.length)


def _box_state(
    state: BoxState,
    interval: BoxInterval,
    rng: Optional[np.random.Generator],
    ext: MomentumExtension,
    n: int,
    grid_points: Optional[int],
) -> BoxWavefunction:
    if state is BoxState.EIGENFUNCTION:
        return eigenfunction(ext, n)
    if state is BoxState.WALL_VANISHING:
        return wall_vanishing_state(interval)
    if state is BoxState.RANDOM_PHASE:
        return random_phase_state(interval, rng, points=grid_points)
    return random_smooth_state(interval, rng)


def _box_eigenpairs(recorder: Recorder, interval: BoxInterval, params: BoxParameters) -> None:
    tolerances = get_config().tolerances
    for theta in params.thetas:
        ext = MomentumExtension(theta, interval, params.hbar)
        basis = []
        for n in params.ns:
            u = eigenfunction(ext, n)
            basis.append(u)
            p = eigenvalue(ext, n)
            residual = apply_momentum(u, ext).minus(u.scaled(p)).norm()
            delta_p = momentum_spread(u, ext)
            record = recorder.record(
                "eigenpair",
                {"n": n, "theta": theta},
                {"n": n, "theta": theta, "eigenvalue": p, "eigen_residual": residual,
                 "delta_p": delta_p, "delta_x": position_spread(u), "in_domain": True},
            )
            record.add_check("eigen_residual", residual <= 1e-9, residual, 0.0, 1e-9)
            record.add_check("delta_p", delta_p <= 1e-9, delta_p, 0.0, 1e-9)

        gram = np.array([[inner_product(f, g) for g in basis] for f in basis])
        deviation = float(np.max(np.abs(gram - np.eye(len(basis))))) if basis else 0.0
        record = recorder.record(
            "orthonormality",
            {"theta": theta, "ns": params.ns},
            {"theta": theta, "max_gram_deviation": deviation},
        )
        record.add_check("gram_identity", deviation <= tolerances.quad, deviation, 0.0, tolerances.quad)


def _box_domain_pathology(recorder: Recorder, interval: BoxInterval, params: BoxParameters) -> None:
    standard = interval.variant.value == "standard"
    for theta in params.thetas:
        ext = MomentumExtension(theta, interval, params.hbar)
        for n in params.ns:
            u = eigenfunction(ext, n)
            verdict = domain_check(apply_position(u), ext)
            comm = commutator_expectation_canonical(u, ext)
            report = canonical_uncertainty_report(u, ext)
            outputs = {
                "n": n,
                "theta": theta,
                "in_domain": verdict.in_domain,
                "residual": verdict.residual,
                "shifted_theta": verdict.shifted_theta,
                "offending_factor": comm.offending_factor,
                **{k: v for k, v in report.to_dict().items() if k != "in_domain"},
            }
            record = recorder.record(
                "domain_check", {"n": n, "theta": theta}, outputs, notes=[verdict.note, *report.notes]
            )
            record.add_check("x_u_outside_domain", not verdict.in_domain, verdict.in_domain, False)
            record.add_check("commutator_undefined", not comm.defined, comm.defined, False)
            if standard:
                record.add_check("no_shifted_theta", verdict.shifted_theta is None,
                                 verdict.shifted_theta, None)


def _box_domain_shift(recorder: Recorder, interval: BoxInterval, params: BoxParameters) -> None:
    if interval.variant.value != "symmetric":
        raise UnsupportedIntervalError("the domain shift law concerns the symmetric box")
    tolerance = 1e-6
    for alpha in params.alphas:
        ext = MomentumExtension.wrapped(alpha, interval, params.hbar)
        expected = (alpha + math.pi) % (2 * math.pi)
        for n in params.ns:
            xu = apply_position(eigenfunction(ext, n))
            verdict = domain_check(xu, ext)
            shifted_ok = domain_check(xu, MomentumExtension.wrapped(expected, interval, params.hbar))
            if verdict.shifted_theta is None:
                distance = math.inf
            else:
                distance = _angle_distance(verdict.shifted_theta, expected)
            record = recorder.record(
                "domain_shift",
                {"alpha": alpha, "n": n},
                {"alpha": alpha, "n": n, "theta": ext.theta, "in_domain": verdict.in_domain,
                 "residual": verdict.residual, "shifted_theta": verdict.shifted_theta,
                 "expected_shifted_theta": expected, "shifted_residual": shifted_ok.residual},
                notes=[verdict.note],
            )
            record.add_check("outside_original_domain", not verdict.in_domain, verdict.in_domain, False)
            record.add_check("shifted_theta", distance <= tolerance,
                             verdict.shifted_theta, expected, tolerance)
            record.add_check("inside_shifted_domain", shifted_ok.in_domain, shifted_ok.residual, 0.0,
                             get_config().tolerances.bc_closed)


def _box_xm_formula(
    recorder: Recorder,
    interval: BoxInterval,
    params: BoxParameters,
    rng: Optional[np.random.Generator],
) -> None:
    hbar = params.hbar or get_config().box.hbar
    quad_tolerance = 10 * get_config().tolerances.quad

    if params.state in (BoxState.RANDOM_PHASE, BoxState.RANDOM_SMOOTH):
        ext = MomentumExtension(0.0, interval, hbar)
        worst_formula, worst_quadrature = 0.0, 0.0
        count = max(params.random_states, 1)
        for _ in range(count):
            f = _box_state(params.state, interval, rng, ext, 0, params.grid_points)
            formula = xm_commutator_expectation(f, hbar)
            quadrature = xm_commutator_quadrature(f, hbar, grid_points=params.grid_points)
            worst_quadrature = max(worst_quadrature, abs(quadrature - formula))
            if params.state is BoxState.RANDOM_PHASE:
                worst_formula = max(worst_formula, abs(formula))
        record = recorder.record(
            "xm_commutator_expectation",
            {"state": params.state, "random_states": count, "grid_points": params.grid_points},
            {"max_formula_modulus": worst_formula, "max_quadrature_mismatch": worst_quadrature},
        )
        record.add_check("quadrature_agreement", worst_quadrature <= quad_tolerance,
                         worst_quadrature, 0.0, quad_tolerance)
        if params.state is BoxState.RANDOM_PHASE:
            record.add_check("unit_modulus_walls_give_zero", worst_formula <= 1e-10,
                             worst_formula, 0.0, 1e-10)
        return

    for theta in params.thetas:
        ext = MomentumExtension(theta, interval, hbar)
        ns = params.ns if params.state is BoxState.EIGENFUNCTION else params.ns[:1]
        for n in ns:
            f = _box_state(params.state, interval, rng, ext, n, params.grid_points)
            formula = xm_commutator_expectation(f, hbar)
            quadrature = xm_commutator_quadrature(f, hbar)
            expected = 0j if params.state is BoxState.EIGENFUNCTION else complex(0.0, -hbar)
            outputs = {
                "n": n,
                "theta": theta,
                "commutator_expectation": formula,
                "quadrature": quadrature,
            }
            notes = []
            if params.state is BoxState.WALL_VANISHING:
                canonical = commutator_expectation_canonical(f, ext)
                outputs["canonical_commutator"] = canonical
                notes.append(canonical.note)
            record = recorder.record(
                "xm_commutator_expectation",
                {"n": n, "theta": theta, "state": params.state},
                outputs,
                notes,
            )
            record.add_check("boundary_formula", abs(formula - expected) <= 1e-10,
                             formula, expected, 1e-10)
            record.add_check("quadrature_agreement", abs(quadrature - formula) <= quad_tolerance,
                             quadrature, formula, quad_tolerance)
            if params.state is BoxState.WALL_VANISHING:
                canonical_value = outputs["canonical_commutator"].value
                matches = canonical_value is not None and abs(canonical_value - expected) <= 1e-10
                record.add_check("canonical_matches", matches, canonical_value, expected, 1e-10)


def _box_xm_bound(
    recorder: Recorder,
    interval: BoxInterval,
    params: BoxParameters,
    rng: Optional[np.random.Generator],
) -> None:
    hbar = params.hbar or get_config().box.hbar
    length = interval.length
    quad = get_config().tolerances.quad
    for theta in params.thetas:
        ext = MomentumExtension(theta, interval, hbar)
        f = _box_state(params.state, interval, rng, ext, params.ns[0], params.grid_points)
        if params.state is BoxState.RANDOM_PHASE:
            wall_phase = float(np.angle(f.boundary_right / f.boundary_left))
            ext = MomentumExtension.wrapped(wall_phase, interval, hbar)
        report = xm_uncertainty_report(f, ext)
        outputs = {"n": params.ns[0], "theta": ext.theta, **report.to_dict()}
        record = recorder.record(
            "xm_uncertainty_report",
            {"theta": theta, "state": params.state},
            outputs,
            notes=report.notes,
        )
        if report.product is not None:
            record.add_check("product_above_bound", report.product >= report.bound - quad,
                             report.product, f">= {report.bound!r}", quad)

        if params.state is BoxState.WALL_VANISHING:
            oracle = {
                "delta_x": length * math.sqrt(1 / 12 - 1 / (2 * math.pi ** 2)),
                "delta_p": hbar * math.pi / length,
            }
            oracle["product"] = oracle["delta_x"] * oracle["delta_p"]
            for key, expected in oracle.items():
                actual = getattr(report, key)
                record.add_check(f"{key}_oracle", abs(actual - expected) <= 1e-6 * expected,
                                 actual, expected, 1e-6)
            record.add_check("bound_half_hbar", abs(report.bound - hbar / 2) <= 1e-12,
                             report.bound, hbar / 2, 1e-12)
        elif params.state is BoxState.EIGENFUNCTION:
            expected_dx = length / (2 * math.sqrt(3))
            record.add_check("delta_x_uniform", abs(report.delta_x - expected_dx) <= 1e-9,
                             report.delta_x, expected_dx, 1e-9)
            record.add_check("delta_p_zero", report.delta_p <= 1e-9, report.delta_p, 0.0, 1e-9)
            record.add_check("bound_zero", report.bound <= 1e-10, report.bound, 0.0, 1e-10)
        elif params.state is BoxState.RANDOM_PHASE:
            record.add_check("bound_zero", report.bound <= 1e-10, report.bound, 0.0, 1e-10)


def _box_canonical_report(recorder: Recorder, interval: BoxInterval, params: BoxParameters) -> None:
    for theta in params.thetas:
        ext = MomentumExtension(theta, interval, params.hbar)
        for n in params.ns:
            if params.state is BoxState.EIGENFUNCTION:
                f = eigenfunction(ext, n)
            else:
                f = wall_vanishing_state(interval)
            report = canonical_uncertainty_report(f, ext)
            record = recorder.record(
                "canonical_uncertainty_report",
                {"n": n, "theta": theta, "state": params.state},
                {"n": n, "theta": theta, **report.to_dict()},
                notes=report.notes,
            )
            if report.commutator_defined and report.product is not None:
                record.add_check("product_above_bound",
                                 report.product >= report.bound - get_config().tolerances.quad,
                                 report.product, f">= {report.bound!r}", get_config().tolerances.quad)
            if params.state is BoxState.EIGENFUNCTION:
                record.add_check("bound_undefined", not report.commutator_defined,
                                 report.commutator_defined, False)


def handle_box(scenario: ScenarioConfig) -> list[ReportRecord]:
    params: BoxParameters = scenario.params
    recorder = Recorder(scenario, "boxlab")
    interval = _box_interval(scenario, params)
    rng = np.random.default_rng(scenario.seed) if scenario.seed is not None else None

    operation = params.operation
    if operation is BoxOperation.EIGENPAIRS:
        _box_eigenpairs(recorder, interval, params)
    elif operation is BoxOperation.DOMAIN_PATHOLOGY:
        _box_domain_pathology(recorder, interval, params)
    elif operation is BoxOperation.DOMAIN_SHIFT:
        _box_domain_shift(recorder, interval, params)
    elif operation is BoxOperation.XM_FORMULA:
        _box_xm_formula(recorder, interval, params, rng)
    elif operation is BoxOperation.XM_BOUND:
        _box_xm_bound(recorder, interval, params, rng)
    else:
        _box_canonical_report(recorder, interval, params)
    return recorder.records


# pt-symmetry

def _pt_model_from(params: PTModelParameters, rng: Optional[np.random.Generator]):
    if params.model == "two_level":
        return two_level_model(params.r, params.s, params.theta)
    if params.model == "random":
        return random_unbroken_model(params.dims[0], rng)
    H = decode_matrix(params.H)
    if params.parity is None:
        P = exchange_parity(H.shape[0])
    else:
        P = signed_permutation([i for i, _ in params.parity], [s for _, s in params.parity])
    return make_model(H, P, label="matrix")


def _cpt_positivity(model, rng: np.random.Generator, count: int) -> float:
    """Smallest (v, v)^CPT over random unit vectors, relative to ||v||^2."""
    vectors = rng.normal(size=(count, model.dim)) + 1j * rng.normal(size=(count, model.dim))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    mapped = vectors.conj() @ (model.C @ model.P).T
    values = np.sum(mapped * vectors, axis=1)
    return float(np.min(values.real))


def handle_pt_model(scenario: ScenarioConfig) -> list[ReportRecord]:
    params: PTModelParameters = scenario.params
    recorder = Recorder(scenario, "pt-symmetry")
    rng = np.random.default_rng(scenario.seed) if scenario.seed is not None else None
    operation = params.operation

    if operation is PTOperation.RANDOM_SWEEP:
        worst = {"c_squared": 0.0, "c_commutes_with_h": 0.0, "c_commutes_with_pt": 0.0}
        min_positivity = math.inf
        for index in range(params.count):
            dim = params.dims[index % len(params.dims)]
            model = random_unbroken_model(dim, rng)
            scale = max(1.0, model.h_norm)
            for key, value in model.c_residuals.items():
                worst[key] = max(worst[key], value / scale)
            min_positivity = min(min_positivity, _cpt_positivity(model, rng, 1000))
        outputs = {**worst, "max_residual": max(worst.values()), "min_cpt_norm": min_positivity}
        record = recorder.record("random_sweep", {"count": params.count, "dims": params.dims}, outputs)
        record.add_check("c_algebra", outputs["max_residual"] <= 1e-10, outputs["max_residual"], 0.0, 1e-10)
        record.add_check("cpt_positivity", min_positivity > 0.0, min_positivity, "> 0")
        return recorder.records

    if operation is PTOperation.HERMITIAN_LIMIT:
        path = hermitian_limit_path(params.r, params.s, params.theta, params.path_points)
        for point in path:
            recorder.record(
                "hermitian_limit_path",
                {"r": params.r, "s": params.s, "theta": point["theta"]},
                {"theta": point["theta"], "c_minus_p": point["c_minus_p"],
                 "phase": point["model"].phase, **point["model"].c_residuals},
            )
        start, middle, end = (path[0]["c_minus_p"], path[len(path) // 2]["c_minus_p"], path[-1]["c_minus_p"])
        record = recorder.records[-1]
        record.add_check("hermitian_endpoint", end <= 1e-8, end, 0.0, 1e-8)
        record.add_check("midpoint_between_endpoints", end - 1e-8 <= middle <= start + 1e-8,
                         middle, f"[{end!r}, {start!r}]", 1e-8)
        return recorder.records

    model = solve_spectrum(_pt_model_from(params, rng))
    tolerance = get_config().tolerances.pt
    scale = max(1.0, model.h_norm)
    outputs = {
        "theta": params.theta if params.model == "two_level" else None,
        "phase": model.phase,
        "spectrum": model.spectrum,
        "pt_norms": model.pt_norms,
        "label_offset": model.label_offset,
        "model": model,
    }
    direct_real = bool(np.all(np.abs(np.linalg.eigvals(model.H).imag) <= tolerance * scale))
    checks = [("phase_matches_spectrum", (model.phase is Phase.UNBROKEN) == direct_real or model.degenerate,
               model.phase, "unbroken" if direct_real else "broken", None)]
    if params.expect_phase is not None:
        checks.append(("expected_phase", model.phase.value == params.expect_phase, model.phase,
                       params.expect_phase, None))
    if params.model == "two_level":
        oracle = two_level_eigenvalues(params.r, params.s, params.theta)
        mismatch = float(np.max(np.abs(np.sort_complex(model.spectrum) - np.sort_complex(oracle))))
        checks.append(("characteristic_polynomial", mismatch <= 1e-10 * scale, mismatch, 0.0, 1e-10 * scale))

    if operation is PTOperation.C_OPERATOR:
        model = prepare_model(model)
        residuals = model.c_residuals
        outputs.update(residuals)
        outputs["model"] = model
        outputs["max_residual"] = max(residuals.values())
        outputs["c_minus_p"] = inf_norm(model.C - model.P)
        outputs["trace_c"] = complex(np.trace(model.C))
        limit = 1e-10 * scale
        checks.append(("c_algebra", outputs["max_residual"] <= limit, outputs["max_residual"], 0.0, limit))
        cpt_norms = [cpt_inner_product(v, v, model) for v in model.eigenvectors.T]
        worst_cpt = max(abs(v - 1.0) for v in cpt_norms)
        checks.append(("eigenvector_cpt_norms", worst_cpt <= 1e-9, worst_cpt, 0.0, 1e-9))
        trace_expected = float(np.sum(model.pt_norms))
        checks.append(("trace_c", abs(outputs["trace_c"] - trace_expected) <= 1e-9, outputs["trace_c"],
                       trace_expected, 1e-9))
        if inf_norm(model.H - model.H.conj().T) > tolerance * scale:
            checks.append(
                ("c_differs_from_p", outputs["c_minus_p"] > 1e-6, outputs["c_minus_p"], "> 1e-6", None)
            )

    record = recorder.record(operation.value, params.model_dump(mode="json"), outputs)
    for check in checks:
        record.add_check(*check)
    return recorder.records


def handle_pt_non_universality(scenario: ScenarioConfig) -> list[ReportRecord]:
    params: PTNonUniversalityParameters = scenario.params
    recorder = Recorder(scenario, "pt-symmetry")
    tolerance = get_config().tolerances.pt

    for pair in range(params.pairs):
        seed = scenario.seed + pair
        model_1, model_2, _ = find_non_universal_pair(seed, params.dim, min_violation=params.min_violation)
        for operator in params.operators:
            result = non_universality_demo(model_1.H, model_2.H, model_1.P, operator)
            outputs = {
                "pair": pair,
                "operator_label": operator,
                "model_1_residual": result.under_model_1.residual,
                "model_2_residual": result.under_model_2.residual,
                "verdicts_differ": result.verdicts_differ,
                "result": result,
            }
            record = recorder.record(
                "non_universality_demo",
                {"pair": pair, "seed": seed, "operator": operator, "H1": model_1.H, "H2": model_2.H},
                outputs,
            )
            first = result.under_model_1.residual
            second = result.under_model_2.residual
            if operator in ("h1", "c1", "identity"):
                record.add_check("observable_under_model_1", first <= tolerance, first, 0.0, tolerance)
            if operator == "h1":
                record.add_check("violated_under_model_2", second >= params.min_violation, second,
                                 f">= {params.min_violation}")
            if operator in ("identity", "h2"):
                record.add_check("observable_under_model_2", second <= tolerance, second, 0.0, tolerance)
            if operator == "h2":
                record.add_check("h2_fails_under_model_1", not result.under_model_1.satisfies_condition,
                                 first, f"> {tolerance}")
    return recorder.records


HANDLERS: dict[ScenarioKind, Callable[[ScenarioConfig], list[ReportRecord]]] = {
    ScenarioKind.FINITE_DIM: handle_finite_dim,
    ScenarioKind.FAMILY_SCAN: handle_family_scan,
    ScenarioKind.SEARCH: handle_search,
    ScenarioKind.BOX_STANDARD: handle_box,
    ScenarioKind.BOX_SYMMETRIC: handle_box,
    ScenarioKind.PT_MODEL: handle_pt_model,
    ScenarioKind.PT_NON_UNIVERSALITY: handle_pt_non_universality,
}


def run_handler(scenario: ScenarioConfig) -> list[ReportRecord]:
    return HANDLERS[scenario.kind](scenario)
