"""
Invariant and acceptance suite behind the `validate` command.

Each check compares a closed form or a frequency-plane transform with an
independent route (Brillouin-zone quadrature or the finite-lattice oracle)
and reports a pass/fail verdict with a short numeric summary. Quick mode runs
the same checks at reduced lattice sizes and time windows.
"""

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import newton

from api.models import (
    BathParams,
    BathVariant,
    Boundary,
    EmitterSpec,
    NonlinearEmitterSpec,
    Region,
    Sheet,
    Sublattice,
    SublatticePair,
    TimeSeries,
)
from core.bath_model import mirage_map, region_of
from core.bound_states import BoundState, bs_wavefunction, obc_dark_state
from core.dynamics import evolve_emitters, rabi_frequency_estimate, rabi_frequency_fit, self_energy_matrix
from core.lattice_oracle import (
    build_heff,
    eigenmode_near,
    embed_bound_state,
    emitter_chain,
    emitter_label,
    evolve_state,
    finite_spectrum,
    label_key,
    phase_aligned,
    spectral_hausdorff,
    two_excitation_build,
)
from core.multi_excitation import g2_series, pair_emission_dynamics
from core.self_energy import (
    cross_self_energy,
    interaction_single_pole,
    sigma_onsite,
    sigma_quadrature_oracle,
)
from misc.errors import (
    NUMERICAL_EXIT_CODE,
    NearSpectrum,
    NoConvergence,
    NoOscillationDetected,
    SSHBathError,
    WindowTooSmall,
)

# Single-emitter parameters of the three bath regimes (topological, point gap, trivial)
REGIME_J1 = (0.7, 1.02, 1.1)
REGIME_BATH = {"j2": 1.0, "gamma_b": 0.05}
REGIME_EMITTER = {"omega_rabi": 0.2, "gamma_a": 0.05, "delta": 0.0}

# Kerr emitter parameter sets for the two-excitation checks
PAIR_SETS = {
    "weak": ({"j1": 1.01, "j2": 1.0, "gamma_b": 0.1}, {"omega_rabi": 0.01, "gamma_a": 0.06}, 0.1),
    "strong": ({"j1": 1.1, "j2": 1.0, "gamma_b": 1.0}, {"omega_rabi": 0.2, "gamma_a": 0.2}, 0.4),
}

BS_TOLERANCE = 1e-8

# Exchange run of the point-gap pair: window and skipped transient
EXCHANGE_WINDOW = 1200.0
EXCHANGE_TRANSIENT = 100.0
SHEET_TOLERANCE = 1e-6
ORACLE_TOLERANCE = 1e-4
PAIR_TOLERANCE = 1e-3
G2_LIMIT_TOLERANCE = 1e-6

CheckFunction = Callable[[bool, np.random.Generator], Tuple[bool, str]]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float
    skipped: bool = False

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class ValidationReport:
    quick: bool
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else NUMERICAL_EXIT_CODE

    def to_dict(self) -> Dict:
        return {
            "quick": self.quick,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }


class Skipped(Exception):
    """Raised by a check that does not apply at the requested scale."""


CHECKS: Dict[str, CheckFunction] = {}


def check(name: str) -> Callable[[CheckFunction], CheckFunction]:
    def register(function: CheckFunction) -> CheckFunction:
        CHECKS[name] = function
        return function

    return register


def _regime(j1: float) -> Tuple[BathParams, EmitterSpec]:
    return BathParams(j1=j1, **REGIME_BATH), EmitterSpec(**REGIME_EMITTER)


@check("self_energy_quadrature")
def check_self_energy_quadrature(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """Residue self-energies against the trapezoid k-integral at random points."""
    samples = 100 if quick else 1000
    worst, compared, near = 0.0, 0, 0
    pairs = list(SublatticePair)
    for _ in range(samples):
        params = BathParams(j1=rng.uniform(0.3, 1.8), j2=1.0, gamma_b=rng.uniform(0.0, 0.4))
        omega_rabi = rng.uniform(0.05, 0.5)
        omega = complex(rng.uniform(-3, 3), rng.uniform(-1.0, 0.5))
        pair = pairs[rng.integers(len(pairs))]
        d = int(rng.integers(-5, 6))
        sheet = Sheet.FIRST if rng.random() < 0.5 else Sheet.SECOND
        variant = BathVariant.PHYSICAL if sheet == Sheet.FIRST else BathVariant.MIRAGE
        try:
            reference = sigma_quadrature_oracle(
                params, omega_rabi, omega, d, pair, variant, near_tolerance=0.05
            )
        except NearSpectrum:
            near += 1
            continue
        value = complex(cross_self_energy(params, omega_rabi, omega, d, pair, sheet))
        error = abs(value - reference) / max(abs(reference), omega_rabi**2)
        worst = max(worst, error)
        compared += 1
    return worst < 1e-9, f"{compared} points (skipped {near} near the bands), worst relative error {worst:.3g}"


@check("region_two_zero")
def check_region_two_zero(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """The first-sheet on-site self-energy vanishes inside the point gap."""
    params = BathParams(j1=1.02, j2=1.0, gamma_b=0.05)
    target = 200 if quick else 1000
    inside, largest = 0, 0.0
    for _ in range(50 * target):
        if inside == target:
            break
        omega = complex(rng.uniform(-0.01, 0.01), rng.uniform(-0.04, -0.01))
        try:
            if region_of(params, omega) != Region.REGION_II:
                continue
        except SSHBathError:
            continue
        largest = max(largest, abs(sigma_onsite(params, 0.2, omega, Sheet.FIRST).value))
        inside += 1
    return inside == target and largest == 0.0, f"{inside} region-II points, max |Sigma_0| = {largest:.3g}"


def _bound_state_cases() -> List[Tuple[str, BathParams, EmitterSpec, Sheet]]:
    cases = []
    for j1 in (0.9, 1.1):
        for delta in (0.0, 0.02):
            for sublattice in Sublattice:
                emitter = EmitterSpec(sublattice=sublattice, delta=delta, omega_rabi=0.1)
                cases.append((f"closed j1={j1} delta={delta} {sublattice.value}", BathParams(j1=j1, j2=1.0), emitter, Sheet.FIRST))
    for j1 in (0.9, 1.03, 1.1):
        for delta in (0.0, 0.02):
            for sublattice in Sublattice:
                emitter = EmitterSpec(sublattice=sublattice, delta=delta, gamma_a=0.1, omega_rabi=0.1)
                params = BathParams(j1=j1, j2=1.0, gamma_b=0.1)
                for sheet in Sheet:
                    cases.append((f"{sheet.value} j1={j1} delta={delta} {sublattice.value}", params, emitter, sheet))
    for j1 in (0.8, 1.2):
        for sublattice in Sublattice:
            emitter = EmitterSpec(sublattice=sublattice, delta=1.0, gamma_a=0.1, omega_rabi=0.1)
            params = BathParams(j1=j1, j2=1.0, gamma_b=0.3)
            for sheet in Sheet:
                cases.append((f"{sheet.value} right gap j1={j1} {sublattice.value}", params, emitter, sheet))
    return cases


def _profile_error(op, state: BoundState) -> float:
    reference = embed_bound_state(op, state)
    _, vector = eigenmode_near(op, state.omega_bs.value + 1e-7)
    return float(np.max(np.abs(phase_aligned(vector, reference) - reference)))


def _edge(state: BoundState) -> float:
    return float(max(abs(state.f_a[0]), abs(state.f_a[-1]), abs(state.f_b[0]), abs(state.f_b[-1])))


def _fitted_bound_state(
    params: BathParams, emitter: EmitterSpec, sheet: Sheet, n_b: int
) -> Tuple[BoundState, int]:
    """Profile on a ring of n_b cells, or on a ring wide enough that its tails do not wrap."""
    placed = emitter.model_copy(update={"cell": n_b // 2})
    state = None
    try:
        state = bs_wavefunction(params, placed, sheet, window=n_b // 2 - 1)
        if _edge(state) <= BS_TOLERANCE / 10:
            return state, n_b
    except WindowTooSmall:
        pass
    half = len(bs_wavefunction(params, emitter, sheet).cells) // 2
    if state is not None and half < n_b // 2:
        return state, n_b
    ring = 2 * half + 2
    logger.debug(f"Profile needs {half} cells per side, comparing on n_b={ring}")
    placed = emitter.model_copy(update={"cell": ring // 2})
    return bs_wavefunction(params, placed, sheet, window=half), ring


@check("bound_state_profiles")
def check_bound_state_profiles(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """
    Analytic bound-state profiles against shift-and-invert eigenvectors.

    Profiles too wide for the default ring are compared on a larger one; a case
    whose profile cannot be built fails the check.
    """
    n_b = 500
    cases = _bound_state_cases()
    if quick:
        cases = cases[::4]
    worst, compared, failed = 0.0, 0, []
    for name, params, emitter, sheet in cases:
        try:
            state, ring = _fitted_bound_state(params, emitter, sheet, n_b)
        except SSHBathError as e:
            failed.append(f"{name} ({type(e).__name__})")
            continue
        op = build_heff(params, [emitter.model_copy(update={"cell": ring // 2})], ring, Boundary.PBC, sheet)
        error = _profile_error(op, state)
        logger.debug(f"Bound state {name}: max deviation {error:.3g}")
        worst = max(worst, error)
        compared += 1

    for j1 in (0.9, 1.1):
        params = BathParams(j1=j1, j2=1.0, gamma_b=0.1)
        for sublattice, cell in ((Sublattice.A, 5), (Sublattice.B, 14)):
            emitter = EmitterSpec(sublattice=sublattice, cell=cell, gamma_a=0.1, omega_rabi=0.1)
            state = obc_dark_state(params, emitter, n_b=20)
            op = build_heff(params, [emitter], 20, Boundary.OBC, Sheet.FIRST)
            worst = max(worst, _profile_error(op, state))
            compared += 1
    detail = f"{compared} profiles, worst deviation {worst:.3g}"
    if failed:
        detail += f"; failed: {', '.join(failed)}"
    return worst < BS_TOLERANCE and not failed, detail


@check("sheet_equivalence")
def check_sheet_equivalence(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """Both sheets give the same emitter dynamics; the unrescaled mirage chain does not."""
    t_grid = np.linspace(0.0, 30.0 if quick else 100.0, 121 if quick else 401)
    worst = 0.0
    for j1 in REGIME_J1:
        params, emitter = _regime(j1)
        first = evolve_emitters(params, [emitter], t_grid, Sheet.FIRST)["a0"]
        second = evolve_emitters(params, [emitter], t_grid, Sheet.SECOND)["a0"]
        worst = max(worst, float(np.max(np.abs(np.abs(first) - np.abs(second)))))

    n_b, t_max = (300, 20.0) if quick else (2000, 100.0)
    params = BathParams(j1=1.1, j2=1.0, gamma_b=0.05)
    chain = emitter_chain(10, n_b // 2, omega_rabi=0.2, gamma_a=0.05)
    chain_times = np.linspace(0.0, t_max, 101)
    observed = [emitter_label(m) for m in (0, 4, 7)]

    def amplitudes(sheet: Sheet, rescale: bool) -> np.ndarray:
        op = build_heff(params, chain, n_b, Boundary.PBC, sheet, rescale=rescale)
        series = evolve_state(op, op.basis_state(emitter_label(0)), chain_times, observe=observed)
        return np.array([np.abs(series[label_key(label)]) for label in observed])

    physical = amplitudes(Sheet.FIRST, True)
    chain_match = float(np.max(np.abs(physical - amplitudes(Sheet.SECOND, True))))
    chain_control = float(np.max(np.abs(physical - amplitudes(Sheet.SECOND, False))))
    passed = worst < SHEET_TOLERANCE and chain_match < SHEET_TOLERANCE and chain_control > 1e-4
    return passed, (
        f"single emitter max ||G1|-|G2|| = {worst:.3g}; chain rescaled {chain_match:.3g}, "
        f"unrescaled {chain_control:.3g}"
    )


@check("contour_vs_oracle")
def check_contour_vs_oracle(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """Contour-transform populations against direct lattice integration."""
    n_b, t_max = (400, 30.0) if quick else (2000, 100.0)
    t_grid = np.linspace(0.0, t_max, 121 if quick else 401)
    worst = 0.0
    for j1 in REGIME_J1:
        params, emitter = _regime(j1)
        contour = np.abs(evolve_emitters(params, [emitter], t_grid, Sheet.FIRST)["a0"]) ** 2
        placed = emitter.model_copy(update={"cell": n_b // 2})
        op = build_heff(params, [placed], n_b, Boundary.PBC, Sheet.FIRST)
        oracle = np.abs(evolve_state(op, op.basis_state(emitter_label(0)), t_grid)["a0"]) ** 2
        worst = max(worst, float(np.max(np.abs(contour - oracle))))
    return worst < ORACLE_TOLERANCE, f"max |n1 contour - n1 oracle| = {worst:.3g} on n_b={n_b}"


def _exchange_series(params: BathParams, n_b: int, t_max: float) -> TimeSeries:
    """Amplitudes of an A emitter and an initially excited B emitter d = 10 cells to its right."""
    first = n_b // 2 - 5
    emitters = [
        EmitterSpec(sublattice=Sublattice.A, cell=first, **REGIME_EMITTER),
        EmitterSpec(sublattice=Sublattice.B, cell=first + 10, **REGIME_EMITTER),
    ]
    op = build_heff(params, emitters, n_b, Boundary.PBC, Sheet.FIRST)
    t_grid = np.linspace(0.0, t_max, 2001)
    return evolve_state(op, op.basis_state(emitter_label(1)), t_grid)


def _dressed_splitting(params: BathParams, emitters: List[EmitterSpec], seeds: Sequence[complex]) -> float:
    """Re distance between the two mirage-sheet poles of the emitter Green matrix found from `seeds`."""
    deltas = np.diag([e.delta_prime for e in emitters])

    def determinant(omega: complex) -> complex:
        sigma = self_energy_matrix(params, emitters, np.asarray(omega), Sheet.SECOND)
        return complex(np.linalg.det(omega * np.eye(len(emitters)) - deltas - sigma))

    poles = []
    for seed in seeds:
        try:
            poles.append(complex(newton(determinant, seed, x1=seed * (1 + 1e-3) + 1e-6, tol=1e-12, maxiter=200)))
        except RuntimeError as e:
            raise NoConvergence(f"No Green-matrix pole near {seed}", seed=seed) from e
    if abs(poles[0] - poles[1]) < 1e-9:
        raise NoConvergence(f"Both seeds converged to the pole {poles[0]}", omega=poles[0])
    return abs(poles[0].real - poles[1].real)


def _quasiparticle_weight(params: BathParams, emitter: EmitterSpec, omega: complex) -> complex:
    """1 / (1 - dSigma_0/domega) of a single emitter on the mirage sheet."""
    step = 1e-6
    ahead = sigma_onsite(params, emitter.omega_rabi, omega + step, Sheet.SECOND).value
    behind = sigma_onsite(params, emitter.omega_rabi, omega - step, Sheet.SECOND).value
    return 1 / (1 - (ahead - behind) / (2 * step))


@check("anomalous_interaction")
def check_anomalous_interaction(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """
    Point-gap exchange follows the mirage bound-state coupling; the topological mirage shows none.

    The measured frequency is compared with the splitting of the two dressed
    poles. The bare single-pole value 2 sqrt(Sigma_AB Sigma_BA) misses the
    emitter weight Z of each bound state and is reported next to it.
    """
    if quick:
        raise Skipped("full run only")
    params = BathParams(j1=1.02, **REGIME_BATH)
    emitter = EmitterSpec(**REGIME_EMITTER)
    pair = [
        EmitterSpec(sublattice=Sublattice.A, cell=0, **REGIME_EMITTER),
        EmitterSpec(sublattice=Sublattice.B, cell=10, **REGIME_EMITTER),
    ]
    t_grid = np.linspace(0.0, EXCHANGE_WINDOW, 2401)
    series = evolve_emitters(params, pair, t_grid, Sheet.FIRST, initial=1)
    measured = rabi_frequency_fit(series, "a1", params.gamma_b, start=EXCHANGE_TRANSIENT)

    coupling = [
        interaction_single_pole(params, emitter.omega_rabi, emitter.delta_prime, 10, order, Sheet.SECOND)
        for order in (SublatticePair.AB, SublatticePair.BA)
    ]
    bare = 2 * math.sqrt(abs(coupling[0] * coupling[1]))
    midgap = -0.5j * params.gamma_b
    weight = _quasiparticle_weight(params, emitter, midgap)
    dressed_guess = abs(weight) * bare / 2
    expected = _dressed_splitting(params, pair, (midgap + dressed_guess, midgap - dressed_guess))
    relative = abs(measured - expected) / expected

    topological = BathParams(j1=0.98, **REGIME_BATH)
    window = topological.j1 / emitter.omega_rabi**2
    try:
        rabi_frequency_estimate(_exchange_series(topological, 1000, window), "a1", topological.gamma_b)
        quiet = False
    except NoOscillationDetected:
        quiet = True
    return relative < 0.1 and quiet, (
        f"exchange frequency {measured:.4g} vs dressed splitting {expected:.4g} ({relative:.1%}); "
        f"bare 2g = {bare:.4g}, Z = {abs(weight):.4g}, 2Zg = {abs(weight) * bare:.4g}; "
        f"topological mirage {'quiet' if quiet else 'oscillates'}"
    )


def _pair_case(name: str) -> Tuple[BathParams, NonlinearEmitterSpec]:
    bath, emitter, u = PAIR_SETS[name]
    return BathParams(**bath), NonlinearEmitterSpec(base=EmitterSpec(**emitter), u=u)


@check("two_excitation_duality")
def check_two_excitation_duality(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """Mirage frequency-route D(t) against the two-excitation lattice."""
    n_b, t_max = (20, 8.0) if quick else (60, 50.0)
    names = ["weak"] if quick else list(PAIR_SETS)
    t_grid = np.linspace(0.0, t_max, 81 if quick else 251)
    worst = 0.0
    for name in names:
        params, emitter = _pair_case(name)
        frequency = pair_emission_dynamics(params, emitter, emitter.u, t_grid, Sheet.SECOND)["D"]
        centred = emitter.model_copy(update={"base": emitter.base.model_copy(update={"cell": n_b // 2})})
        op = two_excitation_build(params, centred, n_b, Boundary.PBC, Sheet.FIRST)
        doubly = op.basis[0]
        lattice = evolve_state(op, op.basis_state(doubly), t_grid, observe=[doubly])[label_key(doubly)]
        worst = max(worst, float(np.max(np.abs(frequency - (-1j) * lattice))))
    return worst < PAIR_TOLERANCE, f"max |D frequency - D lattice| = {worst:.3g} ({', '.join(names)})"


@check("g2_sanity")
def check_g2_sanity(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """g2(0) = 1 without Kerr, antibunching with it, and continuity at zero delay."""
    params, emitter = _pair_case("weak")
    linear = g2_series(params, emitter.model_copy(update={"u": 0.0}), [0.0, 1.0])
    strengths = [0.05, 0.2, 0.5] if quick else list(np.linspace(0.05, 0.5, 10))
    zero_delay, jump = [], 0.0
    for u in strengths:
        values = g2_series(params, emitter.model_copy(update={"u": float(u)}), [0.0, 1e-8])
        zero_delay.append(float(values[0]))
        jump = max(jump, abs(float(values[1] - values[0])))
    passed = bool(np.all(linear == 1.0)) and max(zero_delay) < 1.0 and jump < G2_LIMIT_TOLERANCE
    return passed, f"max g2(0) over U = {max(zero_delay):.4g}, zero-delay jump {jump:.3g}"


def _bulk(values: np.ndarray, params: BathParams) -> np.ndarray:
    """Drop edge modes near the centre of the line gap."""
    mirage = mirage_map(params)
    width = abs(mirage.j1_tilde - params.j2) / 2
    centred = values + 0.5j * params.gamma_b
    return values[np.abs(centred.real) >= width]


@check("spectral_duality")
def check_spectral_duality(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """Mirage eigenvalues reproduce the open-chain physical spectrum."""
    n_b = 60
    worst_open, worst_bulk, passed = 0.0, 0.0, True
    for j1 in (0.7, 1.1):
        params = BathParams(j1=j1, j2=1.0, gamma_b=0.1)
        physical = finite_spectrum(build_heff(params, [], n_b, Boundary.OBC, Sheet.FIRST))
        mirage_open = finite_spectrum(build_heff(params, [], n_b, Boundary.OBC, Sheet.SECOND))
        mirage_ring = finite_spectrum(build_heff(params, [], n_b, Boundary.PBC, Sheet.SECOND))
        open_distance = spectral_hausdorff(physical, mirage_open)
        bulk_distance = spectral_hausdorff(_bulk(physical, params), _bulk(mirage_ring, params))
        bound = 2 * math.pi * min(mirage_map(params).j1_tilde, params.j2) / n_b
        passed = passed and open_distance < 1e-8 and bulk_distance <= bound
        worst_open = max(worst_open, open_distance)
        worst_bulk = max(worst_bulk, bulk_distance / bound)
    return passed, f"open chains {worst_open:.3g}; ring vs open bulk {worst_bulk:.3g} of the discretization bound"


@check("contraction")
def check_contraction(quick: bool, rng: np.random.Generator) -> Tuple[bool, str]:
    """Random dissipative lattices never amplify the state."""
    configurations = 20 if quick else 100
    t_grid = np.linspace(0.0, 20.0, 81)
    growth, peak = 0.0, 0.0
    for _ in range(configurations):
        n_b = int(rng.integers(8, 31))
        params = BathParams(j1=rng.uniform(0.2, 1.8), j2=1.0, gamma_b=rng.uniform(0.0, 0.5))
        emitters = [
            EmitterSpec(
                sublattice=Sublattice.A if rng.random() < 0.5 else Sublattice.B,
                cell=int(rng.integers(0, n_b)),
                delta=rng.uniform(-0.5, 0.5),
                gamma_a=rng.uniform(0.0, 0.3),
                omega_rabi=rng.uniform(0.0, 0.5),
            )
            for _ in range(int(rng.integers(1, 4)))
        ]
        boundary = Boundary.PBC if rng.random() < 0.5 else Boundary.OBC
        op = build_heff(params, emitters, n_b, boundary, Sheet.FIRST)
        series = evolve_state(op, op.basis_state(emitter_label(0)), t_grid)
        growth = max(growth, float(np.max(np.diff(series["norm"]))))
        peak = max(peak, max(float(np.max(np.abs(series[label_key(emitter_label(m))]))) for m in range(len(emitters))))
    return growth <= 1e-9 and peak <= 1 + 1e-8, (
        f"{configurations} configurations, largest norm increase {growth:.3g}, max |G| {peak:.12g}"
    )


def run_validation(quick: bool = True, only: Optional[Sequence[str]] = None, seed: int = 0) -> ValidationReport:
    """
    Run the registered checks in order.

    Args:
        quick: Reduced lattice sizes and time windows
        only: Names of the checks to run (default: all)
        seed: Seed of the random sampling checks

    Returns:
        ValidationReport; a check that raises is reported as failed with the error
    """
    names = list(CHECKS) if not only else list(only)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ValueError(f"Unknown checks: {', '.join(unknown)}")
    report = ValidationReport(quick=quick)
    for name in names:
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            passed, detail = CHECKS[name](quick, rng)
            result = CheckResult(name, bool(passed), detail, 0.0)
        except Skipped as e:
            result = CheckResult(name, True, str(e), 0.0, skipped=True)
        except SSHBathError as e:
            result = CheckResult(name, False, f"{type(e).__name__}: {e.message}", 0.0)
        result.elapsed = time.perf_counter() - start
        logger.info(f"{name}: {'pass' if result.passed else 'FAIL'} ({result.elapsed:.1f}s) {result.detail}")
        report.checks.append(result)
    return report
