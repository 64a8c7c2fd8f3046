"""
Bound states of a single emitter: pole-equation roots and photonic profiles.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from loguru import logger
from scipy.ndimage import minimum_filter

from api.models import BathParams, Boundary, EmitterSpec, Sheet, Sublattice, SublatticePair
from config.settings import settings
from core.bath_model import ComplexFreq, loop_distance, pole_roots, require_mirage
from core.self_energy import (
    cross_self_energy,
    onsite_self_energy,
    residue_element,
    sheet_lattice,
)
from misc.errors import (
    ConfigError,
    NoConvergence,
    NotMidgap,
    OnBranchLoop,
    OnPhaseBoundary,
    RootOnSpectrum,
    WindowTooSmall,
)

MIN_WINDOW = 20
MAX_WINDOW = 2000
NOISE_FLOOR = 1e3


@dataclass(frozen=True)
class BoundState:
    """
    Right eigenvector of a bound state restricted to a window of cells.

    f_a[i] and f_b[i] are the photon amplitudes on (A, cells[i]) and (B, cells[i]).
    """

    omega_bs: ComplexFreq
    phi_a: complex
    cells: np.ndarray
    f_a: np.ndarray
    f_b: np.ndarray
    sheet: Sheet
    boundary: Boundary = Boundary.PBC

    @property
    def window(self) -> range:
        return range(int(self.cells[0]), int(self.cells[-1]) + 1)

    def amplitude(self, sublattice: Sublattice, cell: int) -> complex:
        """Photon amplitude on one site; 0 outside the window."""
        if cell not in self.window:
            return 0j
        profile = self.f_a if Sublattice(sublattice) == Sublattice.A else self.f_b
        return complex(profile[cell - self.window.start])

    def norm(self) -> float:
        return float(
            math.sqrt(abs(self.phi_a) ** 2 + np.sum(np.abs(self.f_a) ** 2) + np.sum(np.abs(self.f_b) ** 2))
        )


def _is_midgap(params: BathParams, emitter: EmitterSpec) -> bool:
    return emitter.delta == 0 and emitter.gamma_a == params.gamma_b


def _require_midgap(params: BathParams, emitter: EmitterSpec) -> None:
    if not _is_midgap(params, emitter):
        raise NotMidgap(
            f"delta'={emitter.delta_prime} is not -i gamma_b/2 = {-0.5j * params.gamma_b}",
            delta_prime=emitter.delta_prime,
        )


def pole_equation(params: BathParams, emitter: EmitterSpec, omega, sheet: Sheet) -> np.ndarray:
    """omega - delta' - Sigma_0(omega), vectorized, without branch checks."""
    omega = np.asarray(omega, dtype=complex)
    sigma = onsite_self_energy(params, emitter.omega_rabi, omega, sheet, check=False)
    return omega - emitter.delta_prime - sigma


def _on_branch(params: BathParams, omega: complex, sheet: Sheet) -> bool:
    coeffs, _ = sheet_lattice(params, sheet)
    return float(loop_distance(coeffs, omega)) < settings.BRANCH_TOLERANCE


def _newton(params: BathParams, emitter: EmitterSpec, seed: complex, sheet: Sheet) -> Optional[complex]:
    omega = complex(seed)
    step = settings.NEWTON_STEP * params.j2
    for iteration in range(settings.NEWTON_MAX_ITER):
        value = complex(pole_equation(params, emitter, omega, sheet))
        if not np.isfinite(value):
            return None
        if abs(value) < settings.ROOT_TOLERANCE:
            logger.debug(f"Newton converged to {omega} after {iteration} iterations")
            return omega
        probes = pole_equation(params, emitter, np.array([omega + step, omega - step]), sheet)
        derivative = complex(probes[0] - probes[1]) / (2 * step)
        if derivative == 0 or not np.isfinite(derivative):
            return None
        omega = omega - value / derivative
    return None


def _scan_half_width(params: BathParams, emitter: EmitterSpec) -> float:
    return max(2 * emitter.omega_rabi, 0.05 * params.j2)


def enumerate_bs_energies(
    params: BathParams,
    emitter: EmitterSpec,
    sheet: Sheet,
    half_width: Optional[float] = None,
) -> List[ComplexFreq]:
    """
    All pole-equation roots seeded from a complex grid scan around delta'.

    Args:
        params: Bath parameters
        emitter: Emitter parameters
        sheet: Sheet on which the self-energy is evaluated
        half_width: Half-width of the square scan region (default from the coupling)

    Returns:
        Distinct roots off the branch set, nearest to delta' first
    """
    if Sheet(sheet) == Sheet.SECOND:
        require_mirage(params)
    center = emitter.delta_prime
    half_width = half_width or _scan_half_width(params, emitter)
    axis = np.linspace(-half_width, half_width, settings.SCAN_POINTS)
    grid = center + axis[None, :] + 1j * axis[:, None]
    with np.errstate(all="ignore"):
        residual = np.abs(pole_equation(params, emitter, grid, sheet))
    residual = np.where(np.isfinite(residual), residual, np.inf)
    minima = (residual == minimum_filter(residual, size=3, mode="nearest")) & np.isfinite(residual)
    seeds = grid[minima][np.argsort(residual[minima])]

    roots: List[complex] = []
    for seed in seeds:
        root = _newton(params, emitter, seed, sheet)
        if root is None or _on_branch(params, root, sheet):
            continue
        if all(abs(root - known) > 1e-8 for known in roots):
            roots.append(root)
    roots.sort(key=lambda value: abs(value - center))
    logger.debug(f"Grid scan found {len(roots)} roots around {center}")
    return [ComplexFreq(root, Sheet(sheet)) for root in roots]


def bs_energy(params: BathParams, emitter: EmitterSpec, sheet: Sheet) -> ComplexFreq:
    """
    Bound-state energy from the pole equation omega = delta' + Sigma_0(omega).

    Args:
        params: Bath parameters
        emitter: Emitter parameters
        sheet: Sheet on which the self-energy is evaluated

    Returns:
        Root nearest delta'

    Raises:
        NoConvergence: If neither Newton nor the grid scan finds a root
        RootOnSpectrum: If the root lies on the branch set
        MirageUndefined: On the second sheet when j1 <= gamma_b / 2
    """
    sheet = Sheet(sheet)
    if sheet == Sheet.SECOND:
        require_mirage(params)
    if _is_midgap(params, emitter):
        omega = -0.5j * params.gamma_b
        if _on_branch(params, omega, sheet):
            raise RootOnSpectrum(f"Midgap root {omega} sits on the branch set", omega=omega)
        return ComplexFreq(omega, sheet)

    root = _newton(params, emitter, emitter.delta_prime, sheet)
    if root is None:
        logger.debug("Newton from delta' failed, falling back to the grid scan")
        found = enumerate_bs_energies(params, emitter, sheet)
        if not found:
            raise NoConvergence(
                f"No bound-state root near delta'={emitter.delta_prime}",
                delta_prime=emitter.delta_prime,
            )
        return found[0]
    if _on_branch(params, root, sheet):
        raise RootOnSpectrum(f"Root {root} sits on the branch set", omega=root)
    return ComplexFreq(root, sheet)


def default_window(decay: float) -> int:
    """Half-width (cells) over which a geometric profile with ratio `decay` falls by 1e-12."""
    if decay <= 0:
        return MIN_WINDOW
    if decay >= 1:
        return MAX_WINDOW
    return int(min(max(math.ceil(-12 / math.log10(decay)), MIN_WINDOW), MAX_WINDOW))


def _decay_ratio(params: BathParams, omega: complex, sheet: Sheet) -> float:
    coeffs, _ = sheet_lattice(params, sheet)
    z_plus, z_minus, _ = pole_roots(coeffs, omega)
    ratios = [min(abs(z), 1 / abs(z)) if z != 0 else 0.0 for z in (complex(z_plus), complex(z_minus))]
    return max(ratios)


def _tail_mass(profile: np.ndarray, floor: float) -> float:
    """
    Geometric extrapolation of the weight beyond both ends of a profile.

    Amplitudes at or below `floor` count as zero, so a sublattice that carries
    only rounding noise adds no tail.
    """
    tail = 0.0
    for last, before in ((profile[-1], profile[-2]), (profile[0], profile[1])):
        if abs(last) <= floor:
            continue
        ratio = abs(last) / abs(before) if abs(before) > floor else np.inf
        if ratio >= 1:
            return np.inf
        tail += abs(last) ** 2 * ratio**2 / (1 - ratio**2)
    return tail


def _normalized(
    omega: ComplexFreq,
    cells: np.ndarray,
    f_a: np.ndarray,
    f_b: np.ndarray,
    sheet: Sheet,
    boundary: Boundary = Boundary.PBC,
    check_tail: bool = True,
) -> BoundState:
    weight = 1.0 + np.sum(np.abs(f_a) ** 2) + np.sum(np.abs(f_b) ** 2)
    if check_tail:
        peak = max(1.0, float(np.max(np.abs(f_a))), float(np.max(np.abs(f_b))))
        floor = NOISE_FLOOR * np.finfo(float).eps * peak
        tail = (_tail_mass(f_a, floor) + _tail_mass(f_b, floor)) / weight
        if tail > settings.TAIL_TOLERANCE:
            raise WindowTooSmall(
                f"Truncated tail mass {tail:.3g} exceeds {settings.TAIL_TOLERANCE}",
                tail_mass=tail,
                window=int(len(cells)),
            )
    norm = math.sqrt(weight)
    return BoundState(
        omega_bs=omega,
        phi_a=complex(1 / norm),
        cells=cells,
        f_a=f_a / norm,
        f_b=f_b / norm,
        sheet=Sheet(sheet),
        boundary=boundary,
    )


def _source_factor(params: BathParams, emitter: EmitterSpec, sheet: Sheet) -> float:
    """xi of the emitter site in the gauge centred on the emitter cell."""
    _, r = sheet_lattice(params, sheet)
    if Sheet(sheet) == Sheet.SECOND and emitter.sublattice == Sublattice.B:
        return 1 / r
    return 1.0


def bs_wavefunction(
    params: BathParams,
    emitter: EmitterSpec,
    sheet: Sheet,
    window: Optional[int] = None,
) -> BoundState:
    """
    Bound-state profile f(x) = Omega * G(x, emitter; omega_BS) with phi_a = 1, then normalized.

    On the second sheet the profile is the right eigenvector of the mirage
    lattice with the xi-rescaled emitter coupling.

    Args:
        params: Bath parameters
        emitter: Emitter parameters
        sheet: Sheet on which the bound state is computed
        window: Half-width in cells around the emitter (default from the decay ratio)

    Returns:
        Normalized BoundState

    Raises:
        WindowTooSmall: If the truncated tail mass exceeds the tolerance
        RootOnSpectrum: If the profile does not decay
    """
    omega = bs_energy(params, emitter, sheet)
    decay = _decay_ratio(params, omega.value, sheet)
    if decay >= 1:
        raise RootOnSpectrum(f"Bound state at {omega.value} does not decay", omega=omega.value)
    half = window if window is not None else default_window(decay)
    cells = np.arange(emitter.cell - half, emitter.cell + half + 1)

    coeffs, _ = sheet_lattice(params, sheet)
    scale = emitter.omega_rabi * _source_factor(params, emitter, sheet)
    profiles = {}
    for sublattice in (Sublattice.A, Sublattice.B):
        profiles[sublattice] = scale * np.array(
            [
                complex(residue_element(coeffs, omega.value, sublattice, emitter.sublattice, int(j - emitter.cell)))
                for j in cells
            ]
        )
    return _normalized(omega, cells, profiles[Sublattice.A], profiles[Sublattice.B], sheet)


def _single_pole_profile(hop: float, j2: float, offsets: np.ndarray, towards_minus: bool) -> np.ndarray:
    """
    -(1/hop)(-j2/hop)^|n| on the decaying side when hop > j2, otherwise
    (1/hop)(-hop/j2)^|n| on the opposite side; `towards_minus` selects which
    side of the emitter the hop > j2 branch occupies.
    """
    profile = np.zeros(offsets.shape, dtype=complex)
    if abs(hop - j2) < settings.BOUNDARY_TOLERANCE * j2:
        raise OnPhaseBoundary(f"hopping {hop} equals j2, the profile does not decay", hopping=hop)
    if hop > j2:
        side = offsets <= 0 if towards_minus else offsets >= 0
        profile[side] = -(1 / hop) * (-j2 / hop) ** np.abs(offsets[side])
    else:
        side = offsets > 0 if towards_minus else offsets < 0
        profile[side] = (1 / hop) * (-hop / j2) ** np.abs(offsets[side])
    return profile


def bs_midgap_closed_form(
    params: BathParams,
    emitter: EmitterSpec,
    sheet: Sheet,
    window: Optional[int] = None,
) -> BoundState:
    """
    Midgap bound state (delta' = -i gamma_b/2) from the closed-form tables.

    An emitter on A dresses only B sites and vice versa; the profile is a single
    geometric series whose side is set by the hopping that carries it.

    Raises:
        NotMidgap: If delta' != -i gamma_b / 2
        OnPhaseBoundary: If the carrying hopping equals j2
    """
    _require_midgap(params, emitter)
    sheet = Sheet(sheet)
    if sheet == Sheet.SECOND:
        require_mirage(params)
    coeffs, _ = sheet_lattice(params, sheet)
    j2 = coeffs.j2
    if emitter.sublattice == Sublattice.A:
        hop, towards_minus = coeffs.a_plus, False
    else:
        hop, towards_minus = coeffs.a_minus, True
    decay = j2 / hop if hop > j2 else hop / j2
    half = window if window is not None else default_window(decay)
    cells = np.arange(emitter.cell - half, emitter.cell + half + 1)
    offsets = cells - emitter.cell

    scale = emitter.omega_rabi * _source_factor(params, emitter, sheet)
    profile = scale * _single_pole_profile(hop, j2, offsets, towards_minus)
    empty = np.zeros_like(profile)
    omega = ComplexFreq(-0.5j * params.gamma_b, sheet)
    if emitter.sublattice == Sublattice.A:
        return _normalized(omega, cells, empty, profile, sheet)
    return _normalized(omega, cells, profile, empty, sheet)


def obc_dark_state(params: BathParams, emitter: EmitterSpec, n_b: int = 20) -> BoundState:
    """
    Dark state at -i gamma_b/2 of the open chain with cells 0 .. n_b - 1.

    It is an exact eigenvector of the open-boundary effective Hamiltonian: the
    emitter on A dresses B sites to its right, the emitter on B dresses A sites
    to its left, whichever way the profile grows.

    Raises:
        NotMidgap: If delta' != -i gamma_b / 2
        ConfigError: If the emitter cell is outside the chain or j1 == gamma_b/2
    """
    _require_midgap(params, emitter)
    if not 0 <= emitter.cell < n_b:
        raise ConfigError(f"Emitter cell {emitter.cell} outside the chain of {n_b} cells")
    half = params.gamma_b / 2
    cells = np.arange(n_b)
    offsets = cells - emitter.cell
    profile = np.zeros(n_b, dtype=complex)
    if emitter.sublattice == Sublattice.A:
        hop, side = params.j1 + half, offsets >= 0
    else:
        hop, side = params.j1 - half, offsets <= 0
    if hop == 0:
        raise ConfigError("The dark state needs j1 != gamma_b/2")
    profile[side] = -(emitter.omega_rabi / hop) * (-params.j2 / hop) ** np.abs(offsets[side])
    empty = np.zeros_like(profile)
    omega = ComplexFreq(-0.5j * params.gamma_b, Sheet.FIRST)
    f_a, f_b = (empty, profile) if emitter.sublattice == Sublattice.A else (profile, empty)
    return _normalized(omega, cells, f_a, f_b, Sheet.FIRST, Boundary.OBC, check_tail=False)


def interaction_at_bound_state(
    params: BathParams,
    emitter: EmitterSpec,
    d: int,
    pair: SublatticePair,
    sheet: Sheet,
) -> complex:
    """Sigma_d evaluated at the root-found omega_BS of `emitter` (general delta')."""
    omega = bs_energy(params, emitter, sheet)
    try:
        return complex(cross_self_energy(params, emitter.omega_rabi, omega.value, d, pair, sheet))
    except OnBranchLoop as error:
        raise RootOnSpectrum(str(error), omega=omega.value) from error
