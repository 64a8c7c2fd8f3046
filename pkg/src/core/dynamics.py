"""
Real-time emitter dynamics from the Fourier transform of the emitter Green matrix.

The transform runs along the horizontal line Im(omega) = eta above every pole and
branch set of the chosen sheet. The first MOMENT_ORDER terms of the resolvent
expansion sum_n M_n / (omega - c)^(n + 1) are subtracted on the line and added back
in closed form, so the sampled remainder decays fast enough for a plain
trapezoid sum.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq, curve_fit
from scipy.signal import find_peaks

from api.models import BathParams, ContourSpec, EmitterSpec, Sheet, Sublattice, TimeSeries
from config.settings import settings
from core.bath_model import ComplexFreq, FreqLike, as_complex, require_mirage
from core.lattice_oracle import bath_moments, emitter_label, emitter_moments, label_key
from core.self_energy import bath_green
from misc.errors import (
    AliasingDetected,
    ConfigError,
    ContourTooLow,
    DimensionTooLarge,
    NoOscillationDetected,
    SingularMatrix,
)

MAX_DENSE_EMITTERS = 64
FREQUENCY_CHUNK = 8192
TIME_CHUNK = 32
MAX_LOG_ERROR = 700.0

Site = Tuple[Sublattice, int]
Resolvent = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GreenMatrix:
    omega: ComplexFreq
    sheet: Sheet
    matrix: np.ndarray


@dataclass(frozen=True)
class LineContour:
    """A resolved integration line: every field set, ready for sampling."""

    eta: float
    span: float
    n_omega: int
    center: complex

    @property
    def step(self) -> float:
        return 2 * self.span / self.n_omega

    def nodes(self) -> np.ndarray:
        return -self.span + self.step * np.arange(self.n_omega) + 1j * self.eta


def _check_emitters(emitters: Sequence[EmitterSpec]) -> None:
    if not emitters:
        raise ConfigError("At least one emitter is required")
    if len(emitters) > MAX_DENSE_EMITTERS:
        raise DimensionTooLarge(
            f"{len(emitters)} emitters exceed the dense limit {MAX_DENSE_EMITTERS}; use the lattice oracle",
            n_emitters=len(emitters),
        )


def _emitter_site(emitter: EmitterSpec) -> Site:
    return (emitter.sublattice, emitter.cell)


def self_energy_matrix(
    params: BathParams,
    emitters: Sequence[EmitterSpec],
    omega: np.ndarray,
    sheet: Sheet,
    check: bool = True,
) -> np.ndarray:
    """
    Sigma_mn(omega) = Omega_m Omega_n G_b(x_m, x_n; omega), shaped omega.shape + (N, N).

    Elements with the same sublattices and cell offset share one evaluation.
    """
    omega = np.asarray(omega, dtype=complex)
    size = len(emitters)
    sigma = np.zeros(omega.shape + (size, size), dtype=complex)
    cache: Dict[Tuple[Sublattice, Sublattice, int], np.ndarray] = {}
    for m, row in enumerate(emitters):
        for n, col in enumerate(emitters):
            key = (row.sublattice, col.sublattice, row.cell - col.cell)
            if key not in cache:
                cache[key] = bath_green(
                    params, omega, _emitter_site(row), _emitter_site(col), sheet, check=check
                )
            sigma[..., m, n] = row.omega_rabi * col.omega_rabi * cache[key]
    return sigma


def green_matrix(
    params: BathParams, emitters: Sequence[EmitterSpec], omega: FreqLike, sheet: Sheet
) -> GreenMatrix:
    """
    Emitter Green matrix (omega - diag(delta') - Sigma(omega))^-1.

    Args:
        params: Bath parameters
        emitters: Emitters sharing the bath (at most 64)
        omega: Complex frequency off the branch set of the sheet
        sheet: Physical (first) or mirage (second) sheet

    Returns:
        GreenMatrix

    Raises:
        SingularMatrix: If omega is a pole of the Green matrix
        OnBranchLoop: If omega touches the branch set
    """
    _check_emitters(emitters)
    omega = as_complex(omega)
    if Sheet(sheet) == Sheet.SECOND:
        require_mirage(params)
    sigma = self_energy_matrix(params, emitters, np.asarray(omega), sheet)
    kernel = omega * np.eye(len(emitters)) - np.diag([e.delta_prime for e in emitters]) - sigma
    if np.linalg.cond(kernel) > 1e14:
        raise SingularMatrix(f"omega={omega} is a pole of the Green matrix", omega=omega)
    return GreenMatrix(ComplexFreq(omega, Sheet(sheet)), Sheet(sheet), np.linalg.inv(kernel))


def singularity_top(params: BathParams, emitters: Sequence[EmitterSpec], sheet: Sheet) -> float:
    """
    Upper bound on Im of the poles and branch set of the emitter Green matrix.

    The first sheet is bounded by 0. On the second sheet the bound is
    -min(gamma_a, gamma_b)/2, raised to the imaginary parts of the Markov pole
    estimates when several emitters couple through non-uniform gauge factors.
    """
    if Sheet(sheet) == Sheet.FIRST:
        return 0.0
    gammas = [params.gamma_b] + [e.gamma_a for e in emitters]
    top = -min(gammas) / 2
    if len(emitters) > 1:
        probe = np.asarray(np.mean([e.delta for e in emitters]) + 1j * (top + settings.CONTOUR_MARGIN))
        with np.errstate(all="ignore"):
            sigma = self_energy_matrix(params, emitters, probe, sheet, check=False)
        if np.all(np.isfinite(sigma)):
            markov = np.diag([e.delta_prime for e in emitters]) + sigma
            top = max(top, float(np.max(np.linalg.eigvals(markov).imag)))
    return top


def _frequency_scale(params: BathParams, emitters: Sequence[EmitterSpec]) -> float:
    detuning = max((abs(e.delta) for e in emitters), default=0.0)
    return params.j1 + params.j2 + params.gamma_b + detuning


def resolve_contour(
    contour: Optional[ContourSpec],
    top: float,
    scale: float,
    center: complex,
    t_max: float,
) -> LineContour:
    """
    Fill unset contour fields and check the line against the singularity bound.

    A default eta is lowered toward the bound when exp(eta t_max) would lift
    the rounding error of the samples above CONTOUR_CHECK_TOLERANCE.

    Raises:
        ContourTooLow: If eta does not clear the topmost singularity
        AliasingDetected: If the sample step cannot resolve t_max, or the
            rounding error at t_max exceeds the tolerance
    """
    contour = contour or ContourSpec()
    tolerance = settings.CONTOUR_CHECK_TOLERANCE
    eta = contour.eta if contour.eta is not None else top + settings.CONTOUR_MARGIN
    if eta <= top:
        raise ContourTooLow(f"eta={eta} does not clear the singularity bound {top}", eta=eta, top=top)
    line = LineContour(
        eta=eta,
        span=contour.span or settings.CONTOUR_SPAN_FACTOR * scale,
        n_omega=contour.n_omega or settings.CONTOUR_POINTS,
        center=center,
    )
    if t_max >= math.pi / line.step:
        raise AliasingDetected(
            f"t_max={t_max} exceeds the resolvable window {math.pi / line.step:.4g}",
            t_max=t_max,
            step=line.step,
        )
    if contour.eta is None and rounding_error(line, top, t_max) > tolerance:
        # aim below the tolerance so the root bracket cannot land above it
        line = replace(line, eta=_lowered_eta(line, top, t_max, tolerance / 2))
        logger.debug(f"Lowered eta to {line.eta:.4g} for t_max={t_max:.4g}")
    check_rounding(line, top, t_max)
    logger.debug(f"Contour eta={line.eta:.4g} span={line.span:.4g} n={line.n_omega}")
    return line


def rounding_error(line: LineContour, top: float, t_max: float) -> float:
    """
    Estimated absolute rounding error of the line transform at t_max.

    Samples are bounded by 1 / (eta - top) and their rounding error is
    amplified by exp(eta t) against a result that grows at most like
    exp(max(top, 0) t).
    """
    gap = line.eta - top
    log_error = (line.eta - max(top, 0.0)) * t_max
    log_error += math.log(np.finfo(float).eps * line.span / (math.pi * gap))
    return math.exp(min(log_error, MAX_LOG_ERROR))


def check_rounding(line: LineContour, top: float, t_max: float) -> None:
    """
    Raises:
        AliasingDetected: If the rounding error at t_max exceeds CONTOUR_CHECK_TOLERANCE
    """
    error = rounding_error(line, top, t_max)
    if error > settings.CONTOUR_CHECK_TOLERANCE:
        raise AliasingDetected(
            f"Rounding error {error:.3g} at t_max={t_max} exceeds {settings.CONTOUR_CHECK_TOLERANCE:.3g}"
            f" with eta={line.eta:.4g}; shorten t_max or lower eta",
            t_max=t_max,
            eta=line.eta,
            error=error,
        )


def _lowered_eta(line: LineContour, top: float, t_max: float, tolerance: float) -> float:
    """Highest eta below line.eta whose rounding error meets the tolerance."""
    # the periodic image at t + 2 pi / step is damped by exp(-(eta - top) 2 pi / step)
    floor = top + max(line.step * math.log(1 / tolerance) / (2 * math.pi), 1 / t_max)

    def excess(eta: float) -> float:
        return math.log(rounding_error(replace(line, eta=eta), top, t_max) / tolerance)

    if floor >= line.eta:
        return line.eta
    if excess(floor) > 0:
        return floor
    return brentq(excess, floor, line.eta)


def expansion_center(params: BathParams, emitters: Sequence[EmitterSpec]) -> complex:
    """Expansion point c of the subtracted moments, well below the contour."""
    real = float(np.mean([e.delta for e in emitters])) if emitters else 0.0
    depth = params.j2 + params.gamma_b + max((e.gamma_a for e in emitters), default=0.0)
    return complex(real, -depth)


def contour_transform(
    resolvent: Resolvent,
    moments: np.ndarray,
    line: LineContour,
    t_grid: np.ndarray,
) -> np.ndarray:
    """
    int d omega / 2 pi exp(-i omega t) F(omega) along the line, for t >= 0.

    Args:
        resolvent: Maps an array of n frequencies to an (n, k) array of F values
        moments: (order, k) resolvent moments of F about line.center
        line: Resolved contour
        t_grid: Output times

    Returns:
        (len(t_grid), k) complex array
    """
    nodes = line.nodes()
    samples = np.concatenate(
        [resolvent(nodes[start : start + FREQUENCY_CHUNK]) for start in range(0, nodes.size, FREQUENCY_CHUNK)]
    )
    return transform_samples(samples, moments, line, t_grid)


def transform_samples(
    samples: np.ndarray, moments: np.ndarray, line: LineContour, t_grid: np.ndarray
) -> np.ndarray:
    """Line transform of F given its (n_omega, k) samples on line.nodes()."""
    t_grid = np.asarray(t_grid, dtype=float)
    nodes = line.nodes()
    shift = nodes - line.center
    remainder = np.array(samples, dtype=complex)
    power = 1 / shift
    for moment in moments:
        remainder = remainder - moment[None, :] * power[:, None]
        power = power / shift

    x = nodes.real
    result = np.empty((t_grid.size, remainder.shape[1]), dtype=complex)
    for start in range(0, t_grid.size, TIME_CHUNK):
        times = t_grid[start : start + TIME_CHUNK]
        result[start : start + TIME_CHUNK] = np.exp(-1j * np.outer(times, x)) @ remainder
    result *= (line.step / (2 * math.pi)) * np.exp(line.eta * t_grid)[:, None]

    # exact transforms of moment / (omega - c)^(n + 1)
    decay = np.exp(-1j * line.center * t_grid)
    for n, moment in enumerate(moments):
        term = -1j * (-1j * t_grid) ** n / math.factorial(n) * decay
        result += term[:, None] * moment[None, :]
    return result


def _self_checked(
    transform: Callable[[LineContour], np.ndarray], line: LineContour, enabled: bool
) -> np.ndarray:
    values = transform(line)
    if not enabled:
        return values
    for probe in (
        replace(line, n_omega=2 * line.n_omega),
        replace(line, span=2 * line.span, n_omega=2 * line.n_omega),
    ):
        drift = float(np.max(np.abs(transform(probe) - values)))
        logger.debug(f"Contour self-check span={probe.span:.4g} n={probe.n_omega}: drift {drift:.3g}")
        if drift > settings.CONTOUR_CHECK_TOLERANCE:
            raise AliasingDetected(
                f"Refining the contour changed the result by {drift:.3g}", drift=drift
            )
    return values


def evolve_emitters(
    params: BathParams,
    emitters: Sequence[EmitterSpec],
    t_grid: np.ndarray,
    sheet: Sheet,
    contour: Optional[ContourSpec] = None,
    initial: int = 0,
) -> TimeSeries:
    """
    Emitter amplitudes <0| a_m(t) a_initial^dag |0> = i G_{m, initial}(t).

    Args:
        params: Bath parameters
        emitters: Emitters sharing the bath (at most 64)
        t_grid: Output times, t >= 0, strictly increasing
        sheet: Sheet whose Green matrix is transformed
        contour: Line contour; unset fields get defaults from the bath and sheet
        initial: Index of the initially excited emitter

    Returns:
        TimeSeries keyed a0, a1, ... with complex amplitudes

    Raises:
        ContourTooLow: If the requested eta does not clear the singularities
        AliasingDetected: If the contour cannot resolve t_grid or fails its self-check
    """
    _check_emitters(emitters)
    if not 0 <= initial < len(emitters):
        raise ConfigError(f"initial={initial} is not an emitter index")
    if Sheet(sheet) == Sheet.SECOND:
        require_mirage(params)
    t_grid = np.asarray(t_grid, dtype=float)
    center = expansion_center(params, emitters)
    line = resolve_contour(
        contour,
        singularity_top(params, emitters, sheet),
        _frequency_scale(params, emitters),
        center,
        float(t_grid[-1]),
    )
    moments = emitter_moments(params, emitters, initial, sheet, center, settings.MOMENT_ORDER)
    deltas = np.array([e.delta_prime for e in emitters])
    source = np.zeros(len(emitters), dtype=complex)
    source[initial] = 1.0

    def resolvent(omega: np.ndarray) -> np.ndarray:
        sigma = self_energy_matrix(params, emitters, omega, sheet)
        kernel = omega[:, None, None] * np.eye(len(emitters)) - np.diag(deltas) - sigma
        rhs = np.broadcast_to(source, omega.shape + source.shape)[..., None]
        return np.linalg.solve(kernel, rhs)[..., 0]

    values = _self_checked(
        lambda probe: contour_transform(resolvent, moments, probe, t_grid),
        line,
        bool(contour and contour.self_check),
    )
    amplitudes = 1j * values
    series = {label_key(emitter_label(m)): amplitudes[:, m] for m in range(len(emitters))}
    return TimeSeries(t_grid, series)


def bath_correlation_series(
    params: BathParams,
    t_grid: np.ndarray,
    site: Site,
    site2: Site,
    sheet: Sheet,
    contour: Optional[ContourSpec] = None,
) -> TimeSeries:
    """Bath propagator G_b(site, site2; t) on a time grid, under the key "C"."""
    if Sheet(sheet) == Sheet.SECOND:
        require_mirage(params)
    t_grid = np.asarray(t_grid, dtype=float)
    site, site2 = (Sublattice(site[0]), int(site[1])), (Sublattice(site2[0]), int(site2[1]))
    top = 0.0 if Sheet(sheet) == Sheet.FIRST else -params.gamma_b / 2
    center = expansion_center(params, [])
    line = resolve_contour(contour, top, _frequency_scale(params, []), center, float(t_grid[-1]))
    moments = bath_moments(params, site, site2, sheet, center, settings.MOMENT_ORDER)[:, None]

    def resolvent(omega: np.ndarray) -> np.ndarray:
        return bath_green(params, omega, site, site2, sheet)[:, None]

    values = _self_checked(
        lambda probe: contour_transform(resolvent, moments, probe, t_grid),
        line,
        bool(contour and contour.self_check),
    )
    return TimeSeries(t_grid, {"C": values[:, 0]})


def bath_correlation(
    params: BathParams,
    t: float,
    site: Site,
    site2: Site,
    sheet: Sheet,
    contour: Optional[ContourSpec] = None,
) -> complex:
    """
    Bath correlation C(t) = -i <0| b_site(t) b_site2^dag |0> for t >= 0.

    Both sheets give the same value; C(0) = -i for equal sites and 0 otherwise.

    Raises:
        ConfigError: If t < 0
    """
    if t < 0:
        raise ConfigError(f"t must be non-negative (got {t})")
    series = bath_correlation_series(params, np.array([float(t)]), site, site2, sheet, contour)
    return complex(series["C"][0])


def renormalized_population(series: TimeSeries, label: str, gamma_b: float) -> np.ndarray:
    """exp(gamma_b t) |value|^2, which removes the uniform bath loss."""
    return np.exp(gamma_b * series.times) * np.abs(series[label]) ** 2


def _refine_peak(times: np.ndarray, signal: np.ndarray, index: int) -> float:
    if index == 0 or index == signal.size - 1:
        return float(times[index])
    left, mid, right = signal[index - 1 : index + 2]
    curvature = left - 2 * mid + right
    if curvature == 0:
        return float(times[index])
    offset = 0.5 * (left - right) / curvature
    return float(times[index] + offset * (times[index + 1] - times[index]))


def rabi_frequency_estimate(
    series: TimeSeries, observable: str, gamma_b: float = 0.0, noise_floor: float = 0.05
) -> float:
    """
    Dominant angular frequency from the peak spacing of exp(gamma_b t)|value|^2.

    Peaks must rise above noise_floor times the signal maximum in prominence.

    Raises:
        NoOscillationDetected: If fewer than two peaks qualify
    """
    signal = renormalized_population(series, observable, gamma_b)
    peaks, _ = find_peaks(signal, prominence=noise_floor * float(np.max(signal)))
    if peaks.size < 2:
        raise NoOscillationDetected(
            f"Found {peaks.size} peak(s) in '{observable}', need two", peaks=int(peaks.size)
        )
    positions = np.array([_refine_peak(series.times, signal, int(p)) for p in peaks])
    period = float(np.mean(np.diff(positions)))
    return 2 * math.pi / period


def rabi_frequency_fit(
    series: TimeSeries, observable: str, gamma_b: float = 0.0, start: float = 0.0
) -> float:
    """
    Angular frequency of a damped cosine fitted to exp(gamma_b t)|value|^2 for t >= start.

    The fit is seeded with the peak-spacing estimate and uses every sample of
    the window, so a handful of periods is enough.

    Raises:
        NoOscillationDetected: If fewer than two peaks qualify or the fit fails
    """
    seed = rabi_frequency_estimate(series, observable, gamma_b)
    kept = series.times >= start
    times = series.times[kept]
    signal = renormalized_population(series, observable, gamma_b)[kept]
    origin = float(times[0])

    def model(t, offset, cosine, sine, decay, frequency):
        envelope = np.exp(-decay * (t - origin))
        return offset + envelope * (cosine * np.cos(frequency * (t - origin)) + sine * np.sin(frequency * (t - origin)))

    guess = [float(np.mean(signal)), float(np.ptp(signal)) / 2, 0.0, 0.0, seed]
    try:
        fitted, _ = curve_fit(model, times, signal, p0=guess, maxfev=20000)
    except RuntimeError as e:
        raise NoOscillationDetected(f"Damped cosine fit of '{observable}' failed: {e}") from e
    frequency = abs(float(fitted[4]))
    logger.debug(f"Fitted frequency {frequency:.5g} from seed {seed:.5g}")
    return frequency
