"""
Two-excitation observables of a weakly driven Kerr emitter.

The pair function Pi(omega) = i int d omega'/2pi G(omega') G(omega - omega') is a
frequency convolution of the single-emitter Green function. Its free part
P(omega') P(omega - omega'), P = 1/(omega' - delta'), is subtracted and added back
in closed form; the remaining integrand falls off as -2 Omega^2 / omega'^4, whose
tail beyond the quadrature window is added analytically.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger
from scipy.integrate import quad
from scipy.signal import fftconvolve

from api.models import BathParams, Boundary, EmitterSpec, NonlinearEmitterSpec, Sheet, TimeSeries
from config.settings import settings
from core.bath_model import ComplexFreq, FreqLike, as_complex, require_mirage
from core.dynamics import LineContour, check_rounding, singularity_top, transform_samples
from core.lattice_oracle import eigenmode_near, pair_moments, two_excitation_build
from core.self_energy import onsite_self_energy
from misc.errors import AliasingDetected, ContourPinched, PiZero, SingularMatrix

AnyEmitter = Union[EmitterSpec, NonlinearEmitterSpec]

PI_FLOOR = 1e-14
CONSISTENCY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PairFunctionValue:
    omega: ComplexFreq
    pi: complex


def _split(emitter: AnyEmitter) -> tuple:
    if isinstance(emitter, NonlinearEmitterSpec):
        return emitter.base, emitter.u
    return emitter, 0.0


def _single_green(params: BathParams, base: EmitterSpec, omega: np.ndarray, sheet: Sheet) -> np.ndarray:
    sigma = onsite_self_energy(params, base.omega_rabi, omega, sheet)
    return 1 / (omega - base.delta_prime - sigma)


def _pair_span(params: BathParams, base: EmitterSpec, u: float) -> float:
    scale = params.j1 + params.j2 + params.gamma_b + abs(base.delta) + abs(u)
    return settings.PAIR_SPAN_FACTOR * scale


def _tail_weight(half_width: float, tau: float = 0.0) -> float:
    """2 int_W^inf cos(u tau) / u^4 du."""
    if tau == 0:
        return 2 / (3 * half_width**3)
    if half_width * tau < 0.1:
        # series in W tau, truncation error O((W tau)^3 tau^3)
        return 2 * (
            1 / (3 * half_width**3)
            - tau**2 / (2 * half_width)
            + math.pi * tau**3 / 12
            - half_width * tau**4 / 24
        )
    value, _ = quad(lambda u: u**-4, half_width, np.inf, weight="cos", wvar=tau)
    return 2 * value


def _symmetric_offsets(half_width: float, n: int) -> tuple:
    """Trapezoid nodes u_k = -W + k h, k = 0..n, and their weights."""
    step = 2 * half_width / n
    offsets = -half_width + step * np.arange(n + 1)
    weights = np.full(n + 1, step)
    weights[[0, -1]] = step / 2
    return offsets, weights


def _check_mirage(params: BathParams, sheet: Sheet) -> None:
    if Sheet(sheet) == Sheet.SECOND:
        require_mirage(params)


def pi_function(
    params: BathParams, emitter: AnyEmitter, omega: FreqLike, sheet: Sheet = Sheet.SECOND
) -> PairFunctionValue:
    """
    Pair function Pi(omega) of the emitter on a sheet.

    The convolution runs along Im(omega') = Im(omega)/2, centred on Re(omega)/2
    so the grid is symmetric under omega' -> omega - omega'.

    Args:
        params: Bath parameters
        emitter: Emitter (the Kerr strength is not used)
        omega: Two-particle frequency
        sheet: Sheet of the single-particle Green function (mirage by default)

    Returns:
        PairFunctionValue

    Raises:
        ContourPinched: If Im(omega)/2 does not separate the two singularity sets
    """
    base, u = _split(emitter)
    _check_mirage(params, sheet)
    omega = as_complex(omega)
    top = singularity_top(params, [base], sheet)
    level = omega.imag / 2
    if level <= top:
        raise ContourPinched(
            f"Im(omega)/2={level} does not clear the singularity bound {top}", omega=omega, top=top
        )
    half_width = _pair_span(params, base, u)
    offsets, weights = _symmetric_offsets(half_width, settings.PAIR_POINTS)
    first = omega.real / 2 + offsets + 1j * level
    second = omega - first
    delta = base.delta_prime
    integrand = _single_green(params, base, first, sheet) * _single_green(
        params, base, second, sheet
    ) - 1 / ((first - delta) * (second - delta))
    value = 1j * np.sum(weights * integrand) / (2 * math.pi)
    value += 1 / (omega - 2 * delta)
    value += -1j * base.omega_rabi**2 * _tail_weight(half_width) / math.pi
    return PairFunctionValue(ComplexFreq(omega, Sheet(sheet)), complex(value))


def two_particle_green(
    params: BathParams, emitter: AnyEmitter, omega: FreqLike, u: float, sheet: Sheet = Sheet.SECOND
) -> complex:
    """
    D(omega) = (Pi^-1 - U)^-1.

    Raises:
        PiZero: If Pi vanishes at omega
        SingularMatrix: If omega is a pole of D
    """
    pi = pi_function(params, emitter, omega, sheet).pi
    if abs(pi) < PI_FLOOR:
        raise PiZero(f"Pi({omega}) vanishes", omega=as_complex(omega))
    denominator = 1 - u * pi
    if denominator == 0:
        raise SingularMatrix(f"omega={omega} is a pole of D", omega=as_complex(omega))
    return complex(pi / denominator)


def bound_pair_energy(
    params: BathParams,
    emitter: NonlinearEmitterSpec,
    sheet: Sheet = Sheet.SECOND,
    seed: Optional[complex] = None,
    n_b: int = 30,
) -> ComplexFreq:
    """
    Pole of D nearest seed, i.e. the two-excitation eigenvalue with Pi^-1 = U.

    The eigenvalue is taken from the two-excitation lattice operator by
    shift-and-invert (default seed 2 delta' + U, nudged off the bare value).
    """
    _check_mirage(params, sheet)
    if seed is None:
        seed = 2 * emitter.base.delta_prime + emitter.u + 1e-3 * params.j2
    centred = emitter.model_copy(update={"base": emitter.base.model_copy(update={"cell": n_b // 2})})
    op = two_excitation_build(params, centred, n_b, Boundary.PBC, sheet)
    value, _ = eigenmode_near(op, seed)
    return ComplexFreq(value.value, Sheet(sheet))


def _pair_line(params: BathParams, base: EmitterSpec, u: float, sheet: Sheet) -> tuple:
    top = singularity_top(params, [base], sheet)
    level = top + settings.PAIR_CONTOUR_OFFSET
    half_width = _pair_span(params, base, u)
    return level, half_width


def pair_function_on_line(
    params: BathParams, emitter: AnyEmitter, sheet: Sheet = Sheet.SECOND
) -> tuple:
    """
    Pi sampled on the line Im(omega) = 2 eta' by one FFT convolution.

    Returns:
        (LineContour of the samples, Pi samples)
    """
    base, u = _split(emitter)
    level, half_width = _pair_line(params, base, u, sheet)
    n = settings.PAIR_POINTS
    step = 2 * half_width / n
    nodes = -half_width + step * np.arange(n) + 1j * level
    green = _single_green(params, base, nodes, sheet)
    free = 1 / (nodes - base.delta_prime)
    dressed = green - free
    convolution = fftconvolve(dressed, dressed + 2 * free)

    # sums X = -2W + s h; keep |X| <= W/2
    kept = slice(3 * n // 4, 5 * n // 4)
    line = LineContour(eta=2 * level, span=half_width / 2, n_omega=n // 2, center=0j)
    omega = line.nodes()
    reach = half_width - np.abs(omega.real) / 2
    pi = 1j * step * convolution[kept] / (2 * math.pi)
    pi += 1 / (omega - 2 * base.delta_prime)
    pi += -2j * base.omega_rabi**2 / (3 * math.pi * reach**3)
    return line, pi


def pair_emission_dynamics(
    params: BathParams,
    emitter: AnyEmitter,
    u: float,
    t_grid: np.ndarray,
    sheet: Sheet = Sheet.SECOND,
) -> TimeSeries:
    """
    Two-particle Green function D(t) = -i <ee(t)|ee> of an emitter prepared with two excitations.

    D(0) = -i; at U = 0, D(t) = i G(t)^2.

    Args:
        params: Bath parameters
        emitter: Emitter (its own Kerr strength is replaced by u)
        u: Kerr strength
        t_grid: Output times, t >= 0, strictly increasing
        sheet: Sheet of the single-particle Green function (mirage by default)

    Returns:
        TimeSeries with the key "D"

    Raises:
        AliasingDetected: If the pair grid cannot resolve t_grid
    """
    base, _ = _split(emitter)
    _check_mirage(params, sheet)
    nonlinear = NonlinearEmitterSpec(base=base, u=u)
    t_grid = np.asarray(t_grid, dtype=float)
    line, pi = pair_function_on_line(params, nonlinear, sheet)
    if t_grid[-1] >= math.pi / line.step:
        raise AliasingDetected(
            f"t_max={t_grid[-1]} exceeds the resolvable window {math.pi / line.step:.4g}",
            t_max=float(t_grid[-1]),
        )
    center = complex(2 * base.delta, -2 * (params.j2 + params.gamma_b + base.gamma_a))
    line = LineContour(line.eta, line.span, line.n_omega, center)
    check_rounding(line, 2 * singularity_top(params, [base], sheet), float(t_grid[-1]))
    pair = pi / (1 - u * pi)
    moments = pair_moments(params, nonlinear, sheet, center, settings.MOMENT_ORDER)
    values = transform_samples(pair[:, None], moments[:, None], line, t_grid)
    logger.debug(f"Pair emission on {Sheet(sheet).value} sheet: eta={line.eta:.4g}, n={line.n_omega}")
    return TimeSeries(t_grid, {"D": values[:, 0]})


def delayed_pair_function(
    params: BathParams,
    emitter: NonlinearEmitterSpec,
    taus: Sequence[float],
    sheet: Sheet = Sheet.SECOND,
) -> np.ndarray:
    """
    Pi_bar(tau) = i int d omega'/2pi G(omega_d + omega') G(omega_d - omega') exp(-i omega' tau).

    Pi_bar(0) equals Pi(2 omega_d).

    Raises:
        ContourPinched: If the real axis does not clear the singularities of G
    """
    base = emitter.base
    _check_mirage(params, sheet)
    top = singularity_top(params, [base], sheet)
    if top >= 0:
        raise ContourPinched(
            "The real axis touches the singularities of G; use the mirage sheet", top=top
        )
    taus = np.asarray(taus, dtype=float)
    half_width = _pair_span(params, base, emitter.u)
    offsets, weights = _symmetric_offsets(half_width, settings.PAIR_POINTS)
    drive = emitter.drive_omega
    delta = base.delta_prime
    first, second = drive + offsets, drive - offsets
    integrand = _single_green(params, base, first + 0j, sheet) * _single_green(
        params, base, second + 0j, sheet
    ) - 1 / ((first - delta) * (second - delta))

    free = np.exp(1j * (drive - delta) * taus) / (2 * drive - 2 * delta)
    phases = np.exp(-1j * np.outer(taus, offsets))
    tail = np.array([_tail_weight(half_width, float(tau)) for tau in taus])
    return 1j * (phases @ (weights * integrand)) / (2 * math.pi) + free - 1j * base.omega_rabi**2 * tail / math.pi


def g2_series(
    params: BathParams,
    emitter: NonlinearEmitterSpec,
    taus: Sequence[float],
    sheet: Sheet = Sheet.SECOND,
) -> np.ndarray:
    """
    Steady-state g2(tau) of the weakly driven emitter for several delays.

    g2(0) = 1/|1 - U Pi(2 omega_d)|^2 and g2(tau) = |1 + Pi_bar(tau) T|^2 with
    T = (U^-1 - Pi(2 omega_d))^-1. The drive amplitude drops out.
    """
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0):
        raise ValueError("tau must be non-negative")
    u = emitter.u
    if u == 0:
        return np.ones(taus.size)
    pi = pi_function(params, emitter, 2 * emitter.drive_omega, sheet).pi
    zero_delay = 1 / abs(1 - u * pi) ** 2
    scattering = u / (1 - u * pi)

    delayed = delayed_pair_function(params, emitter, np.concatenate(([0.0], taus)), sheet)
    limit = abs(1 + delayed[0] * scattering) ** 2
    if abs(limit - zero_delay) > CONSISTENCY_TOLERANCE * max(1.0, zero_delay):
        logger.warning(
            f"Zero-delay g2 mismatch: |1 + Pi_bar(0) T|^2={limit:.12g} vs 1/|1 - U Pi|^2={zero_delay:.12g}"
        )
    values = np.abs(1 + delayed[1:] * scattering) ** 2
    return np.where(taus == 0, zero_delay, values)


def g2(
    params: BathParams, emitter: NonlinearEmitterSpec, tau: float, sheet: Sheet = Sheet.SECOND
) -> float:
    """Steady-state second-order correlation at one delay, see g2_series."""
    return float(g2_series(params, emitter, [tau], sheet)[0])
