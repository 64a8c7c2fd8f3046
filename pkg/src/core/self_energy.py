"""
Self-energies of emitters coupled to the SSH bath, evaluated with the residue theorem.

Every bath Green-function element reduces to a contour integral over z = exp(ik)
of g(z) / (z * det), where g(z) = z^dj * N(z) is a short Laurent polynomial.
When g has only non-negative powers the poles inside |z| = radius are summed,
otherwise the poles outside. radius = 1 gives the physical (first) sheet; the
mirage (second) sheet is the same integrand on the mirage lattice, dressed with
the gauge factors xi(A, j) = r^-j and xi(B, j) = r^(-j-1).
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from api.models import BathParams, BathVariant, Region, Sheet, Sublattice, SublatticePair
from config.settings import settings
from core.bath_model import (
    BlochCoefficients,
    ComplexFreq,
    FreqLike,
    as_complex,
    band_energies,
    bloch_coefficients,
    k_grid,
    mirage_map,
    pole_roots,
    region_of,
)
from misc.errors import NearSpectrum, NotMidgap, OnBranchLoop, OnPhaseBoundary

Site = Tuple[Sublattice, int]
ArrayLike = Union[complex, np.ndarray]


@dataclass(frozen=True)
class PolePair:
    z_plus: complex
    z_minus: complex


@dataclass(frozen=True)
class SelfEnergyValue:
    value: complex
    region: Optional[Region]
    sheet: Sheet


def poles_z(params: BathParams, omega: FreqLike, variant: BathVariant) -> PolePair:
    """
    Both roots of the pole quadratic in z = exp(ik).

    Raises:
        DegenerateQuadratic: If the leading coefficient vanishes
        MirageUndefined: For the mirage variant when j1 <= gamma_b / 2
    """
    z_plus, z_minus, _ = pole_roots(bloch_coefficients(params, variant), as_complex(omega))
    return PolePair(complex(z_plus), complex(z_minus))


def discriminant(params: BathParams, omega: FreqLike, variant: BathVariant) -> complex:
    """Lambda(omega) on the principal branch; the mirage variant shares the physical one."""
    if BathVariant(variant) == BathVariant.MIRAGE:
        variant = BathVariant.PHYSICAL
    _, _, lam = pole_roots(bloch_coefficients(params, variant), as_complex(omega))
    return complex(lam)


def _laurent_terms(
    coeffs: BlochCoefficients, s: np.ndarray, row: Sublattice, col: Sublattice, dj: int
) -> List[Tuple[ArrayLike, int]]:
    pair = SublatticePair.from_sites(row, col)
    if pair in (SublatticePair.AA, SublatticePair.BB):
        return [(s, dj)]
    if pair == SublatticePair.AB:
        return [(coeffs.a_plus, dj), (coeffs.j2, dj - 1)]
    return [(coeffs.a_minus, dj), (coeffs.j2, dj + 1)]


def _evaluate(terms, z: np.ndarray) -> np.ndarray:
    total = np.zeros_like(z)
    for coef, power in terms:
        total = total + coef * z**power
    return total


def _divided_difference(power: int, z_plus: np.ndarray, z_minus: np.ndarray) -> np.ndarray:
    """(z_plus^m - z_minus^m) / (z_plus - z_minus), stable when the roots merge."""
    if power == 0:
        return np.zeros_like(z_plus)
    diff = z_plus - z_minus
    mid = 0.5 * (z_plus + z_minus)
    close = np.abs(diff) <= 1e-4 * np.maximum(np.abs(mid), 1e-300)
    safe = np.where(close, 1.0, diff)
    direct = (z_plus**power - z_minus**power) / safe
    m = power
    series = m * mid ** (m - 1) + m * (m - 1) * (m - 2) / 24 * mid ** (m - 3) * diff**2
    return np.where(close, series, direct)


def residue_element(
    coeffs: BlochCoefficients,
    omega: ArrayLike,
    row: Sublattice,
    col: Sublattice,
    dj: int,
    radius: float = 1.0,
) -> np.ndarray:
    """
    Bath Green function element G_{(row, j + dj), (col, j)}(omega) of an infinite lattice.

    Args:
        coeffs: Bloch hopping amplitudes of the lattice
        omega: Complex frequency or array of them
        row: Sublattice of the row site
        col: Sublattice of the column site
        dj: Cell of the row site minus cell of the column site
        radius: Integration circle in the z plane

    Returns:
        Complex array shaped like omega
    """
    omega = np.asarray(omega, dtype=complex)
    z_plus, z_minus, lam = pole_roots(coeffs, omega)
    s = omega + 0.5j * coeffs.gamma_b
    terms = _laurent_terms(coeffs, s, Sublattice(row), Sublattice(col), dj)
    forward = min(power for _, power in terms) >= 0
    if forward:
        take_plus, take_minus = np.abs(z_plus) < radius, np.abs(z_minus) < radius
        sign = 1.0
    else:
        take_plus, take_minus = np.abs(z_plus) > radius, np.abs(z_minus) > radius
        sign = -1.0

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g_plus = np.where(take_plus, _evaluate(terms, z_plus), 0.0)
        g_minus = np.where(take_minus, _evaluate(terms, z_minus), 0.0)
        single = sign * (g_plus - g_minus) / lam
        # both roots enclosed: lam = -a_plus j2 (z_plus - z_minus)
        both = np.zeros_like(single)
        for coef, power in terms:
            both = both + coef * _divided_difference(power, z_plus, z_minus)
        both = -sign * both / (coeffs.a_plus * coeffs.j2)
    return np.where(take_plus & take_minus, both, single)


def xi_exponent(site: Site) -> int:
    """Power of r in the gauge factor xi of a site: r^-j on A and r^(-j-1) on B."""
    sublattice, cell = site
    return -cell - (1 if Sublattice(sublattice) == Sublattice.B else 0)


def sheet_lattice(params: BathParams, sheet: Sheet) -> Tuple[BlochCoefficients, float]:
    """Bloch coefficients used on a sheet and the contour radius r (1 on the first sheet)."""
    if Sheet(sheet) == Sheet.FIRST:
        return bloch_coefficients(params, BathVariant.PHYSICAL), 1.0
    return bloch_coefficients(params, BathVariant.MIRAGE), mirage_map(params).r


def check_off_branch(params: BathParams, omega: ArrayLike, sheet: Sheet) -> None:
    """
    Raise OnBranchLoop if omega touches the branch loop (first sheet) or cut (second sheet).
    """
    coeffs, _ = sheet_lattice(params, sheet)
    z_plus, z_minus, _ = pole_roots(coeffs, np.asarray(omega, dtype=complex))
    distance = np.minimum(np.abs(np.abs(z_plus) - 1), np.abs(np.abs(z_minus) - 1))
    if np.any(distance < settings.BRANCH_TOLERANCE):
        bad = np.asarray(omega, dtype=complex).ravel()[int(np.argmin(distance))]
        raise OnBranchLoop(
            f"omega={complex(bad)} lies on the {Sheet(sheet).value} branch set",
            omega=complex(bad),
            sheet=Sheet(sheet).value,
        )


def bath_green(
    params: BathParams, omega: ArrayLike, row: Site, col: Site, sheet: Sheet, check: bool = True
) -> np.ndarray:
    """
    Bath Green function between two sites on the requested sheet.

    The second sheet is the analytic continuation of the first one through the
    branch loop: xi_row^-1 * xi_col times the mirage lattice element.
    """
    if check:
        check_off_branch(params, omega, sheet)
    coeffs, r = sheet_lattice(params, sheet)
    value = residue_element(coeffs, omega, row[0], col[0], row[1] - col[1])
    if Sheet(sheet) == Sheet.SECOND and r != 1.0:
        value = value * r ** (xi_exponent(col) - xi_exponent(row))
    return value


def pair_sites(pair: SublatticePair, d: int) -> Tuple[Site, Site]:
    """
    Row and column sites of Sigma_d for a sublattice pair.

    AB couples (A, 0) to (B, d), BA couples (B, d) to (A, 0), AA/BB couple (s, d) to (s, 0).
    """
    pair = SublatticePair(pair)
    if pair == SublatticePair.AB:
        return (Sublattice.A, 0), (Sublattice.B, d)
    if pair == SublatticePair.BA:
        return (Sublattice.B, d), (Sublattice.A, 0)
    sublattice = Sublattice(pair.value[0])
    return (sublattice, d), (sublattice, 0)


def onsite_self_energy(
    params: BathParams, omega_rabi: float, omega: ArrayLike, sheet: Sheet, check: bool = True
) -> np.ndarray:
    """Vectorized Sigma_0(omega)."""
    site = (Sublattice.A, 0)
    return omega_rabi**2 * bath_green(params, omega, site, site, sheet, check=check)


def cross_self_energy(
    params: BathParams,
    omega_rabi: float,
    omega: ArrayLike,
    d: int,
    pair: SublatticePair,
    sheet: Sheet,
    check: bool = True,
) -> np.ndarray:
    """Vectorized Sigma_d for one sublattice pair."""
    row, col = pair_sites(pair, d)
    return omega_rabi**2 * bath_green(params, omega, row, col, sheet, check=check)


def _region_or_none(params: BathParams, omega: complex, sheet: Sheet) -> Optional[Region]:
    if Sheet(sheet) == Sheet.FIRST:
        return region_of(params, omega)
    try:
        return region_of(params, omega)
    except OnBranchLoop:
        return None


def sigma_onsite(
    params: BathParams, omega_rabi: float, omega: FreqLike, sheet: Sheet
) -> SelfEnergyValue:
    """
    On-site self-energy of one emitter.

    Args:
        params: Bath parameters
        omega_rabi: Emitter-bath coupling
        omega: Complex frequency
        sheet: Physical (first) or mirage (second) sheet

    Returns:
        SelfEnergyValue; exactly 0 on the first sheet inside a point gap

    Raises:
        OnBranchLoop: If omega touches the branch set of the sheet
        MirageUndefined: On the second sheet when j1 <= gamma_b / 2
    """
    omega = as_complex(omega)
    value = complex(onsite_self_energy(params, omega_rabi, omega, sheet))
    return SelfEnergyValue(value, _region_or_none(params, omega, sheet), Sheet(sheet))


def sigma_cross(
    params: BathParams,
    omega_rabi: float,
    omega: FreqLike,
    d: int,
    pair: SublatticePair,
    sheet: Sheet,
) -> SelfEnergyValue:
    """
    Cross self-energy Sigma_d between emitters d cells apart.

    Args:
        params: Bath parameters
        omega_rabi: Emitter-bath coupling (both emitters)
        omega: Complex frequency
        d: Cell separation (any sign)
        pair: Sublattice pair, see pair_sites for the orientation
        sheet: Physical (first) or mirage (second) sheet

    Returns:
        SelfEnergyValue

    Raises:
        OnBranchLoop: If omega touches the branch set of the sheet
        MirageUndefined: On the second sheet when j1 <= gamma_b / 2
    """
    omega = as_complex(omega)
    value = complex(cross_self_energy(params, omega_rabi, omega, d, pair, sheet))
    return SelfEnergyValue(value, _region_or_none(params, omega, sheet), Sheet(sheet))


def sigma_quadrature_oracle(
    params: BathParams,
    omega_rabi: float,
    omega: FreqLike,
    d: int,
    pair: SublatticePair,
    variant: BathVariant,
    n_k: int = 4096,
    near_tolerance: float = 1e-8,
) -> complex:
    """
    Trapezoid rule for the Brillouin-zone integral behind Sigma_d.

    The mirage variant integrates the mirage Bloch resolvent and applies the same
    r-power prefactor as the second sheet.

    Raises:
        NearSpectrum: If omega is within near_tolerance of a band on the grid
    """
    if n_k < 16:
        raise ValueError("n_k must be at least 16")
    omega = as_complex(omega)
    variant = BathVariant(variant)
    coeffs = bloch_coefficients(params, variant)
    k = k_grid(n_k)
    plus, minus = band_energies(coeffs, k)
    gap = min(np.min(np.abs(omega - plus)), np.min(np.abs(omega - minus)))
    if gap < near_tolerance:
        raise NearSpectrum(f"omega={omega} is {gap:.3g} from the band", omega=omega)

    z = np.exp(1j * k)
    s = omega + 0.5j * coeffs.gamma_b
    h_ab = coeffs.a_plus + coeffs.j2 / z
    h_ba = coeffs.a_minus + coeffs.j2 * z
    det = s * s - h_ab * h_ba
    row, col = pair_sites(pair, d)
    numerator = {
        SublatticePair.AA: s,
        SublatticePair.BB: s,
        SublatticePair.AB: h_ab,
        SublatticePair.BA: h_ba,
    }[SublatticePair(pair)]
    integrand = z ** (row[1] - col[1]) * numerator / det
    value = omega_rabi**2 * np.mean(integrand)
    if variant == BathVariant.MIRAGE:
        value *= mirage_map(params).r ** (xi_exponent(col) - xi_exponent(row))
    return complex(value)


def interaction_single_pole(
    params: BathParams,
    omega_rabi: float,
    delta_prime: FreqLike,
    d: int,
    pair: SublatticePair,
    sheet: Sheet,
) -> complex:
    """
    Bound-state mediated coupling Sigma_d(-i gamma_b/2) for midgap emitters.

    Piecewise closed form: the coupling is carried by whichever pole of the
    quadratic at s = 0 (z = -j2/a_plus or z = -a_minus/j2) lies on the side
    picked by the sign of d; the other regime gives 0.

    Raises:
        NotMidgap: If delta_prime != -i gamma_b / 2
        OnPhaseBoundary: If the relevant hopping equals j2
        MirageUndefined: On the second sheet when j1 <= gamma_b / 2
    """
    delta_prime = as_complex(delta_prime)
    if abs(delta_prime + 0.5j * params.gamma_b) > settings.BOUNDARY_TOLERANCE * params.j2:
        raise NotMidgap(
            f"delta'={delta_prime} differs from -i gamma_b/2", delta_prime=delta_prime
        )
    pair = SublatticePair(pair)
    if pair in (SublatticePair.AA, SublatticePair.BB):
        return 0j

    coeffs, r = sheet_lattice(params, sheet)
    j2 = coeffs.j2
    # AB is carried by the (B -> A) hopping, BA by the (A -> B) hopping
    hop = coeffs.a_minus if pair == SublatticePair.AB else coeffs.a_plus
    if abs(hop - j2) < settings.BOUNDARY_TOLERANCE * j2:
        raise OnPhaseBoundary(
            f"Single-pole coupling switches regime at hopping == j2 ({hop})", hopping=hop
        )
    if d >= 0:
        value = -(1 / hop) * (-j2 / hop) ** d if hop > j2 else 0.0
    else:
        value = (1 / hop) * (-hop / j2) ** (-d) if hop < j2 else 0.0

    if Sheet(sheet) == Sheet.SECOND:
        value *= r ** (-(d + 1)) if pair == SublatticePair.AB else r ** (d + 1)
    return complex(omega_rabi**2 * value)
