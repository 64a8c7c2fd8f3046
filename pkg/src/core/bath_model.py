"""
SSH bath parameters, Bloch bands, phase classification and the mirage map.

Lattice convention: cell j holds sites (A, j) and (B, j). The intra-cell hopping
is J1 (J1 + gamma_b/2 on b_A^dag b_B and J1 - gamma_b/2 on b_B^dag b_A for the
dissipative bath), the inter-cell hopping J2 links (B, j) and (A, j + 1), and the
dissipative bath carries a uniform on-site loss -i gamma_b / 2.
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from api.models import Band, BathParams, BathVariant, PhaseLabel, Region, Sheet
from config.settings import settings
from misc.errors import DegenerateQuadratic, MirageUndefined, OnBranchLoop, OnPhaseBoundary


@dataclass(frozen=True)
class ComplexFreq:
    """A complex frequency in units of J2, tagged with the sheet it lives on."""

    value: complex
    sheet: Sheet = Sheet.FIRST

    def __complex__(self) -> complex:
        return complex(self.value)


@dataclass(frozen=True)
class MirageParams:
    j1_tilde: float
    r: float


@dataclass(frozen=True)
class BlochCoefficients:
    """
    Hopping amplitudes of one bath variant in Bloch form.

    h_AB(z) = a_plus + j2 / z and h_BA(z) = a_minus + j2 * z with z = exp(ik);
    every site carries the on-site energy -i gamma_b / 2.
    """

    a_plus: float
    a_minus: float
    j2: float
    gamma_b: float

    @property
    def reciprocal(self) -> bool:
        return self.a_plus == self.a_minus

    @property
    def root_product(self) -> float:
        return self.a_minus / self.a_plus


class GapBoundary(NamedTuple):
    label: str
    value: float


FreqLike = Union[complex, float, ComplexFreq]


def as_complex(omega: FreqLike) -> complex:
    return complex(omega)


def require_mirage(params: BathParams) -> None:
    if params.j1 <= params.gamma_b / 2:
        raise MirageUndefined(
            f"Mirage bath needs j1 > gamma_b/2 (j1={params.j1}, gamma_b={params.gamma_b})",
            j1=params.j1,
            gamma_b=params.gamma_b,
        )


def mirage_map(params: BathParams) -> MirageParams:
    """
    Map the dissipative bath onto its mirage counterpart.

    Args:
        params: Bath parameters with j1 > gamma_b / 2

    Returns:
        MirageParams with the effective intra-cell coupling and the contour radius

    Raises:
        MirageUndefined: If j1 <= gamma_b / 2
    """
    require_mirage(params)
    half = params.gamma_b / 2
    return MirageParams(
        j1_tilde=math.sqrt(params.j1**2 - half**2),
        r=math.sqrt((params.j1 - half) / (params.j1 + half)),
    )


def bloch_coefficients(params: BathParams, variant: BathVariant) -> BlochCoefficients:
    """
    Hopping amplitudes for a bath variant.

    Args:
        params: Bath parameters
        variant: Closed, Physical or Mirage

    Returns:
        BlochCoefficients of that variant

    Raises:
        MirageUndefined: For the mirage variant when j1 <= gamma_b / 2
    """
    variant = BathVariant(variant)
    if variant == BathVariant.CLOSED:
        return BlochCoefficients(params.j1, params.j1, params.j2, 0.0)
    if variant == BathVariant.PHYSICAL:
        half = params.gamma_b / 2
        return BlochCoefficients(params.j1 + half, params.j1 - half, params.j2, params.gamma_b)
    j1_tilde = mirage_map(params).j1_tilde
    return BlochCoefficients(j1_tilde, j1_tilde, params.j2, params.gamma_b)


def band_energies(
    coeffs: BlochCoefficients, k: Union[float, np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """Both bands -i gamma/2 +- sqrt(h_AB h_BA) at momenta k."""
    k = np.asarray(k, dtype=float)
    phase = np.exp(1j * k)
    if coeffs.reciprocal:
        # h_BA is the conjugate of h_AB, the product is real and non-negative
        product = np.abs(coeffs.a_plus + coeffs.j2 * phase) ** 2 + 0j
    else:
        product = (coeffs.a_plus + coeffs.j2 / phase) * (coeffs.a_minus + coeffs.j2 * phase)
    root = np.sqrt(product)
    onsite = -0.5j * coeffs.gamma_b
    return onsite + root, onsite - root


def dispersion(
    params: BathParams,
    k: float,
    band: Band,
    variant: BathVariant = BathVariant.PHYSICAL,
) -> ComplexFreq:
    """
    Band energy of one bath variant.

    Args:
        params: Bath parameters
        k: Quasi-momentum in [-pi, pi)
        band: Upper (+) or lower (-) branch of the square root
        variant: Closed, Physical or Mirage

    Returns:
        ComplexFreq; mirage energies carry the second-sheet tag

    Raises:
        MirageUndefined: For the mirage variant when j1 <= gamma_b / 2
    """
    plus, minus = band_energies(bloch_coefficients(params, variant), k)
    value = plus if Band(band) == Band.PLUS else minus
    sheet = Sheet.SECOND if BathVariant(variant) == BathVariant.MIRAGE else Sheet.FIRST
    return ComplexFreq(complex(value), sheet)


def k_grid(n_k: int = None) -> np.ndarray:
    """Uniform Brillouin-zone grid on [-pi, pi)."""
    n_k = n_k or settings.K_GRID
    return -np.pi + 2 * np.pi * np.arange(n_k) / n_k


def _boundary_tolerance(params: BathParams) -> float:
    return settings.BOUNDARY_TOLERANCE * params.j2


def gap_boundaries(params: BathParams) -> List[GapBoundary]:
    """
    Values of j1 where the physical and mirage gaps close.

    Args:
        params: Bath parameters (j1 is ignored)

    Returns:
        Labeled boundaries: physical-lower, physical-upper, mirage
    """
    half = params.gamma_b / 2
    return [
        GapBoundary("physical-lower", params.j2 - half),
        GapBoundary("physical-upper", params.j2 + half),
        GapBoundary("mirage", math.sqrt(params.j2**2 + half**2)),
    ]


def classify_phase(params: BathParams) -> PhaseLabel:
    """
    Phase of the dissipative bath.

    Raises:
        OnPhaseBoundary: If j1 sits on j2 +- gamma_b/2 within tolerance
    """
    lower, upper, _ = gap_boundaries(params)
    tol = _boundary_tolerance(params)
    for boundary in (lower, upper):
        if abs(params.j1 - boundary.value) < tol:
            raise OnPhaseBoundary(
                f"j1={params.j1} lies on the {boundary.label} gap closing",
                boundary=boundary.label,
                value=boundary.value,
            )
    if params.j1 < lower.value:
        return PhaseLabel.TOPOLOGICAL_LINE_GAP
    if params.j1 < upper.value:
        return PhaseLabel.POINT_GAP
    return PhaseLabel.TRIVIAL_LINE_GAP


def classify_mirage_phase(params: BathParams) -> PhaseLabel:
    """
    Line-gap phase of the mirage bath (also the closed bath when gamma_b = 0).

    Raises:
        MirageUndefined: If j1 <= gamma_b / 2
        OnPhaseBoundary: If j1 sits on sqrt(j2^2 + gamma_b^2/4) within tolerance
    """
    require_mirage(params)
    boundary = gap_boundaries(params)[2]
    if abs(params.j1 - boundary.value) < _boundary_tolerance(params):
        raise OnPhaseBoundary(
            f"j1={params.j1} lies on the mirage gap closing",
            boundary=boundary.label,
            value=boundary.value,
        )
    return PhaseLabel.TOPOLOGICAL if params.j1 < boundary.value else PhaseLabel.TRIVIAL


def phase_grid(
    j2: float, j1_values: Sequence[float], gamma_values: Sequence[float]
) -> List[dict]:
    """
    Physical and mirage labels over a (gamma_b, j1) grid.

    Points on a gap closing are labeled Boundary; mirage labels are Boundary
    too where the mirage bath is undefined.
    """
    rows = []
    for gamma_b in gamma_values:
        for j1 in j1_values:
            params = BathParams(j1=j1, j2=j2, gamma_b=gamma_b)
            try:
                physical = classify_phase(params)
            except OnPhaseBoundary:
                physical = PhaseLabel.BOUNDARY
            try:
                mirage = classify_mirage_phase(params)
            except (OnPhaseBoundary, MirageUndefined):
                mirage = PhaseLabel.BOUNDARY
            rows.append(
                {"gamma_b": gamma_b, "j1": j1, "physical": physical.value, "mirage": mirage.value}
            )
    return rows


def pole_roots(
    coeffs: BlochCoefficients, omega: Union[complex, np.ndarray]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Roots in z = exp(ik) of z * det(omega - H(k)) and the discriminant.

    z_plus = (sigma1 - s^2 + lam) / (-2 a_plus j2), z_minus with -lam, where
    s = omega + i gamma/2, sigma1 = a_plus a_minus + j2^2 and
    lam^2 = (s^2 - sigma1)^2 - 4 a_plus a_minus j2^2 on the principal branch.

    Returns:
        (z_plus, z_minus, lam) as complex arrays shaped like omega
    """
    leading = coeffs.a_plus * coeffs.j2
    if leading == 0:
        raise DegenerateQuadratic(
            "Pole quadratic degenerates (a_plus * j2 == 0)",
            a_plus=coeffs.a_plus,
            j2=coeffs.j2,
        )
    s = np.asarray(omega, dtype=complex) + 0.5j * coeffs.gamma_b
    sigma1 = coeffs.a_plus * coeffs.a_minus + coeffs.j2**2
    shifted = s * s - sigma1
    lam = np.sqrt(shifted * shifted - 4 * coeffs.a_plus * coeffs.a_minus * coeffs.j2**2)
    z_plus = (shifted - lam) / (2 * leading)
    z_minus = (shifted + lam) / (2 * leading)
    # the smaller root loses digits to cancellation; rebuild it from the product
    product = coeffs.root_product
    swap = np.abs(z_plus) >= np.abs(z_minus)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_minus = np.where(swap & (z_plus != 0), product / z_plus, z_minus)
        z_plus = np.where(~swap & (z_minus != 0), product / z_minus, z_plus)
    return z_plus, z_minus, lam


def loop_distance(coeffs: BlochCoefficients, omega, radius: float = 1.0) -> np.ndarray:
    """Distance of the pole moduli from the integration circle |z| = radius."""
    z_plus, z_minus, _ = pole_roots(coeffs, omega)
    return np.minimum(np.abs(np.abs(z_plus) - radius), np.abs(np.abs(z_minus) - radius))


def region_of(params: BathParams, omega: FreqLike) -> Region:
    """
    Region I (outside the spectral loops) or II (inside a point gap).

    Raises:
        OnBranchLoop: If a pole modulus is within tolerance of 1
    """
    omega = as_complex(omega)
    coeffs = bloch_coefficients(params, BathVariant.PHYSICAL)
    z_plus, z_minus, _ = pole_roots(coeffs, omega)
    distance = min(abs(abs(z_plus) - 1), abs(abs(z_minus) - 1))
    if distance < settings.BRANCH_TOLERANCE:
        raise OnBranchLoop(f"omega={omega} lies on a branch loop", omega=omega)
    inside = int(abs(z_plus) < 1) + int(abs(z_minus) < 1)
    region = Region.REGION_I if inside == 1 else Region.REGION_II
    logger.debug(f"region_of({omega}) -> {region.value} (|z+|={abs(z_plus):.6g}, |z-|={abs(z_minus):.6g})")
    return region
