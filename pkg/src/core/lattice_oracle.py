"""
Finite-lattice effective Hamiltonians: the brute-force reference for every closed form.

Single-excitation basis: emitters first (labels ("a", m)), then bath sites in cell
order, ("A", j) at N_a + 2j and ("B", j) at N_a + 2j + 1. The two-excitation basis
holds the symmetric pairs (p, q), p <= q, of single-excitation labels in
lexicographic index order; (p, p) is the normalized doubly occupied state.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import LinearOperator, eigs, splu

from api.models import (
    BathParams,
    BathVariant,
    Boundary,
    EmitterSpec,
    NonlinearEmitterSpec,
    Sheet,
    Sublattice,
    TimeSeries,
)
from config.settings import settings
from core.bath_model import ComplexFreq, bloch_coefficients, mirage_map
from core.bound_states import BoundState
from core.self_energy import xi_exponent
from misc.errors import ConfigError, DimensionTooLarge, NoConvergence, StepUnderflow

Label = Tuple
StateVector = np.ndarray

MAX_PAIR_CELLS = 100
DUMP_MAGIC = b"SSHL"
DUMP_VERSION = 1
DUMP_HEADER = np.dtype(
    [
        ("magic", "S4"),
        ("version", "<u4"),
        ("dimension", "<u8"),
        ("nnz", "<u8"),
        ("n_emitters", "<u4"),
        ("n_b", "<u4"),
        ("boundary", "u1"),
        ("sheet", "u1"),
        ("sector", "u1"),
        ("padding", "V5"),
    ]
)
_BOUNDARY_CODES = {Boundary.PBC: 0, Boundary.OBC: 1}
_SHEET_CODES = {Sheet.FIRST: 0, Sheet.SECOND: 1}


@dataclass(frozen=True)
class LatticeOperator:
    """Sparse effective Hamiltonian of a finite lattice, immutable after build."""

    matrix: sparse.csr_matrix
    basis: Tuple[Label, ...]
    boundary: Boundary
    sheet: Sheet
    n_emitters: int
    n_b: int
    sector: int = 1

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _positions(self) -> Dict[Label, int]:
        return {label: position for position, label in enumerate(self.basis)}

    def index(self, label: Label) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise ConfigError(f"Label {label} is not in the basis") from None

    def basis_state(self, label: Label) -> StateVector:
        state = np.zeros(self.dimension, dtype=complex)
        state[self.index(label)] = 1.0
        return state


def emitter_label(m: int) -> Label:
    return ("a", m)


def site_label(sublattice: Sublattice, cell: int) -> Label:
    return (Sublattice(sublattice).value, cell)


def label_key(label: Label) -> str:
    """Column name of a basis label: a0, A12, B3, or a0|B2 for pairs."""
    if label and isinstance(label[0], tuple):
        return "|".join(label_key(part) for part in label)
    return f"{label[0]}{label[1]}"


def single_basis(n_emitters: int, n_b: int) -> Tuple[Label, ...]:
    labels: List[Label] = [emitter_label(m) for m in range(n_emitters)]
    for j in range(n_b):
        labels.extend((site_label(Sublattice.A, j), site_label(Sublattice.B, j)))
    return tuple(labels)


def emitter_chain(
    n: int,
    first_cell: int,
    omega_rabi: float,
    gamma_a: float = 0.0,
    delta: float = 0.0,
) -> List[EmitterSpec]:
    """n emitters on consecutive cells, alternating A and B sublattices."""
    return [
        EmitterSpec(
            sublattice=Sublattice.A if m % 2 == 0 else Sublattice.B,
            cell=first_cell + m,
            delta=delta,
            gamma_a=gamma_a,
            omega_rabi=omega_rabi,
        )
        for m in range(n)
    ]


def xi_factor(r: float, sublattice: Sublattice, cell: int, reference_cell: int) -> float:
    """Gauge factor of an emitter coupling on the mirage lattice."""
    exponent = -(cell - reference_cell) - (1 if Sublattice(sublattice) == Sublattice.B else 0)
    return r**exponent


def build_heff(
    params: BathParams,
    emitters: Sequence[EmitterSpec],
    n_b: int,
    boundary: Boundary,
    sheet: Sheet,
    rescale: bool = True,
    reference_cell: Optional[int] = None,
) -> LatticeOperator:
    """
    Single-excitation effective Hamiltonian of emitters on a finite SSH lattice.

    Args:
        params: Bath parameters
        emitters: Emitters, cells must lie in 0 .. n_b - 1
        n_b: Number of unit cells
        boundary: PBC keeps the (B, n_b - 1) - (A, 0) link, OBC drops it
        sheet: FIRST builds the physical bath, SECOND the mirage bath
        rescale: Apply the xi gauge factors to mirage emitter couplings
        reference_cell: Cell where xi(A) = 1 (default: first emitter)

    Returns:
        LatticeOperator over N_a + 2 n_b states

    Raises:
        ConfigError: If n_b < 4 or an emitter sits outside the lattice
        MirageUndefined: For the mirage bath when j1 <= gamma_b / 2
    """
    sheet, boundary = Sheet(sheet), Boundary(boundary)
    if n_b < 4:
        raise ConfigError(f"n_b must be at least 4 (got {n_b})")
    if sheet == Sheet.FIRST:
        coeffs, r = bloch_coefficients(params, BathVariant.PHYSICAL), 1.0
    else:
        coeffs, r = bloch_coefficients(params, BathVariant.MIRAGE), mirage_map(params).r
        if boundary == Boundary.OBC:
            logger.warning("Open-boundary mirage builds are experimental")

    n_a = len(emitters)
    dimension = n_a + 2 * n_b
    rows: List[int] = []
    cols: List[int] = []
    values: List[complex] = []

    def link(row: int, col: int, value: complex) -> None:
        rows.append(row)
        cols.append(col)
        values.append(value)

    onsite = -0.5j * coeffs.gamma_b
    for j in range(n_b):
        a_site, b_site = n_a + 2 * j, n_a + 2 * j + 1
        link(a_site, a_site, onsite)
        link(b_site, b_site, onsite)
        link(a_site, b_site, coeffs.a_plus)
        link(b_site, a_site, coeffs.a_minus)
        if j + 1 < n_b or boundary == Boundary.PBC:
            next_a = n_a + 2 * ((j + 1) % n_b)
            link(b_site, next_a, coeffs.j2)
            link(next_a, b_site, coeffs.j2)

    if emitters and reference_cell is None:
        reference_cell = emitters[0].cell
    for m, emitter in enumerate(emitters):
        if not 0 <= emitter.cell < n_b:
            raise ConfigError(f"Emitter {m} at cell {emitter.cell} is outside 0..{n_b - 1}")
        site = n_a + 2 * emitter.cell + (1 if emitter.sublattice == Sublattice.B else 0)
        xi = 1.0
        if sheet == Sheet.SECOND and rescale:
            xi = xi_factor(r, emitter.sublattice, emitter.cell, reference_cell)
        link(m, m, emitter.delta_prime)
        link(site, m, emitter.omega_rabi * xi)
        link(m, site, emitter.omega_rabi / xi)

    matrix = sparse.coo_matrix(
        (np.array(values, dtype=complex), (rows, cols)), shape=(dimension, dimension)
    ).tocsr()
    logger.debug(f"Built {boundary.value} {sheet.value} operator: dim={dimension}, nnz={matrix.nnz}")
    return LatticeOperator(matrix, single_basis(n_a, n_b), boundary, sheet, n_a, n_b)


def evolve_state(
    op: LatticeOperator,
    psi0: StateVector,
    t_grid: np.ndarray,
    observe: Optional[Iterable[Label]] = None,
) -> TimeSeries:
    """
    Integrate d psi / dt = -i H psi with an adaptive explicit Runge-Kutta scheme.

    Args:
        op: Lattice operator
        psi0: Initial state aligned with op.basis
        t_grid: Output times, t >= 0, strictly increasing
        observe: Labels whose amplitudes are returned (default: all emitters)

    Returns:
        TimeSeries of the observed amplitudes plus the state norm under "norm"

    Raises:
        ConfigError: If psi0 does not match the operator dimension
        StepUnderflow: If the integrator fails
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (op.dimension,):
        raise ConfigError(f"State of shape {psi0.shape} does not match dimension {op.dimension}")
    t_grid = np.asarray(t_grid, dtype=float)
    if observe is None:
        observe = [emitter_label(m) for m in range(op.n_emitters)]
    indices = {label_key(label): op.index(label) for label in observe}

    matrix = op.matrix
    solution = solve_ivp(
        lambda _, psi: -1j * (matrix @ psi),
        (0.0, float(t_grid[-1])),
        psi0,
        method=settings.INTEGRATOR,
        t_eval=t_grid,
        rtol=settings.INTEGRATOR_RTOL,
        atol=settings.INTEGRATOR_ATOL,
    )
    if not solution.success:
        raise StepUnderflow(f"Integrator stopped: {solution.message}", t=float(solution.t[-1]))

    states = solution.y
    values = {key: states[index].copy() for key, index in indices.items()}
    values["norm"] = np.linalg.norm(states, axis=0)
    return TimeSeries(t_grid, values)


def _check_dimension(op: LatticeOperator, limit: int) -> None:
    if op.dimension > limit:
        raise DimensionTooLarge(
            f"Operator dimension {op.dimension} exceeds {limit}", dimension=op.dimension
        )


def eigenmode_near(op: LatticeOperator, sigma: Union[complex, ComplexFreq]) -> Tuple[ComplexFreq, StateVector]:
    """
    Eigenpair closest to sigma by shift-and-invert.

    The shifted operator is LU-factorized once; ARPACK runs on its inverse and
    the result is polished by inverse iteration until the residual meets
    EIGEN_TOLERANCE.

    Returns:
        (eigenvalue, unit-norm right eigenvector)

    Raises:
        DimensionTooLarge: If the operator exceeds MAX_OPERATOR_DIMENSION
        NoConvergence: If sigma is an exact eigenvalue or the residual stays large
    """
    _check_dimension(op, settings.MAX_OPERATOR_DIMENSION)
    sigma = complex(sigma)
    n = op.dimension
    shifted = (op.matrix - sigma * sparse.identity(n, dtype=complex, format="csr")).tocsc()
    try:
        lu = splu(shifted)
    except RuntimeError as error:
        raise NoConvergence(f"Shift {sigma} is singular: {error}", sigma=sigma) from error

    inverse = LinearOperator((n, n), matvec=lu.solve, dtype=complex)
    v0 = np.ones(n, dtype=complex) / math.sqrt(n)
    try:
        mu, vectors = eigs(inverse, k=1, which="LM", v0=v0)
    except Exception as error:
        raise NoConvergence(f"ARPACK failed near {sigma}: {error}", sigma=sigma) from error

    vector = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    value = sigma + 1 / mu[0]
    residual = np.linalg.norm(op.matrix @ vector - value * vector)
    for _ in range(20):
        if residual < settings.EIGEN_TOLERANCE:
            break
        vector = lu.solve(vector)
        vector /= np.linalg.norm(vector)
        value = np.vdot(vector, op.matrix @ vector)
        residual = np.linalg.norm(op.matrix @ vector - value * vector)
    if residual >= settings.EIGEN_TOLERANCE:
        raise NoConvergence(
            f"Eigenpair near {sigma} did not converge (residual {residual:.3g})",
            sigma=sigma,
            residual=float(residual),
        )
    logger.debug(f"eigenmode_near({sigma}) -> {value} (residual {residual:.2g})")
    return ComplexFreq(complex(value), op.sheet), vector


def phase_aligned(vector: StateVector, reference: StateVector) -> StateVector:
    """vector times the global phase that makes its overlap with reference real and positive."""
    overlap = np.vdot(vector, reference)
    if overlap == 0:
        return vector
    return vector * (overlap / abs(overlap))


def site_profile(op: LatticeOperator, vector: StateVector, sublattice: Sublattice, cells: Iterable[int]) -> np.ndarray:
    """Amplitudes of a single-excitation vector on (sublattice, j) for the given cells."""
    return np.array([vector[op.index(site_label(sublattice, int(j) % op.n_b))] for j in cells])


def embed_bound_state(op: LatticeOperator, state: BoundState, emitter_index: int = 0) -> StateVector:
    """Place a bound-state profile on the lattice basis, wrapping cells around the ring."""
    if len(state.cells) > op.n_b:
        raise ConfigError(f"Profile spans {len(state.cells)} cells, the lattice has {op.n_b}")
    vector = np.zeros(op.dimension, dtype=complex)
    vector[emitter_index] = state.phi_a
    for position, cell in enumerate(state.cells):
        vector[op.index(site_label(Sublattice.A, int(cell) % op.n_b))] = state.f_a[position]
        vector[op.index(site_label(Sublattice.B, int(cell) % op.n_b))] = state.f_b[position]
    return vector


def finite_spectrum(op: LatticeOperator) -> np.ndarray:
    """All eigenvalues of a small operator, by dense diagonalization."""
    _check_dimension(op, settings.MAX_OPERATOR_DIMENSION)
    return np.linalg.eigvals(op.matrix.toarray())


def spectral_hausdorff(first: np.ndarray, second: np.ndarray) -> float:
    """Hausdorff distance between two finite sets of complex numbers."""
    first = np.asarray(first, dtype=complex).ravel()
    second = np.asarray(second, dtype=complex).ravel()
    distances = np.abs(first[:, None] - second[None, :])
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def pair_dimension(n_states: int) -> int:
    return n_states * (n_states + 1) // 2


def two_excitation_build(
    params: BathParams,
    emitter: NonlinearEmitterSpec,
    n_b: int,
    boundary: Boundary,
    sheet: Sheet,
) -> LatticeOperator:
    """
    Two-excitation sector of one Kerr emitter on a finite lattice.

    H2 = S^T (h x 1 + 1 x h) S + U |ee><ee|, with h the single-excitation
    operator and S the isometry from symmetric pairs into the product space.

    Raises:
        DimensionTooLarge: If n_b > 100
    """
    if n_b > MAX_PAIR_CELLS:
        raise DimensionTooLarge(
            f"Two-excitation builds are limited to {MAX_PAIR_CELLS} cells (got {n_b})", n_b=n_b
        )
    single = build_heff(params, [emitter.base], n_b, boundary, sheet)
    size = single.dimension
    pairs = [(p, q) for p in range(size) for q in range(p, size)]

    rows, cols, values = [], [], []
    for column, (p, q) in enumerate(pairs):
        if p == q:
            rows.append(p * size + p)
            cols.append(column)
            values.append(1.0)
        else:
            weight = 1 / math.sqrt(2)
            rows.extend((p * size + q, q * size + p))
            cols.extend((column, column))
            values.extend((weight, weight))
    isometry = sparse.coo_matrix(
        (values, (rows, cols)), shape=(size * size, len(pairs))
    ).tocsr()

    h = single.matrix
    identity = sparse.identity(size, dtype=complex, format="csr")
    product = sparse.kron(h, identity, format="csr") + sparse.kron(identity, h, format="csr")
    matrix = (isometry.T @ product @ isometry).tocsr()
    if emitter.u != 0:
        kerr = sparse.coo_matrix(([emitter.u], ([0], [0])), shape=matrix.shape)
        matrix = (matrix + kerr).tocsr()

    basis = tuple((single.basis[p], single.basis[q]) for p, q in pairs)
    logger.debug(f"Two-excitation build: {size} single states, dim={len(pairs)}")
    return LatticeOperator(matrix, basis, Boundary(boundary), Sheet(sheet), 1, n_b, sector=2)


def resolvent_moments(
    op: LatticeOperator, rows: Sequence[int], column: int, shift: complex, order: int
) -> np.ndarray:
    """<row| (H - shift)^n |column> for n < order, shaped (order, len(rows))."""
    vector = np.zeros(op.dimension, dtype=complex)
    vector[column] = 1.0
    moments = np.empty((order, len(rows)), dtype=complex)
    for n in range(order):
        moments[n] = vector[list(rows)]
        vector = op.matrix @ vector - shift * vector
    return moments


def _patch_cells(span: int, order: int) -> Tuple[int, int]:
    """Ring size and offset for a patch where no path of `order` hops wraps around."""
    margin = order + 3
    return span + 2 * margin, margin


def emitter_moments(
    params: BathParams,
    emitters: Sequence[EmitterSpec],
    initial: int,
    sheet: Sheet,
    shift: complex,
    order: int,
) -> np.ndarray:
    """Moments <a_m| (H - shift)^n |a_initial> of the infinite-lattice emitter resolvent."""
    low = min(e.cell for e in emitters)
    high = max(e.cell for e in emitters)
    n_b, offset = _patch_cells(high - low, order)
    placed = [e.model_copy(update={"cell": e.cell - low + offset}) for e in emitters]
    op = build_heff(params, placed, n_b, Boundary.PBC, sheet, reference_cell=placed[0].cell)
    return resolvent_moments(op, range(len(emitters)), initial, shift, order)


def bath_moments(
    params: BathParams,
    row: Tuple[Sublattice, int],
    col: Tuple[Sublattice, int],
    sheet: Sheet,
    shift: complex,
    order: int,
) -> np.ndarray:
    """Moments <row| (H_b - shift)^n |col> of the bath resolvent on a sheet, shaped (order,)."""
    low = min(row[1], col[1])
    n_b, offset = _patch_cells(abs(row[1] - col[1]), order)
    op = build_heff(params, [], n_b, Boundary.PBC, sheet)
    row_index = op.index(site_label(row[0], row[1] - low + offset))
    col_index = op.index(site_label(col[0], col[1] - low + offset))
    moments = resolvent_moments(op, [row_index], col_index, shift, order)[:, 0]
    if Sheet(sheet) == Sheet.SECOND:
        r = mirage_map(params).r
        exponent = xi_exponent(col) - xi_exponent(row)
        moments = moments * r**exponent
    return moments


def pair_moments(
    params: BathParams, emitter: NonlinearEmitterSpec, sheet: Sheet, shift: complex, order: int
) -> np.ndarray:
    """Moments <ee| (H2 - shift)^n |ee> of the two-excitation resolvent, shaped (order,)."""
    n_b, offset = _patch_cells(0, order)
    placed = emitter.model_copy(update={"base": emitter.base.model_copy(update={"cell": offset})})
    op = two_excitation_build(params, placed, n_b, Boundary.PBC, sheet)
    return resolvent_moments(op, [0], 0, shift, order)[:, 0]


def dump_operator(op: LatticeOperator, path: Union[str, Path]) -> Path:
    """
    Write an operator as a little-endian binary file.

    Layout: 40-byte header (magic "SSHL", u32 version, u64 dimension, u64 nnz,
    u32 emitters, u32 cells, u8 boundary, u8 sheet, u8 sector, 5 padding bytes),
    then CSR indptr (<i8), indices (<i8) and data (<c16).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matrix = op.matrix.tocsr()
    header = np.zeros(1, dtype=DUMP_HEADER)
    header["magic"] = DUMP_MAGIC
    header["version"] = DUMP_VERSION
    header["dimension"] = op.dimension
    header["nnz"] = matrix.nnz
    header["n_emitters"] = op.n_emitters
    header["n_b"] = op.n_b
    header["boundary"] = _BOUNDARY_CODES[op.boundary]
    header["sheet"] = _SHEET_CODES[op.sheet]
    header["sector"] = op.sector
    with open(path, "wb") as handle:
        handle.write(header.tobytes())
        handle.write(matrix.indptr.astype("<i8").tobytes())
        handle.write(matrix.indices.astype("<i8").tobytes())
        handle.write(matrix.data.astype("<c16").tobytes())
    logger.debug(f"Dumped operator to {path} ({path.stat().st_size} bytes)")
    return path


def load_operator(path: Union[str, Path]) -> LatticeOperator:
    """
    Read an operator written by dump_operator.

    Raises:
        ConfigError: On a wrong magic, unknown version or truncated file
    """
    raw = Path(path).read_bytes()
    if len(raw) < DUMP_HEADER.itemsize:
        raise ConfigError(f"{path} is too short for an operator dump")
    header = np.frombuffer(raw[: DUMP_HEADER.itemsize], dtype=DUMP_HEADER)[0]
    if bytes(header["magic"]) != DUMP_MAGIC:
        raise ConfigError(f"{path} is not an operator dump")
    if int(header["version"]) != DUMP_VERSION:
        raise ConfigError(f"Unsupported dump version {int(header['version'])}")

    dimension, nnz = int(header["dimension"]), int(header["nnz"])
    offset = DUMP_HEADER.itemsize
    sizes = [(dimension + 1, "<i8"), (nnz, "<i8"), (nnz, "<c16")]
    arrays = []
    for count, dtype in sizes:
        length = count * np.dtype(dtype).itemsize
        if offset + length > len(raw):
            raise ConfigError(f"{path} is truncated")
        arrays.append(np.frombuffer(raw[offset : offset + length], dtype=dtype))
        offset += length
    indptr, indices, data = arrays
    matrix = sparse.csr_matrix((data.copy(), indices.copy(), indptr.copy()), shape=(dimension, dimension))

    boundary = {code: value for value, code in _BOUNDARY_CODES.items()}[int(header["boundary"])]
    sheet = {code: value for value, code in _SHEET_CODES.items()}[int(header["sheet"])]
    n_emitters, n_b, sector = int(header["n_emitters"]), int(header["n_b"]), int(header["sector"])
    basis = single_basis(n_emitters, n_b)
    if sector == 2:
        basis = tuple(
            (basis[p], basis[q]) for p in range(len(basis)) for q in range(p, len(basis))
        )
    return LatticeOperator(matrix, basis, boundary, sheet, n_emitters, n_b, sector)
