"""
Data models for the application.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class BathVariant(str, Enum):
    CLOSED = "closed"
    PHYSICAL = "physical"
    MIRAGE = "mirage"


class Sheet(str, Enum):
    """Riemann sheet of the emitter Green function; the second one hosts the mirage bath."""

    FIRST = "physical"
    SECOND = "mirage"


class PhaseLabel(str, Enum):
    TOPOLOGICAL_LINE_GAP = "TopologicalLineGap"
    POINT_GAP = "PointGap"
    TRIVIAL_LINE_GAP = "TrivialLineGap"
    TOPOLOGICAL = "Topological"
    TRIVIAL = "Trivial"
    BOUNDARY = "Boundary"


class Region(str, Enum):
    REGION_I = "RegionI"
    REGION_II = "RegionII"


class Sublattice(str, Enum):
    A = "A"
    B = "B"


class SublatticePair(str, Enum):
    AB = "AB"
    BA = "BA"
    AA = "AA"
    BB = "BB"

    @classmethod
    def from_sites(cls, row: Sublattice, col: Sublattice) -> "SublatticePair":
        return cls(f"{Sublattice(row).value}{Sublattice(col).value}")


class Boundary(str, Enum):
    PBC = "PBC"
    OBC = "OBC"


class Band(str, Enum):
    PLUS = "+"
    MINUS = "-"


class Command(str, Enum):
    PHASE = "phase"
    SPECTRUM = "spectrum"
    SELFENERGY = "selfenergy"
    BS = "bs"
    DYNAMICS = "dynamics"
    INTERACTION = "interaction"
    G2 = "g2"
    VALIDATE = "validate"


class BathParams(BaseModel):
    """Couplings of the SSH bath in units of J2."""

    model_config = ConfigDict(frozen=True)

    j1: float = Field(ge=0)
    j2: float = Field(gt=0)
    gamma_b: float = Field(default=0.0, ge=0)

    def closed(self) -> "BathParams":
        """The same lattice without bath dissipation."""
        return self.model_copy(update={"gamma_b": 0.0})


class EmitterSpec(BaseModel):
    """One emitter: where it sits and how it couples."""

    model_config = ConfigDict(frozen=True)

    sublattice: Sublattice = Sublattice.A
    cell: int = 0
    delta: float = 0.0
    gamma_a: float = Field(default=0.0, ge=0)
    omega_rabi: float = Field(ge=0)

    @property
    def delta_prime(self) -> complex:
        return complex(self.delta, -self.gamma_a / 2)


class NonlinearEmitterSpec(BaseModel):
    """Kerr emitter driven weakly at frequency drive_omega."""

    model_config = ConfigDict(frozen=True)

    base: EmitterSpec
    u: float = 0.0
    drive_eps: float = Field(default=0.0, ge=0)
    drive_omega: float = 0.0


class ContourSpec(BaseModel):
    """
    Horizontal integration line Im(omega) = eta.

    Unset fields are filled from the bath and the sheet at run time.
    """

    model_config = ConfigDict(frozen=True)

    eta: Optional[float] = None
    span: Optional[float] = Field(default=None, gt=0)
    n_omega: Optional[int] = None
    self_check: bool = False

    @field_validator("n_omega")
    @classmethod
    def _power_of_two(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and (value < 16 or value & (value - 1)):
            raise ValueError("n_omega must be a power of two >= 16")
        return value


class TimeGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_max: float = Field(default=100.0, gt=0)
    n_points: int = Field(default=201, ge=2)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


class FrequencyGrid(BaseModel):
    """Real-frequency axis at a fixed imaginary part."""

    model_config = ConfigDict(frozen=True)

    re_min: float = -3.0
    re_max: float = 3.0
    n_points: int = Field(default=121, ge=1)
    im: float = 0.0

    @model_validator(mode="after")
    def _ordered(self) -> "FrequencyGrid":
        if self.re_max < self.re_min:
            raise ValueError("re_max must not be below re_min")
        return self

    def grid(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.n_points) + 1j * self.im


class OutputSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: Optional[str] = None
    svg: bool = False


# sweep axes understood by the commands; values are frequencies except d (cells) and tau (time)
SWEEP_KEYS = {"j1", "gamma_b", "delta", "u", "omega_d", "tau", "d"}


class RunConfig(BaseModel):
    """A complete, validated command configuration (JSON presets load into this)."""

    command: Command
    description: str = ""
    unit_scale: float = Field(default=1.0, gt=0)
    bath: BathParams
    emitters: List[EmitterSpec] = Field(default_factory=list)
    nonlinear: Optional[NonlinearEmitterSpec] = None
    sheet: Sheet = Sheet.FIRST
    boundary: Boundary = Boundary.PBC
    variant: BathVariant = BathVariant.PHYSICAL
    contour: ContourSpec = Field(default_factory=ContourSpec)
    sweep: Dict[str, List[float]] = Field(default_factory=dict)
    times: TimeGrid = Field(default_factory=TimeGrid)
    frequencies: FrequencyGrid = Field(default_factory=FrequencyGrid)
    k_points: int = Field(default=256, ge=4)
    pair: Optional[SublatticePair] = None
    emission: bool = False
    lattice_cells: Optional[int] = Field(default=None, ge=4)
    initial: int = Field(default=0, ge=0)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("sweep")
    @classmethod
    def _known_sweep_keys(cls, value: Dict[str, List[float]]) -> Dict[str, List[float]]:
        unknown = set(value) - SWEEP_KEYS
        if unknown:
            raise ValueError(f"Unknown sweep keys: {', '.join(sorted(unknown))}")
        return value

    @model_validator(mode="after")
    def _command_requirements(self) -> "RunConfig":
        needs_emitter = (Command.BS, Command.DYNAMICS, Command.SELFENERGY, Command.INTERACTION)
        if self.command in needs_emitter and not self.emitters:
            raise ValueError(f"'{self.command.value}' needs at least one emitter")
        if self.command == Command.G2 and self.nonlinear is None:
            raise ValueError("'g2' needs a nonlinear emitter")
        if self.emitters and self.initial >= len(self.emitters):
            raise ValueError("initial emitter index out of range")
        return self

    def normalized(self) -> "RunConfig":
        """
        Express every frequency in units of J2 and every time in units of 1/J2.

        Returns:
            A copy with frequencies divided by unit_scale and times multiplied by it
        """
        scale = self.unit_scale
        if scale == 1.0:
            return self

        def emitter(spec: EmitterSpec) -> EmitterSpec:
            return spec.model_copy(
                update={
                    "delta": spec.delta / scale,
                    "gamma_a": spec.gamma_a / scale,
                    "omega_rabi": spec.omega_rabi / scale,
                }
            )

        bath = BathParams(
            j1=self.bath.j1 / scale,
            j2=self.bath.j2 / scale,
            gamma_b=self.bath.gamma_b / scale,
        )
        nonlinear = None
        if self.nonlinear is not None:
            nonlinear = self.nonlinear.model_copy(
                update={
                    "base": emitter(self.nonlinear.base),
                    "u": self.nonlinear.u / scale,
                    "drive_eps": self.nonlinear.drive_eps / scale,
                    "drive_omega": self.nonlinear.drive_omega / scale,
                }
            )

        def axis(key: str, values: List[float]) -> List[float]:
            if key == "d":
                return values
            if key == "tau":
                return [v * scale for v in values]
            return [v / scale for v in values]

        frequencies = self.frequencies.model_copy(
            update={
                "re_min": self.frequencies.re_min / scale,
                "re_max": self.frequencies.re_max / scale,
                "im": self.frequencies.im / scale,
            }
        )
        contour = self.contour.model_copy(
            update={
                "eta": None if self.contour.eta is None else self.contour.eta / scale,
                "span": None if self.contour.span is None else self.contour.span / scale,
            }
        )
        return self.model_copy(
            update={
                "unit_scale": 1.0,
                "bath": bath,
                "emitters": [emitter(e) for e in self.emitters],
                "nonlinear": nonlinear,
                "sweep": {key: axis(key, values) for key, values in self.sweep.items()},
                "times": self.times.model_copy(update={"t_max": self.times.t_max * scale}),
                "frequencies": frequencies,
                "contour": contour,
            }
        )


@dataclass(frozen=True)
class TimeSeries:
    """Complex observables sampled on a time grid (t >= 0, strictly increasing)."""

    times: np.ndarray
    values: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1D grid")
        if times[0] < 0 or np.any(np.diff(times) <= 0):
            raise ValueError("times must be non-negative and strictly increasing")
        object.__setattr__(self, "times", times)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.values[label]
