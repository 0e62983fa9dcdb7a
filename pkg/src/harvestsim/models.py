"""Circuit-level domain types for piezoelectric and electromagnetic vibration harvesters."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class ValidationError(ValueError):
    """Raised when a physical parameter is out of range; carries the field name."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


def _require_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise ValidationError(name, f"must be strictly positive, got {value!r}")


def _require_nonnegative(name: str, value: float) -> None:
    if not value >= 0.0:
        raise ValidationError(name, f"must be non-negative, got {value!r}")


@dataclass(frozen=True)
class PiezoMaterialGeometry:
    """Material constants and characteristic dimensions of a bimorph-style generator.

    s11: compliance (m^2/N); d31: transverse coupling (C/N), sign follows the
    poling convention and may be negative; eps33: permittivity (F/m).
    l1/a1 set the mechanical-compliance path, l2 the coupling lever,
    l3/a3 the electrode stack.
    """

    s11: float
    d31: float
    eps33: float
    l1: float
    l2: float
    l3: float
    a1: float
    a3: float

    def __post_init__(self) -> None:
        for name in ("s11", "eps33", "l1", "l2", "l3", "a1", "a3"):
            _require_positive(name, getattr(self, name))
        if self.d31 == 0.0:
            raise ValidationError("d31", "must be non-zero")


@dataclass(frozen=True)
class PiezoEquivalentCircuit:
    """Current source in parallel with a capacitor and a dielectric-loss resistor.

    c_total is always derived as coupling^2 * c_mech + c_clamped, so the
    defining relation holds exactly. r_loss = inf encodes no dielectric loss.
    """

    coupling: float  # charge per unit force-path deflection, C/m
    c_mech: float  # mechanical-equivalent capacitance, F
    c_clamped: float  # clamped (blocked) capacitance, F
    r_loss: float = math.inf  # dielectric loss resistance, ohm
    c_total: float = field(init=False)  # total source-side capacitance, F

    def __post_init__(self) -> None:
        _require_positive("c_mech", self.c_mech)
        _require_positive("c_clamped", self.c_clamped)
        _require_positive("r_loss", self.r_loss)
        object.__setattr__(
            self, "c_total", self.coupling * self.coupling * self.c_mech + self.c_clamped
        )

    @classmethod
    def from_capacitance(cls, c_total: float, r_loss: float = math.inf) -> "PiezoEquivalentCircuit":
        """Build a circuit from a directly measured total capacitance (no coupling split)."""
        _require_positive("c_total", c_total)
        return cls(coupling=0.0, c_mech=1.0, c_clamped=c_total, r_loss=r_loss)


class Waveform(enum.Enum):
    SINUSOIDAL = "sinusoidal"


@dataclass(frozen=True)
class ExcitationSpec:
    """Prescribed source waveform: either the source-current peak directly, or a
    force peak converted via i = coupling * c_mech * dF/dt (for a sinusoid the
    peak of dF/dt is 2*pi*f*F0)."""

    frequency: float  # Hz
    i_peak: float | None = None  # A
    force_peak: float | None = None  # N
    phase: float = 0.0  # rad
    waveform: Waveform = Waveform.SINUSOIDAL

    def __post_init__(self) -> None:
        _require_positive("frequency", self.frequency)
        if (self.i_peak is None) == (self.force_peak is None):
            raise ValidationError("i_peak", "exactly one of i_peak / force_peak must be set")
        amp = self.i_peak if self.i_peak is not None else self.force_peak
        _require_nonnegative("i_peak" if self.i_peak is not None else "force_peak", amp)

    def source_current_peak(self, circuit: PiezoEquivalentCircuit) -> float:
        """Peak of the equivalent source current for the given circuit."""
        if self.i_peak is not None:
            return self.i_peak
        dfdt_peak = 2.0 * math.pi * self.frequency * self.force_peak
        return abs(circuit.coupling) * circuit.c_mech * dfdt_peak


@dataclass(frozen=True)
class EmEquivalentCircuit:
    """Electromagnetic generator: voltage source in series with coil L and R."""

    v_amp: float  # open-circuit voltage amplitude, V
    frequency: float  # Hz
    lm: float  # coil inductance, H
    rm: float  # coil resistance, ohm

    def __post_init__(self) -> None:
        _require_nonnegative("v_amp", self.v_amp)
        _require_positive("frequency", self.frequency)
        _require_positive("lm", self.lm)
        _require_nonnegative("rm", self.rm)


@dataclass(frozen=True)
class IntegratedInductor:
    """Inductor reduced to L with a series resistance; rs = 0 is the ideal discrete part."""

    inductance: float  # H
    r_series: float = 0.0  # ohm

    def __post_init__(self) -> None:
        _require_positive("inductance", self.inductance)
        _require_nonnegative("r_series", self.r_series)


@dataclass(frozen=True)
class Load:
    """Resistive load; resistance may be inf for the open-circuit limit."""

    resistance: float  # ohm

    def __post_init__(self) -> None:
        _require_positive("resistance", self.resistance)


def derive_equivalent_circuit(
    geom: PiezoMaterialGeometry, r_loss: float = math.inf
) -> PiezoEquivalentCircuit:
    """Reduce material/geometry constants to the lumped equivalent circuit.

    coupling = d31*l2/s11, c_mech = s11*l1/a1, c_clamped = a3*eps33/l3;
    c_total follows as coupling^2*c_mech + c_clamped.
    """
    coupling = geom.d31 * geom.l2 / geom.s11
    c_mech = geom.s11 * geom.l1 / geom.a1
    c_clamped = geom.a3 * geom.eps33 / geom.l3
    return PiezoEquivalentCircuit(
        coupling=coupling, c_mech=c_mech, c_clamped=c_clamped, r_loss=r_loss
    )


def inductor_quality_factor(ind: IntegratedInductor, omega0: float) -> float:
    """Quality factor omega0*L/Rs of the switching loop; inf for a lossless inductor."""
    _require_positive("omega0", omega0)
    if ind.r_series == 0.0:
        return math.inf
    return omega0 * ind.inductance / ind.r_series


def series_resistance_for_q(inductance: float, omega0: float, q: float) -> float:
    """Invert the quality factor: the Rs that gives the requested Q at omega0."""
    _require_positive("inductance", inductance)
    _require_positive("omega0", omega0)
    _require_positive("q", q)
    if math.isinf(q):
        return 0.0
    return omega0 * inductance / q
