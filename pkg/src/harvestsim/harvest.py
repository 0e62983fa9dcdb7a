"""Power-budget accounting, parameter sweeps, and closed-form vs oracle comparison."""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import (
    integrated_sshi_amplification,
    sshc_amplification,
    sshi_amplification,
    sshi_event_params,
    sshi_params,
)
from .models import (
    ExcitationSpec,
    IntegratedInductor,
    Load,
    PiezoEquivalentCircuit,
    ValidationError,
    _require_nonnegative,
)
from .transient import SimConfig, SimResult, simulate_sshc, simulate_sshi

DEFAULT_ACDC_OVERHEAD = 60e-9  # W
DEFAULT_CONTROL_OVERHEAD = 300e-9  # W


@dataclass(frozen=True)
class PowerBudget:
    """Rectifier-output power minus the AC/DC and switch-control overheads.

    Net power may be negative; the break-even point is itself a result.
    """

    gross: float
    acdc_overhead: float = DEFAULT_ACDC_OVERHEAD
    control_overhead: float = DEFAULT_CONTROL_OVERHEAD
    net: float = field(init=False)

    def __post_init__(self) -> None:
        _require_nonnegative("gross", self.gross)
        _require_nonnegative("acdc_overhead", self.acdc_overhead)
        _require_nonnegative("control_overhead", self.control_overhead)
        object.__setattr__(self, "net", self.gross - self.acdc_overhead - self.control_overhead)


def power_budget(
    gross: float,
    acdc_overhead: float = DEFAULT_ACDC_OVERHEAD,
    control_overhead: float = DEFAULT_CONTROL_OVERHEAD,
) -> PowerBudget:
    return PowerBudget(gross, acdc_overhead, control_overhead)


def mean_load_power(result: SimResult | float, load: Load, periods: int = 3) -> float:
    """Steady-state mean power into the load.

    For a SimResult, averages Vp^2/Rload over the last `periods` full excitation
    periods of the waveform (the run must have converged). A bare float is
    taken as a sinusoid amplitude, giving V0^2/(2*Rload).
    """
    if math.isinf(load.resistance):
        return 0.0
    if isinstance(result, SimResult):
        if not result.converged:
            raise ValidationError("result", "run did not converge; mean power undefined")
        w = result.waveform
        dt = float(w.t[1] - w.t[0])
        n = int(round(periods * result.period / dt))
        seg = w.vp[-(n + 1) :]
        return float(np.mean(seg * seg) / load.resistance)
    v0 = float(result)
    return v0 * v0 / (2.0 * load.resistance)


class SweepParam(enum.Enum):
    RLOAD = "rload"
    RS = "rs"
    L = "l"
    C_ADD = "c_add"
    T = "t"


class Evaluator(enum.Enum):
    ANALYTIC_SSHI_LITERAL = "analytic_sshi_literal"
    ANALYTIC_SSHI_ENVELOPE = "analytic_sshi_envelope"
    ANALYTIC_SSHC = "analytic_sshc"
    ANALYTIC_SSHI_INTEGRATED = "analytic_sshi_integrated"
    ORACLE_SSHI = "oracle_sshi"
    ORACLE_SSHC = "oracle_sshc"


_ORACLE = {Evaluator.ORACLE_SSHI, Evaluator.ORACLE_SSHC}


class Quantity(enum.Enum):
    AMPLIFICATION = "amplification"
    NET_POWER = "net_power"


@dataclass(frozen=True)
class SweepContext:
    """Fixed parameters a sweep varies around."""

    circuit: PiezoEquivalentCircuit
    excitation: ExcitationSpec
    load: Load
    inductor: IntegratedInductor | None = None
    c_add: float | None = None
    sim: SimConfig | None = None  # None -> built per point via SimConfig.for_run
    t_between: float | None = None  # analytic capacitor-switch interval; None -> half period
    acdc_overhead: float = DEFAULT_ACDC_OVERHEAD
    control_overhead: float = DEFAULT_CONTROL_OVERHEAD


@dataclass(frozen=True)
class SweepSpec:
    swept: SweepParam
    grid: tuple[float, ...]
    fixed: SweepContext
    evaluator: Evaluator
    quantity: Quantity = Quantity.AMPLIFICATION

    def __post_init__(self) -> None:
        if len(self.grid) == 0:
            raise ValidationError("grid", "must be non-empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValidationError("grid", "must be strictly increasing")
        low = min(self.grid)
        if not low > 0.0 and not (self.swept is SweepParam.RS and low >= 0.0):
            raise ValidationError("grid", f"values invalid for {self.swept.value}: {low!r}")
        if self.quantity is Quantity.NET_POWER and self.evaluator not in _ORACLE:
            raise ValidationError(
                "quantity", "net power needs a waveform, so it requires an oracle evaluator"
            )


@dataclass(frozen=True)
class SweepRow:
    swept_value: float
    result: float
    evaluator: Evaluator
    converged: bool
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("swept_value,result,evaluator,converged\n")
            for r in self.rows:
                fh.write(
                    f"{r.swept_value:.9g},{r.result:.9g},"
                    f"{r.evaluator.value},{str(r.converged).lower()}\n"
                )

    def to_json(self, path) -> None:
        ctx = self.spec.fixed
        payload = {
            "swept": self.spec.swept.value,
            "evaluator": self.spec.evaluator.value,
            "quantity": self.spec.quantity.value,
            "fixed": {
                "c_total": ctx.circuit.c_total,
                "r_loss": _json_float(ctx.circuit.r_loss),
                "frequency": ctx.excitation.frequency,
                "i_peak": ctx.excitation.source_current_peak(ctx.circuit),
                "phase": ctx.excitation.phase,
                "rload": _json_float(ctx.load.resistance),
                "inductance": ctx.inductor.inductance if ctx.inductor else None,
                "r_series": ctx.inductor.r_series if ctx.inductor else None,
                "c_add": _json_float(ctx.c_add) if ctx.c_add is not None else None,
                "t_between": ctx.t_between,
                "acdc_overhead": ctx.acdc_overhead,
                "control_overhead": ctx.control_overhead,
            },
            "rows": [
                {
                    "swept_value": r.swept_value,
                    "result": _json_float(r.result),
                    "converged": r.converged,
                    "error": r.error,
                }
                for r in self.rows
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _json_float(x: float | None):
    if x is None:
        return None
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return x


def _apply_swept(ctx: SweepContext, param: SweepParam, value: float) -> SweepContext:
    if param is SweepParam.RLOAD:
        return dataclasses.replace(ctx, load=Load(value))
    if param is SweepParam.RS:
        if ctx.inductor is None:
            raise ValidationError("inductor", "rs sweep needs an inductor in the fixed context")
        return dataclasses.replace(
            ctx, inductor=dataclasses.replace(ctx.inductor, r_series=value)
        )
    if param is SweepParam.L:
        if ctx.inductor is None:
            raise ValidationError("inductor", "l sweep needs an inductor in the fixed context")
        return dataclasses.replace(
            ctx, inductor=dataclasses.replace(ctx.inductor, inductance=value)
        )
    if param is SweepParam.C_ADD:
        return dataclasses.replace(ctx, c_add=value)
    # T: the interval between switch events; the oracle realizes it by running
    # the excitation whose half period equals the requested interval.
    return dataclasses.replace(
        ctx,
        t_between=value,
        excitation=dataclasses.replace(ctx.excitation, frequency=0.5 / value),
    )


def _sim_config(ctx: SweepContext, needs_ring: bool) -> SimConfig:
    if ctx.sim is not None:
        return ctx.sim
    if needs_ring:
        return SimConfig.for_run(
            ctx.excitation.frequency,
            ring_inductance=ctx.inductor.inductance,
            ring_capacitance=ctx.circuit.c_total,
        )
    return SimConfig.for_run(ctx.excitation.frequency)


def _evaluate_point(ctx: SweepContext, evaluator: Evaluator, quantity: Quantity):
    cp = ctx.circuit.c_total
    rload = ctx.load.resistance
    if evaluator in (Evaluator.ANALYTIC_SSHI_LITERAL, Evaluator.ANALYTIC_SSHI_ENVELOPE):
        if ctx.inductor is None:
            raise ValidationError("inductor", "switched-inductor evaluator needs an inductor")
        literal, envelope = sshi_amplification(
            sshi_params(ctx.inductor.inductance, cp, rload, ctx.inductor.r_series)
        )
        picked = literal if evaluator is Evaluator.ANALYTIC_SSHI_LITERAL else envelope
        return picked.value, True
    if evaluator is Evaluator.ANALYTIC_SSHI_INTEGRATED:
        if ctx.inductor is None:
            raise ValidationError("inductor", "switched-inductor evaluator needs an inductor")
        return integrated_sshi_amplification(ctx.inductor, cp, rload)[1].value, True
    if evaluator is Evaluator.ANALYTIC_SSHC:
        t = ctx.t_between
        if t is None:
            t = 0.5 / ctx.excitation.frequency
        return sshc_amplification(t, rload, cp).value, True
    if evaluator is Evaluator.ORACLE_SSHI:
        if ctx.inductor is None:
            raise ValidationError("inductor", "switched-inductor evaluator needs an inductor")
        res = simulate_sshi(
            ctx.circuit, ctx.excitation, ctx.load, ctx.inductor, _sim_config(ctx, True)
        )
    else:
        if ctx.c_add is None:
            raise ValidationError("c_add", "capacitor-switch oracle needs c_add")
        res = simulate_sshc(
            ctx.circuit, ctx.excitation, ctx.load, ctx.c_add, _sim_config(ctx, False)
        )
    if quantity is Quantity.NET_POWER:
        gross = mean_load_power(res, ctx.load)
        return power_budget(gross, ctx.acdc_overhead, ctx.control_overhead).net, res.converged
    return res.amplification, res.converged


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate every grid point independently; per-point failures land in the
    row (result nan, converged false) and never abort the sweep."""
    rows = []
    for value in spec.grid:
        try:
            ctx = _apply_swept(spec.fixed, spec.swept, value)
            result, converged = _evaluate_point(ctx, spec.evaluator, spec.quantity)
            rows.append(SweepRow(value, result, spec.evaluator, converged))
        except Exception as exc:  # recorded in-row by contract
            rows.append(SweepRow(value, math.nan, spec.evaluator, False, error=str(exc)))
    return SweepTable(spec=spec, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Closed-form vs oracle comparison


@dataclass(frozen=True)
class CompareRow:
    label: str
    r_load: float
    r_series: float
    oracle: float
    converged: bool
    values: dict  # formula name -> closed-form value
    gaps: dict  # formula name -> relative gap vs oracle


@dataclass(frozen=True)
class CompareReport:
    technique: str
    threshold: float
    rows: tuple[CompareRow, ...]
    max_gaps: dict
    tracking: tuple[str, ...]  # formulas whose worst-case gap stays within threshold

    def render(self) -> str:
        lines = [f"technique: {self.technique}"]
        names = sorted(self.max_gaps)
        header = "point".ljust(26) + "oracle".rjust(12)
        for n in names:
            header += f"{n:>14}{'gap[' + n + ']':>16}"
        lines.append(header)
        for r in self.rows:
            line = r.label.ljust(26) + f"{r.oracle:12.6g}"
            for n in names:
                line += f"{r.values[n]:14.6g}{r.gaps[n]:15.3%} "
            lines.append(line.rstrip())
        for n in names:
            lines.append(f"max relative gap [{n}]: {self.max_gaps[n]:.3%}")
        if self.tracking:
            which = ", ".join(self.tracking)
            lines.append(
                f"closed form tracking the oracle within {self.threshold:.0%}: {which}"
            )
        else:
            lines.append(
                f"no closed form tracks the oracle within {self.threshold:.0%}"
            )
        return "\n".join(lines)


def _gap(value: float, oracle: float) -> float:
    if not math.isfinite(value) or not math.isfinite(oracle) or oracle == 0.0:
        return math.inf
    return abs(value - oracle) / abs(oracle)


def sshi_point_from_targets(
    inductance: float, cp: float, frequency: float, q_target: float, alpha_rc_target: float
) -> tuple[float, float]:
    """(Rload, Rs) whose event-interval bundle hits the requested Q and decay factor.

    Rload realizes the between-event decay target; Rs supplies whatever loop
    damping the load does not already provide. Raises if the load loss alone
    exceeds the Q target.
    """
    if not 0.0 < alpha_rc_target < 1.0:
        raise ValidationError("alpha_rc", "target must lie in (0, 1)")
    r_load = 1.0 / (2.0 * frequency * cp * (-math.log(alpha_rc_target)))
    omega0 = math.sqrt(1.0 / (inductance * cp))
    for _ in range(3):  # Rs feeds back into omega0; fixed point converges immediately
        r_series = inductance * (omega0 / q_target - 1.0 / (r_load * cp))
        if r_series < 0.0:
            raise ValidationError(
                "q", f"load loss alone already exceeds the Q target {q_target!r}"
            )
        omega0 = math.sqrt((1.0 + r_series / r_load) / (inductance * cp))
    return r_load, r_series


def settle_sshi(
    circuit: PiezoEquivalentCircuit,
    excitation: ExcitationSpec,
    load: Load,
    inductor: IntegratedInductor,
    cfg: SimConfig,
    max_stages: int = 10,
) -> SimResult:
    """Run the switched-inductor oracle to steady state, chaining runs.

    High-gain operating points settle geometrically over many tens of periods;
    each stage restarts from the previous final voltage (stage boundaries fall
    on excitation-period boundaries, so the source phase lines up) until the
    run's own convergence detector is satisfied or max_stages is exhausted.
    """
    res = simulate_sshi(circuit, excitation, load, inductor, cfg)
    for _ in range(max_stages - 1):
        if res.converged:
            break
        cfg = dataclasses.replace(cfg, v0=float(res.waveform.vp[-1]))
        res = simulate_sshi(circuit, excitation, load, inductor, cfg)
    return res


def compare_sshi(
    inductance: float,
    cp: float,
    frequency: float,
    points,
    *,
    i_peak: float = 1e-6,
    threshold: float = 0.10,
    cycles: int = 16,
    max_stages: int = 10,
    r_loss: float = math.inf,
) -> CompareReport:
    """Comparison of the two switched-inductor closed forms against the
    transient oracle over a list of (Q, alpha_rc) operating points."""
    circuit = PiezoEquivalentCircuit.from_capacitance(cp, r_loss)
    rows = []
    for q, a in points:
        r_load, r_series = sshi_point_from_targets(inductance, cp, frequency, q, a)
        params = sshi_event_params(inductance, cp, r_load, r_series, frequency)
        literal, envelope = sshi_amplification(params)
        exc = ExcitationSpec(frequency=frequency, i_peak=i_peak)
        cfg = SimConfig.for_run(
            frequency, ring_inductance=inductance, ring_capacitance=cp, cycles=cycles
        )
        res = settle_sshi(
            circuit, exc, Load(r_load), IntegratedInductor(inductance, r_series), cfg,
            max_stages=max_stages,
        )
        values = {"literal": literal.value, "envelope": envelope.value}
        gaps = {k: _gap(v, res.amplification) for k, v in values.items()}
        rows.append(
            CompareRow(
                label=f"Q={q:g} alpha_rc={a:g}",
                r_load=r_load,
                r_series=r_series,
                oracle=res.amplification,
                converged=res.converged,
                values=values,
                gaps=gaps,
            )
        )
    return _build_report("sshi", threshold, rows)


def compare_sshc(
    cp: float,
    frequency: float,
    decay_exponents,
    *,
    c_add_ratio: float = 200.0,
    i_peak: float = 1e-6,
    threshold: float = 0.05,
    cycles: int = 14,
) -> CompareReport:
    """Grid comparison of the switched-capacitor closed form against the oracle;
    the grid is over x = T_between/(Rload*Cp)."""
    circuit = PiezoEquivalentCircuit.from_capacitance(cp)
    t_half = 0.5 / frequency
    rows = []
    for x in decay_exponents:
        if not x > 0.0:
            raise ValidationError("x", "decay exponent must be positive")
        r_load = t_half / (x * cp)
        analytic = sshc_amplification(t_half, r_load, cp).value
        exc = ExcitationSpec(frequency=frequency, i_peak=i_peak)
        cfg = SimConfig.for_run(frequency, cycles=cycles)
        res = simulate_sshc(circuit, exc, Load(r_load), c_add_ratio * cp, cfg)
        values = {"sshc": analytic}
        gaps = {"sshc": _gap(analytic, res.amplification)}
        rows.append(
            CompareRow(
                label=f"x={x:g}",
                r_load=r_load,
                r_series=0.0,
                oracle=res.amplification,
                converged=res.converged,
                values=values,
                gaps=gaps,
            )
        )
    return _build_report("sshc", threshold, rows)


def _build_report(technique: str, threshold: float, rows: list[CompareRow]) -> CompareReport:
    names = sorted(rows[0].values) if rows else []
    max_gaps = {n: max(r.gaps[n] for r in rows) for n in names}
    tracking = tuple(n for n in names if max_gaps[n] <= threshold)
    return CompareReport(
        technique=technique,
        threshold=threshold,
        rows=tuple(rows),
        max_gaps=max_gaps,
        tracking=tracking,
    )
