"""Brute-force time-domain simulator for the switched harvesting circuits.

Fixed-step RK4 over the piezo (current source || Cp || Rp || Rload) and
electromagnetic (voltage source + series Lm/Rm) equivalent circuits, with the
switch network triggered causally from detected voltage/current extrema. This
is the independent oracle every closed-form result is checked against.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analytic import lc_half_period
from .models import (
    EmEquivalentCircuit,
    ExcitationSpec,
    IntegratedInductor,
    Load,
    PiezoEquivalentCircuit,
    ValidationError,
)

_OPEN, _CLOSED_L, _CLOSED_C = 0, 1, 2


@dataclass(frozen=True)
class Peak:
    """One detected extremum: parabolic-refined time/value, +1 for max, -1 for min."""

    time: float
    value: float
    kind: int
    index: int  # raw sample index of the extremum


@dataclass(frozen=True)
class SwitchEvent:
    """One switch closure: state just before closing and just after opening."""

    t_close: float
    v_before: float
    t_open: float
    v_after: float
    branch_residual: float  # inductor current (piezo) or capacitor voltage (EM) at opening

    @property
    def inversion_ratio(self) -> float:
        if self.v_before == 0.0:
            return math.nan
        return abs(self.v_after / self.v_before)


@dataclass(frozen=True)
class CircuitState:
    """Snapshot of the simulated state at one instant."""

    t: float
    vp: float
    il: float
    vadd: float
    switch_closed: bool

    def stored_energy(self, cp: float, inductance: float = 0.0, c_add: float = 0.0) -> float:
        e = 0.5 * cp * self.vp * self.vp + 0.5 * inductance * self.il * self.il
        if c_add and not math.isinf(c_add):
            e += 0.5 * c_add * self.vadd * self.vadd
        return e


class CausalPeakDetector:
    """Streaming extremum detector over uniformly sampled data.

    An extremum is flagged when the discrete derivative changes sign; the
    reported time/value come from a parabola through the three surrounding
    samples. A run of zero derivatives is a plateau; if the derivative resumes
    with opposite sign the extremum is placed at the first plateau sample
    (no refinement). Emission is gated by `suppress_until` so callers can mask
    a refractory window after switch events; the internal state keeps evolving
    while suppressed. Only past samples are ever used, so the same detector
    can trigger switching causally during a simulation.
    """

    def __init__(self) -> None:
        self.suppress_until = -math.inf
        self._count = 0
        self._t1 = 0.0
        self._v1 = 0.0
        self._v2 = 0.0
        self._last_sign = 0
        self._plateau: tuple[float, float, int] | None = None  # (t, v, index) of first flat sample

    def push(self, t: float, v: float) -> Peak | None:
        count = self._count
        self._count = count + 1
        if count == 0:
            self._t1, self._v1 = t, v
            return None
        v1 = self._v1
        d = v - v1
        peak: Peak | None = None
        if d != 0.0:
            sign = 1 if d > 0.0 else -1
            if self._last_sign != 0 and sign != self._last_sign:
                kind = -sign  # falling after rising -> max, rising after falling -> min
                if self._plateau is not None:
                    pt, pv, pidx = self._plateau
                    peak = Peak(pt, pv, kind, pidx)
                else:
                    peak = self._refined(t, v, kind, count - 1)
                if peak.time < self.suppress_until:
                    peak = None
            self._last_sign = sign
            self._plateau = None
        elif self._plateau is None:
            self._plateau = (self._t1, v1, count - 1)
        self._v2 = v1
        self._t1, self._v1 = t, v
        return peak

    def _refined(self, t: float, v: float, kind: int, index: int) -> Peak:
        v0, v1 = self._v2, self._v1
        dt = t - self._t1
        denom = v0 - 2.0 * v1 + v
        if denom == 0.0:
            return Peak(self._t1, v1, kind, index)
        shift = 0.5 * (v0 - v) / denom
        return Peak(self._t1 + shift * dt, v1 - 0.25 * (v0 - v) * shift, kind, index)


def detect_peaks(t, v, refractory: float = 0.0) -> list[Peak]:
    """All extrema of a uniformly sampled waveform.

    After each emitted peak, detections within `refractory` seconds are masked,
    which keeps switch-event discontinuities from double-firing.
    """
    det = CausalPeakDetector()
    peaks: list[Peak] = []
    for tk, vk in zip(t, v):
        pk = det.push(float(tk), float(vk))
        if pk is not None:
            peaks.append(pk)
            if refractory > 0.0:
                det.suppress_until = pk.time + refractory
    return peaks


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step integration settings.

    The step guard dt <= min(T_ring/200, T_excitation/2000) depends on the
    circuit being run, so it is checked when a simulation starts; `for_run`
    builds a compliant dt up front. v0/vadd0, forced_switch_times and
    trigger_on_peaks are diagnostic hooks for driving isolated switch events.
    """

    dt: float
    cycles: int = 16
    steady_tol: float = 1e-3
    switch_on_duration: float | None = None  # capacitor technique only; None -> 10*R_on*Cp
    r_on: float = 0.0
    v0: float = 0.0
    vadd0: float = 0.0
    carry_storage_charge: bool = False
    trigger_on_peaks: bool = True
    forced_switch_times: tuple[float, ...] = ()
    refractory: float | None = None  # None -> switch duration + max(4*dt, 2% of period)

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ValidationError("dt", f"must be strictly positive, got {self.dt!r}")
        if self.cycles < 1:
            raise ValidationError("cycles", "must be at least 1")
        if not self.steady_tol > 0.0:
            raise ValidationError("steady_tol", "must be strictly positive")
        if self.r_on < 0.0:
            raise ValidationError("r_on", "must be non-negative")
        if self.switch_on_duration is not None and self.switch_on_duration < 0.0:
            raise ValidationError("switch_on_duration", "must be non-negative")

    @classmethod
    def for_run(
        cls,
        frequency: float,
        *,
        ring_inductance: float | None = None,
        ring_capacitance: float | None = None,
        steps_per_period: int = 2000,
        ring_steps: int = 200,
        **kwargs,
    ) -> "SimConfig":
        """Config with the largest dt satisfying the step guard, as an integer
        number of steps per excitation period."""
        period = 1.0 / frequency
        spp = max(steps_per_period, 2000)
        if ring_inductance is not None and ring_capacitance is not None:
            t_ring = lc_half_period(ring_inductance, ring_capacitance)
            spp = max(spp, math.ceil(ring_steps * period / t_ring))
        return cls(dt=period / spp, **kwargs)


def _check_step_guard(dt: float, period: float, t_ring: float | None) -> None:
    slack = 1.0 + 1e-9
    if dt > period / 2000.0 * slack:
        raise ValidationError(
            "dt", f"{dt!r} exceeds excitation-period guard {period / 2000.0!r}"
        )
    if t_ring is not None and dt > t_ring / 200.0 * slack:
        raise ValidationError("dt", f"{dt!r} exceeds ring guard {t_ring / 200.0!r}")


def _check_stiffness(dt: float, name: str, time_constant: float) -> None:
    if dt > 0.5 * time_constant:
        raise ValidationError(
            "dt", f"{dt!r} too coarse for the {name} time constant {time_constant!r}"
        )


@dataclass
class WaveformData:
    """Uniformly sampled run record; columns match the CSV export."""

    t: np.ndarray
    vp: np.ndarray
    il: np.ndarray
    vadd: np.ndarray
    switch: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("t,Vp,IL,Vadd,switch\n")
            for row in zip(self.t, self.vp, self.il, self.vadd, self.switch):
                fh.write(f"{row[0]!r},{row[1]!r},{row[2]!r},{row[3]!r},{int(row[4])}\n")


@dataclass
class SimResult:
    """Outcome of one transient run.

    `amplitude` is the steady-state half peak-to-peak excursion of the primary
    signal (piezo voltage, or loop current for the electromagnetic circuit),
    averaged over the last three excitation periods. `amplification` is that
    amplitude divided by the same measurement on a no-switching baseline run
    with identical circuit, excitation, load and config.
    """

    waveform: WaveformData
    peaks: list[Peak]
    events: list[SwitchEvent]
    period: float
    period_amplitudes: np.ndarray
    amplitude: float
    converged: bool
    amplification: float = math.nan
    baseline_amplitude: float = math.nan
    _cp: float = field(default=0.0, repr=False)
    _inductance: float = field(default=0.0, repr=False)
    _c_add: float = field(default=0.0, repr=False)

    def state_at(self, i: int) -> CircuitState:
        w = self.waveform
        return CircuitState(
            t=float(w.t[i]),
            vp=float(w.vp[i]),
            il=float(w.il[i]),
            vadd=float(w.vadd[i]),
            switch_closed=bool(w.switch[i]),
        )

    @property
    def final_state(self) -> CircuitState:
        return self.state_at(len(self.waveform.t) - 1)

    def energy_series(self) -> np.ndarray:
        """Stored energy at each sample; infinite storage capacitors are treated
        as ideal sinks and excluded."""
        w = self.waveform
        e = 0.5 * self._cp * w.vp**2 + 0.5 * self._inductance * w.il**2
        if self._c_add and not math.isinf(self._c_add):
            e = e + 0.5 * self._c_add * w.vadd**2
        return e

    def to_csv(self, path) -> None:
        self.waveform.to_csv(path)


def _period_stats(sig: np.ndarray, period: float, dt: float, cycles: int, tol: float):
    spp = period / dt
    bounds = [int(round(k * spp)) for k in range(cycles + 1)]
    bounds[-1] = min(bounds[-1], len(sig) - 1)
    amps = np.empty(cycles)
    for k in range(cycles):
        seg = sig[bounds[k] : bounds[k + 1] + 1]
        amps[k] = 0.5 * (seg.max() - seg.min())
    if cycles < 3:
        return amps, float(amps[-1]), False
    last = amps[-3:]
    top = last.max()
    converged = top == 0.0 or (top - last.min()) <= tol * top
    return amps, float(last.mean()), converged


def _forced_steps(times: tuple[float, ...], dt: float, n_total: int) -> list[int]:
    # snapped to step boundaries; duplicates collapse to one closure
    return sorted({min(max(int(round(t / dt)), 1), n_total) for t in times})


def _run_piezo(
    circuit: PiezoEquivalentCircuit,
    excitation: ExcitationSpec,
    load: Load,
    cfg: SimConfig,
    technique: int,
    inductor: IntegratedInductor | None = None,
    c_add: float | None = None,
) -> SimResult:
    f = excitation.frequency
    period = 1.0 / f
    w = 2.0 * math.pi * f
    cp = circuit.c_total
    i0 = excitation.source_current_peak(circuit)
    phase = excitation.phase
    dt = cfg.dt

    g_leak = 0.0
    if not math.isinf(circuit.r_loss):
        g_leak += 1.0 / circuit.r_loss
    if not math.isinf(load.resistance):
        g_leak += 1.0 / load.resistance

    t_ring = None
    dur_steps = 0
    r_branch = 0.0
    inv_l = 0.0
    inv_c_add = 0.0
    inv_r_on = 0.0
    if technique == _CLOSED_L:
        t_ring = lc_half_period(inductor.inductance, cp)
        dur_steps = max(1, int(round(t_ring / dt)))
        r_branch = inductor.r_series + cfg.r_on
        inv_l = 1.0 / inductor.inductance
        if r_branch > 0.0:
            _check_stiffness(dt, "inductor branch", inductor.inductance / r_branch)
        closed_time = t_ring
    elif technique == _CLOSED_C:
        if c_add < 10.0 * cp:
            warnings.warn(
                f"storage capacitor {c_add!r} F is below the recommended 10x "
                f"piezo capacitance ({cp!r} F)",
                stacklevel=3,
            )
        duration = cfg.switch_on_duration
        if duration is None:
            duration = 10.0 * cfg.r_on * cp
        if duration > 0.0 and cfg.r_on <= 0.0:
            raise ValidationError("r_on", "timed capacitor switching requires r_on > 0")
        if duration > 0.0:
            c_ser = cp if math.isinf(c_add) else cp * c_add / (cp + c_add)
            _check_stiffness(dt, "switch branch", cfg.r_on * c_ser)
            dur_steps = max(1, int(round(duration / dt)))
            inv_r_on = 1.0 / cfg.r_on
        if not math.isinf(c_add):
            inv_c_add = 1.0 / c_add
        closed_time = duration
    else:
        closed_time = 0.0

    _check_step_guard(dt, period, t_ring)
    if g_leak > 0.0:
        _check_stiffness(dt, "load/leakage", cp / g_leak)

    n_total = int(round(cfg.cycles * period / dt))
    grid = np.arange(n_total + 1, dtype=np.float64) * dt
    src_full = (i0 * np.sin(w * grid + phase)).tolist()
    src_half = (i0 * np.sin(w * (grid + 0.5 * dt) + phase)).tolist()
    times = grid.tolist()

    refractory = cfg.refractory
    if refractory is None:
        # A quarter-period debounce emulates the half-period-synchronized
        # controller: it masks the small recovery extremum the load's RC pull
        # creates right after an event, without touching the genuine extrema
        # half a period apart.
        refractory = closed_time + max(4.0 * dt, 0.25 * period)

    inv_cp = 1.0 / cp
    half_dt = 0.5 * dt
    sixth = dt / 6.0

    v = cfg.v0
    j = 0.0
    u = cfg.vadd0
    mode = _OPEN
    open_at = -1
    switched = technique != _OPEN

    vp_list = [v]
    il_list = [0.0]
    vadd_list = [u]
    sw_list: list[int] = []
    peaks: list[Peak] = []
    events: list[SwitchEvent] = []
    pending: dict | None = None
    instant_marks: list[int] = []

    det = CausalPeakDetector()
    det.push(times[0], v)
    forced = _forced_steps(cfg.forced_switch_times, dt, n_total)
    forced_ptr = 0
    g = g_leak

    for k in range(n_total):
        sw_list.append(1 if mode != _OPEN else 0)
        s0 = src_full[k]
        sh = src_half[k]
        s1 = src_full[k + 1]
        if mode == _OPEN:
            a1 = (s0 - g * v) * inv_cp
            vm = v + half_dt * a1
            a2 = (sh - g * vm) * inv_cp
            vm = v + half_dt * a2
            a3 = (sh - g * vm) * inv_cp
            vm = v + dt * a3
            a4 = (s1 - g * vm) * inv_cp
            v += sixth * (a1 + 2.0 * (a2 + a3) + a4)
        elif mode == _CLOSED_L:
            k1v = (s0 - g * v - j) * inv_cp
            k1j = (v - r_branch * j) * inv_l
            v2 = v + half_dt * k1v
            j2 = j + half_dt * k1j
            k2v = (sh - g * v2 - j2) * inv_cp
            k2j = (v2 - r_branch * j2) * inv_l
            v3 = v + half_dt * k2v
            j3 = j + half_dt * k2j
            k3v = (sh - g * v3 - j3) * inv_cp
            k3j = (v3 - r_branch * j3) * inv_l
            v4 = v + dt * k3v
            j4 = j + dt * k3j
            k4v = (s1 - g * v4 - j4) * inv_cp
            k4j = (v4 - r_branch * j4) * inv_l
            v += sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
            j += sixth * (k1j + 2.0 * (k2j + k3j) + k4j)
        else:  # _CLOSED_C with r_on > 0
            i1 = (v - u) * inv_r_on
            k1v = (s0 - g * v - i1) * inv_cp
            k1u = i1 * inv_c_add
            v2 = v + half_dt * k1v
            u2 = u + half_dt * k1u
            i2 = (v2 - u2) * inv_r_on
            k2v = (sh - g * v2 - i2) * inv_cp
            k2u = i2 * inv_c_add
            v3 = v + half_dt * k2v
            u3 = u + half_dt * k2u
            i3 = (v3 - u3) * inv_r_on
            k3v = (sh - g * v3 - i3) * inv_cp
            k3u = i3 * inv_c_add
            v4 = v + dt * k3v
            u4 = u + dt * k3u
            i4 = (v4 - u4) * inv_r_on
            k4v = (s1 - g * v4 - i4) * inv_cp
            k4u = i4 * inv_c_add
            v += sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
            u += sixth * (k1u + 2.0 * (k2u + k3u) + k4u)

        kk = k + 1
        t1 = times[kk]
        il_val = j
        if mode != _OPEN and kk == open_at:
            events.append(
                SwitchEvent(
                    t_close=pending["t"],
                    v_before=pending["v"],
                    t_open=t1,
                    v_after=v,
                    branch_residual=j,
                )
            )
            pending = None
            j = 0.0
            mode = _OPEN

        pk = det.push(t1, v)
        fire = False
        if pk is not None:
            peaks.append(pk)
            if switched and cfg.trigger_on_peaks and mode == _OPEN:
                fire = True
        if forced_ptr < len(forced) and forced[forced_ptr] == kk:
            forced_ptr += 1
            if mode == _OPEN:
                fire = True

        if fire:
            det.suppress_until = t1 + refractory
            if technique == _CLOSED_L:
                pending = {"t": t1, "v": v}
                j = 0.0
                mode = _CLOSED_L
                open_at = kk + dur_steps
            elif dur_steps == 0:  # instantaneous charge redistribution
                v_before = v
                u0 = u if cfg.carry_storage_charge else 0.0
                if math.isinf(c_add):
                    v = u0
                else:
                    v = (cp * v_before + c_add * u0) / (cp + c_add)
                    u = v
                events.append(
                    SwitchEvent(
                        t_close=t1, v_before=v_before, t_open=t1, v_after=v, branch_residual=0.0
                    )
                )
                instant_marks.append(kk)
            else:
                pending = {"t": t1, "v": v}
                if not cfg.carry_storage_charge:
                    u = 0.0
                mode = _CLOSED_C
                open_at = kk + dur_steps

        vp_list.append(v)
        il_list.append(il_val)
        vadd_list.append(u)

    sw_list.append(0)
    sw = np.asarray(sw_list, dtype=np.uint8)
    for idx in instant_marks:
        sw[idx] = 1

    vp = np.asarray(vp_list)
    waveform = WaveformData(
        t=grid, vp=vp, il=np.asarray(il_list), vadd=np.asarray(vadd_list), switch=sw
    )
    amps, amplitude, converged = _period_stats(vp, period, dt, cfg.cycles, cfg.steady_tol)
    return SimResult(
        waveform=waveform,
        peaks=peaks,
        events=events,
        period=period,
        period_amplitudes=amps,
        amplitude=amplitude,
        converged=converged,
        _cp=cp,
        _inductance=inductor.inductance if inductor is not None else 0.0,
        _c_add=c_add if c_add is not None else 0.0,
    )


def _with_amplification(switched: SimResult, baseline: SimResult) -> SimResult:
    switched.baseline_amplitude = baseline.amplitude
    if baseline.amplitude > 0.0:
        switched.amplification = switched.amplitude / baseline.amplitude
    switched.converged = switched.converged and baseline.converged
    return switched


def _piezo_steady_v0(
    circuit: PiezoEquivalentCircuit, excitation: ExcitationSpec, load: Load
) -> float:
    """Particular-solution value at t=0 of the unswitched single-pole stage.

    Used to start internal baseline runs already on their steady orbit; the
    steady state of the stable linear stage does not depend on the initial
    condition, so this only removes the startup transient.
    """
    g = 0.0
    if not math.isinf(circuit.r_loss):
        g += 1.0 / circuit.r_loss
    if not math.isinf(load.resistance):
        g += 1.0 / load.resistance
    w = 2.0 * math.pi * excitation.frequency
    i0 = excitation.source_current_peak(circuit)
    amp = i0 / math.hypot(g, w * circuit.c_total)
    shift = math.atan2(w * circuit.c_total, g)
    return amp * math.sin(excitation.phase - shift)


def _baseline_cfg(cfg: SimConfig, v0: float) -> SimConfig:
    return dataclasses.replace(
        cfg, v0=v0, vadd0=0.0, forced_switch_times=(), trigger_on_peaks=True
    )


def simulate_baseline(
    circuit: PiezoEquivalentCircuit, excitation: ExcitationSpec, load: Load, cfg: SimConfig
) -> SimResult:
    """No-switching reference run; its own amplification is 1 by definition."""
    res = _run_piezo(circuit, excitation, load, cfg, _OPEN)
    res.amplification = 1.0
    res.baseline_amplitude = res.amplitude
    return res


def simulate_sshi(
    circuit: PiezoEquivalentCircuit,
    excitation: ExcitationSpec,
    load: Load,
    inductor: IntegratedInductor,
    cfg: SimConfig,
) -> SimResult:
    """Switched-inductor run: at each voltage extremum the inductor is connected
    for half an L-Cp ring period, inverting the piezo voltage; residual branch
    current at opening is recorded on the event."""
    switched = _run_piezo(circuit, excitation, load, cfg, _CLOSED_L, inductor=inductor)
    bcfg = _baseline_cfg(cfg, _piezo_steady_v0(circuit, excitation, load))
    baseline = _run_piezo(circuit, excitation, load, bcfg, _OPEN)
    return _with_amplification(switched, baseline)


def simulate_sshc(
    circuit: PiezoEquivalentCircuit,
    excitation: ExcitationSpec,
    load: Load,
    c_add: float,
    cfg: SimConfig,
) -> SimResult:
    """Switched-capacitor run: at each voltage extremum the piezo charge is
    dumped into the storage capacitor (instantaneous for r_on = 0, otherwise
    through r_on for the configured on-duration). The storage capacitor is
    emptied before each event unless carry_storage_charge is set."""
    if not c_add > 0.0:
        raise ValidationError("c_add", f"must be strictly positive, got {c_add!r}")
    switched = _run_piezo(circuit, excitation, load, cfg, _CLOSED_C, c_add=c_add)
    bcfg = _baseline_cfg(cfg, _piezo_steady_v0(circuit, excitation, load))
    baseline = _run_piezo(circuit, excitation, load, bcfg, _OPEN)
    return _with_amplification(switched, baseline)


def _run_em(
    em: EmEquivalentCircuit, load: Load, c_switch: float | None, cfg: SimConfig
) -> SimResult:
    f = em.frequency
    period = 1.0 / f
    w = 2.0 * math.pi * f
    dt = cfg.dt
    if math.isinf(load.resistance):
        raise ValidationError("resistance", "series load must be finite for the EM circuit")
    r_tot = em.rm + load.resistance + (cfg.r_on if c_switch is not None else 0.0)

    t_ring = None
    dur_steps = 0
    inv_csw = 0.0
    if c_switch is not None:
        if not c_switch > 0.0:
            raise ValidationError("c_switch", f"must be strictly positive, got {c_switch!r}")
        t_ring = lc_half_period(em.lm, c_switch)
        dur_steps = max(1, int(round(t_ring / dt)))
        inv_csw = 1.0 / c_switch
    _check_step_guard(dt, period, t_ring)
    if r_tot > 0.0:
        _check_stiffness(dt, "loop resistance", em.lm / r_tot)

    n_total = int(round(cfg.cycles * period / dt))
    grid = np.arange(n_total + 1, dtype=np.float64) * dt
    src_full = (em.v_amp * np.sin(w * grid)).tolist()
    src_half = (em.v_amp * np.sin(w * (grid + 0.5 * dt))).tolist()
    times = grid.tolist()

    refractory = cfg.refractory
    if refractory is None:
        refractory = (t_ring or 0.0) + max(4.0 * dt, 0.25 * period)

    inv_lm = 1.0 / em.lm
    half_dt = 0.5 * dt
    sixth = dt / 6.0

    i = cfg.v0  # primary state: loop current (initial value reuses the v0 hook)
    vc = 0.0
    mode = _OPEN
    open_at = -1
    switched = c_switch is not None

    i_list = [i]
    vc_list = [vc]
    sw_list: list[int] = []
    peaks: list[Peak] = []
    events: list[SwitchEvent] = []
    pending: dict | None = None

    det = CausalPeakDetector()
    det.push(times[0], i)
    forced = _forced_steps(cfg.forced_switch_times, dt, n_total)
    forced_ptr = 0

    for k in range(n_total):
        sw_list.append(1 if mode != _OPEN else 0)
        s0 = src_full[k]
        sh = src_half[k]
        s1 = src_full[k + 1]
        if mode == _OPEN:
            a1 = (s0 - r_tot * i) * inv_lm
            im = i + half_dt * a1
            a2 = (sh - r_tot * im) * inv_lm
            im = i + half_dt * a2
            a3 = (sh - r_tot * im) * inv_lm
            im = i + dt * a3
            a4 = (s1 - r_tot * im) * inv_lm
            i += sixth * (a1 + 2.0 * (a2 + a3) + a4)
        else:
            k1i = (s0 - r_tot * i - vc) * inv_lm
            k1c = i * inv_csw
            i2 = i + half_dt * k1i
            c2 = vc + half_dt * k1c
            k2i = (sh - r_tot * i2 - c2) * inv_lm
            k2c = i2 * inv_csw
            i3 = i + half_dt * k2i
            c3 = vc + half_dt * k2c
            k3i = (sh - r_tot * i3 - c3) * inv_lm
            k3c = i3 * inv_csw
            i4 = i + dt * k3i
            c4 = vc + dt * k3c
            k4i = (s1 - r_tot * i4 - c4) * inv_lm
            k4c = i4 * inv_csw
            i += sixth * (k1i + 2.0 * (k2i + k3i) + k4i)
            vc += sixth * (k1c + 2.0 * (k2c + k3c) + k4c)

        kk = k + 1
        t1 = times[kk]
        vc_val = vc
        if mode != _OPEN and kk == open_at:
            events.append(
                SwitchEvent(
                    t_close=pending["t"],
                    v_before=pending["v"],
                    t_open=t1,
                    v_after=i,
                    branch_residual=vc,
                )
            )
            pending = None
            vc = 0.0
            mode = _OPEN

        pk = det.push(t1, i)
        fire = False
        if pk is not None:
            peaks.append(pk)
            if switched and cfg.trigger_on_peaks and mode == _OPEN:
                fire = True
        if forced_ptr < len(forced) and forced[forced_ptr] == kk:
            forced_ptr += 1
            if mode == _OPEN:
                fire = True
        if fire:
            det.suppress_until = t1 + refractory
            pending = {"t": t1, "v": i}
            vc = 0.0
            mode = _CLOSED_C
            open_at = kk + dur_steps

        i_list.append(i)
        vc_list.append(vc_val)

    sw_list.append(0)
    current = np.asarray(i_list)
    waveform = WaveformData(
        t=grid,
        vp=current * load.resistance,  # load voltage
        il=current,
        vadd=np.asarray(vc_list),
        switch=np.asarray(sw_list, dtype=np.uint8),
    )
    amps, amplitude, converged = _period_stats(current, period, dt, cfg.cycles, cfg.steady_tol)
    return SimResult(
        waveform=waveform,
        peaks=peaks,
        events=events,
        period=period,
        period_amplitudes=amps,
        amplitude=amplitude,
        converged=converged,
        _cp=c_switch if c_switch is not None else 0.0,
        _inductance=em.lm,
        _c_add=0.0,
    )


def simulate_em_sshc(
    em: EmEquivalentCircuit, load: Load, c_switch: float, cfg: SimConfig
) -> SimResult:
    """Switched-capacitor run on the electromagnetic dual circuit.

    The roles swap under duality: the coil current is the amplified quantity,
    and a series capacitor (reset to zero charge, inserted for half an Lm-C
    ring period at each current extremum) inverts it, exactly as the parallel
    inductor inverts the piezo voltage. Amplification is the steady-state loop
    current amplitude over a no-switching baseline.
    """
    switched = _run_em(em, load, c_switch, cfg)
    r = em.rm + load.resistance
    w = 2.0 * math.pi * em.frequency
    i_steady = em.v_amp / math.hypot(r, w * em.lm) * math.sin(-math.atan2(w * em.lm, r))
    baseline = _run_em(em, load, None, _baseline_cfg(cfg, i_steady))
    return _with_amplification(switched, baseline)
