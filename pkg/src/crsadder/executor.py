"""Program execution at two fidelity levels, plus pulse calibration.

Behavioral level: every cell is a one-bit state machine updated by
fsm_next with the step's resolved logic levels; reads return the stored
bit and leave the cell at ONE.

Device level: every cell is a pair of ECM gap states.  Each step becomes
one rectangular pulse of width t_pulse; line levels map to potentials
('1' -> +V_w/2, '0' -> -V_w/2, ground -> 0) so intended writes see the
full +-V_w, holds see 0, and every other touched cell sees at most
V_w/2, which calibrated kinetics keep harmless.  Reads are destructive
current-spike detections against the i_spike threshold.  A
read-and-forward step splits its window: the read occupies the first
half, the forwarded value drives the target bitline during the second
half (the calibration margin makes half a window sufficient to switch).

Wires are ideal: line potentials reach every cell unattenuated, so cells
decouple and each advances independently under its own applied voltage.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from .crs import (
    CrsLogicState,
    crs_pulse,
    crs_state_for_bit,
    decode_state,
    fsm_next,
)
from .ecm import EcmParams, params_text
from .logic import word_to_str
from .microcode import Program, validate_program


class ExecutionError(RuntimeError):
    """Program not executable: bad operands or unresolvable signals."""


class CalibrationError(RuntimeError):
    """No pulse parameters satisfied the select/half-select constraints."""

    def __init__(self, message, report):
        super().__init__(message + "\n" + json.dumps(report, indent=2,
                                                     sort_keys=True))
        self.report = report


@dataclass(frozen=True)
class PulseParams:
    v_w: float                    # full-select write amplitude, V
    t_pulse: float                # pulse width, s
    t_gap: float = 0.0            # settle time between steps, s
    samples_per_pulse: int = 40
    i_spike: float = 1e-6         # read spike detection threshold, A

    def __post_init__(self):
        if self.v_w <= 0 or self.t_pulse <= 0 or self.i_spike <= 0:
            raise ValueError("v_w, t_pulse and i_spike must be > 0")
        if self.t_gap < 0 or self.samples_per_pulse < 2:
            raise ValueError("t_gap >= 0 and samples_per_pulse >= 2 required")


@dataclass(frozen=True)
class ReadRecord:
    step_index: int
    cell: str
    latch: str | None
    spike: bool
    bit: int
    peak_current: float | None   # None at behavioral level


@dataclass(frozen=True)
class StepRecord:
    index: int
    annotation: str
    wl_levels: dict               # "A<array>" -> level
    bl_levels: dict               # "A<array>/<bl>" -> level
    cell_states: dict             # cell addr str -> "0"/"1" after the step


@dataclass(frozen=True)
class ExecTrace:
    level: str                    # "behavioral" | "device"
    scheme: str
    n: int
    steps: tuple[StepRecord, ...]
    reads: tuple[ReadRecord, ...]
    result_bits: tuple[int, ...]
    samples: tuple = ()           # device level: waveform rows
    sample_columns: tuple = ()

    @property
    def result_str(self):
        return word_to_str(list(self.result_bits))


# ======================================================================
# signal resolution (shared by both levels)
# ======================================================================

def _check_operands(p, a_bits, b_bits, c0):
    if len(a_bits) != p.n or len(b_bits) != p.n:
        raise ExecutionError(
            f"operands must be {p.n} bits, got {len(a_bits)} and {len(b_bits)}")
    for bit in (*a_bits, *b_bits, c0):
        if bit not in (0, 1):
            raise ExecutionError(f"operand bits must be 0/1, got {bit!r}")
    diags = validate_program(p)
    if diags:
        raise ExecutionError("invalid program: " + "; ".join(diags))


def _resolve(sig, a_bits, b_bits, c0, registers, forwards):
    """Signal -> logic level: 0, 1 or the string 'ground'."""
    k = sig.kind
    if k == "ground":
        return "ground"
    if k == "const0":
        return 0
    if k == "const1":
        return 1
    if k == "carry_in":
        return c0
    if k == "a":
        return a_bits[sig.index]
    if k == "b":
        return b_bits[sig.index]
    if k == "not_b":
        return 1 - b_bits[sig.index]
    if k == "reg":
        if sig.name not in registers:
            raise ExecutionError(f"register {sig.name!r} read before latch")
        return registers[sig.name]
    if k == "read_fwd":
        key = str(sig.source)
        if key not in forwards:
            raise ExecutionError(
                f"forward from {sig.source} which is not read this cycle")
        return forwards[key]
    raise ExecutionError(f"unresolvable signal kind {k!r}")


def _index_errors(p, sig):
    if sig.kind in ("a", "b", "not_b") and sig.index >= p.n:
        raise ExecutionError(f"signal {sig} out of range for n={p.n}")


# ======================================================================
# behavioral level
# ======================================================================

def run_behavioral(p, a_bits, b_bits, c0=0):
    """Execute on the one-bit state-machine array; returns an ExecTrace."""
    _check_operands(p, a_bits, b_bits, c0)
    c0_eff = 1 if p.subtract else c0
    state = {str(c): 0 for c in p.used_cells}
    by_line = {}
    for c in p.used_cells:
        by_line.setdefault((c.array, c.wl), {})[c.bl] = str(c)
    registers = {}
    step_records = []
    read_records = []
    for si, step in enumerate(p.steps):
        # reads resolve before writes: the read-out value is available
        # to this step's forwarded signals, and the read cell is ONE
        # when the step's own drive acts on it
        forwards = {}
        for r in step.reads:
            key = str(r.cell)
            bit = state[key]
            state[key] = 1
            forwards[key] = bit
            if r.latch:
                registers[r.latch] = bit
            read_records.append(ReadRecord(si, key, r.latch,
                                           spike=(bit == 0), bit=bit,
                                           peak_current=None))
        wl_levels = {}
        bl_levels = {}
        for d in step.drives:
            for sig in (d.wl, *d.bls):
                _index_errors(p, sig)
            w = _resolve(d.wl, a_bits, b_bits, c0_eff, registers, forwards)
            wl_levels[f"A{d.array}"] = w
            cells = by_line.get((d.array, d.wl_index), {})
            for bl, sig in enumerate(d.bls):
                b = _resolve(sig, a_bits, b_bits, c0_eff, registers, forwards)
                bl_levels[f"A{d.array}/{bl}"] = b
                key = cells.get(bl)
                if key is None:
                    continue
                if w == "ground" or b == "ground":
                    continue   # half-selected: holds
                state[key] = fsm_next(state[key], w, b)
        step_records.append(StepRecord(si, step.annotation, wl_levels,
                                       bl_levels, dict(state)))
    result = []
    for c in p.result_cells:
        bit = state[str(c)]
        state[str(c)] = 1
        read_records.append(ReadRecord(len(p.steps), str(c), None,
                                       spike=(bit == 0), bit=bit,
                                       peak_current=None))
        result.append(bit)
    return ExecTrace("behavioral", p.scheme, p.n, tuple(step_records),
                     tuple(read_records), tuple(result))


# ======================================================================
# device level
# ======================================================================

def _level_voltage(level, v_w):
    if level == "ground":
        return 0.0
    return 0.5 * v_w if level == 1 else -0.5 * v_w


def readout_cell(level, cell_state, pp=None, ep=None):
    """Destructive read of one cell at either fidelity level.

    Returns (bit, spike, state_after).  Behavioral cell_state is a bit;
    device cell_state is a CrsDeviceState.
    """
    if level == "behavioral":
        bit = cell_state
        return bit, bit == 0, 1
    s_after, peak, _ = crs_pulse(cell_state, pp.v_w, pp.t_pulse, ep,
                                 n_samples=pp.samples_per_pulse)
    spike = peak > pp.i_spike
    bit = 0 if spike else 1
    if decode_state(s_after, ep.gap_midpoint()) is not CrsLogicState.ONE:
        raise ExecutionError("read did not leave the cell at ONE")
    return bit, spike, s_after


def run_device(p, a_bits, b_bits, c0=0, pp=None, ep=None):
    """Execute as pulse waveforms over ECM pairs; returns an ExecTrace.

    Every used cell starts at ZERO (the init read makes the outcome
    independent of prior content).  Waveform samples cover each pulse
    window; settle gaps are skipped analytically since unbiased cells
    do not move.
    """
    if pp is None or ep is None:
        raise ExecutionError("device level needs pulse and cell parameters")
    _check_operands(p, a_bits, b_bits, c0)
    c0_eff = 1 if p.subtract else c0
    mid = ep.gap_midpoint()
    states = {str(c): crs_state_for_bit(0, ep) for c in p.used_cells}
    by_line = {}
    cells_on_bl = {}
    for c in p.used_cells:
        by_line.setdefault((c.array, c.wl), {})[c.bl] = str(c)
        cells_on_bl.setdefault((c.array, c.bl), []).append(str(c))
    bl_keys = sorted(cells_on_bl)
    wl_keys = sorted({(c.array, c.wl) for c in p.used_cells})
    sample_columns = (["time_s", "step_index", "annotation"]
                      + [f"v_wl_{a}_{w}" for (a, w) in wl_keys]
                      + [f"i_bl_{a}_{b}" for (a, b) in bl_keys])

    registers = {}
    step_records = []
    read_records = []
    samples = []
    t_now = 0.0

    def pulse_cells(volt_of, duration, n_samples, t0, si, annot, wl_volts):
        """Advance every cell under its applied voltage; sample currents."""
        waves = {}
        peaks = {}
        for key, v in volt_of.items():
            if v == 0.0:
                waves[key] = None
                peaks[key] = 0.0
                continue
            s_new, peak, rows = crs_pulse(states[key], v, duration, ep,
                                          n_samples=n_samples)
            states[key] = s_new
            waves[key] = rows
            peaks[key] = peak
        for j in range(n_samples):
            row = [t0 + (j + 1) * duration / n_samples, si, annot]
            row += [wl_volts.get(k, 0.0) for k in wl_keys]
            for bk in bl_keys:
                i_bl = 0.0
                for key in cells_on_bl[bk]:
                    if waves.get(key) is not None:
                        i_bl += waves[key][j][2]
                row.append(i_bl)
            samples.append(tuple(row))
        return peaks

    for si, step in enumerate(p.steps):
        for d in step.drives:
            for sig in (d.wl, *d.bls):
                _index_errors(p, sig)
        has_forward = any(sig.kind == "read_fwd"
                          for d in step.drives for sig in d.bls)

        def line_voltages(forwards, forward_pending):
            wl_volts = {}
            volt_of = {}
            bl_levels = {}
            wl_levels = {}
            for d in step.drives:
                w = _resolve(d.wl, a_bits, b_bits, c0_eff, registers,
                             forwards)
                wl_levels[f"A{d.array}"] = w
                v_wl = _level_voltage(w, pp.v_w)
                wl_volts[(d.array, d.wl_index)] = v_wl
                cells = by_line.get((d.array, d.wl_index), {})
                for bl, sig in enumerate(d.bls):
                    if sig.kind == "read_fwd" and forward_pending:
                        lvl = "ground"   # undriven until the read lands
                    else:
                        lvl = _resolve(sig, a_bits, b_bits, c0_eff,
                                       registers, forwards)
                    bl_levels[f"A{d.array}/{bl}"] = lvl
                    key = cells.get(bl)
                    if key is not None:
                        volt_of[key] = v_wl - _level_voltage(lvl, pp.v_w)
            return wl_volts, volt_of, wl_levels, bl_levels

        if not has_forward:
            wl_volts, volt_of, wl_levels, bl_levels = line_voltages({}, False)
            peaks = pulse_cells(volt_of, pp.t_pulse, pp.samples_per_pulse,
                                t_now, si, step.annotation, wl_volts)
            t_now += pp.t_pulse
            for r in step.reads:
                key = str(r.cell)
                peak = peaks[key]
                spike = peak > pp.i_spike
                bit = 0 if spike else 1
                if r.latch:
                    registers[r.latch] = bit
                read_records.append(ReadRecord(si, key, r.latch, spike, bit,
                                               peak))
        else:
            # split window: read during the first half, then drive the
            # forwarded value during the second
            half = 0.5 * pp.t_pulse
            half_samples = max(2, pp.samples_per_pulse // 2)
            wl_volts, volt_of, wl_levels, _ = line_voltages({}, True)
            peaks = pulse_cells(volt_of, half, half_samples,
                                t_now, si, step.annotation, wl_volts)
            forwards = {}
            for r in step.reads:
                key = str(r.cell)
                peak = peaks[key]
                spike = peak > pp.i_spike
                bit = 0 if spike else 1
                forwards[key] = bit
                if r.latch:
                    registers[r.latch] = bit
                read_records.append(ReadRecord(si, key, r.latch, spike, bit,
                                               peak))
            wl_volts, volt_of, wl_levels, bl_levels = line_voltages(
                forwards, False)
            pulse_cells(volt_of, half, half_samples,
                        t_now + half, si, step.annotation, wl_volts)
            t_now += pp.t_pulse
        t_now += pp.t_gap   # unbiased settle: no state motion
        decoded = {key: str(decode_state(s, mid))
                   for key, s in states.items()}
        step_records.append(StepRecord(si, step.annotation, wl_levels,
                                       bl_levels, decoded))

    result = []
    for c in p.result_cells:
        key = str(c)
        bit, spike, s_after = readout_cell("device", states[key], pp, ep)
        states[key] = s_after
        read_records.append(ReadRecord(len(p.steps), key, None, spike, bit,
                                       None))
        result.append(bit)
    return ExecTrace("device", p.scheme, p.n, tuple(step_records),
                     tuple(read_records), tuple(result),
                     tuple(samples), tuple(sample_columns))


# ======================================================================
# calibration
# ======================================================================

def time_to_flip(v_apply, ep, t_limit=10.0):
    """Time for a ZERO pair to decode as ONE under constant v_apply."""
    from .crs import step_crs_transient
    s = crs_state_for_bit(0, ep)
    mid = ep.gap_midpoint()
    t = 0.0
    dt = 1e-8
    while t < t_limit:
        s = step_crs_transient(s, v_apply, dt, ep, max_dt=dt)
        t += dt
        if decode_state(s, mid) is CrsLogicState.ONE:
            return t
        dt = min(dt * 1.25, t_limit / 50.0)
    return math.inf


def _half_select_drift(v_half, t_pulse, ep):
    """Worst-case decoded-state check and gap drift under half select."""
    span = ep.l - ep.x_min
    worst = 0.0
    ok = True
    mid = ep.gap_midpoint()
    for bit in (0, 1):
        for sign in (+1.0, -1.0):
            s0 = crs_state_for_bit(bit, ep)
            s1, _, _ = crs_pulse(s0, sign * v_half, t_pulse, ep, n_samples=4)
            drift = max(abs(s1.top.x - s0.top.x),
                        abs(s1.bottom.x - s0.bottom.x))
            worst = max(worst, drift / span)
            if decode_state(s1, mid) != decode_state(s0, mid):
                ok = False
    return ok, worst


def calibrate_pulse(ep, target_margin=100.0, v_seed=2.6, t_gap=0.0,
                    samples_per_pulse=40):
    """Find (v_w, t_pulse, i_spike) satisfying the half-select contract.

    t_pulse is set to 2.5x the measured full-select switching time, so a
    half window (the read-and-forward case) still carries 1.25x margin.
    Requirements checked before accepting a candidate amplitude:
      * full select flips ZERO to ONE within t_pulse,
      * half select leaves decoded states unchanged and moves no gap by
        more than span/target_margin,
      * the spike/no-spike read peaks are separated by target_margin^2
        so the geometric-mean threshold keeps target_margin both ways.
    """
    if target_margin <= 1.0:
        raise ValueError("target_margin must exceed 1")
    attempts = []
    v_w = v_seed
    for _ in range(6):
        t_full = time_to_flip(v_w, ep)
        report = {"v_w": v_w, "t_full_s": t_full}
        attempts.append(report)
        if math.isinf(t_full):
            v_w += 0.2
            continue
        t_pulse = 2.5 * t_full
        ok, drift = _half_select_drift(0.5 * v_w, t_pulse, ep)
        report["t_pulse_s"] = t_pulse
        report["half_select_drift_frac"] = drift
        report["half_select_holds"] = ok
        if not ok or drift > 1.0 / target_margin:
            v_w += 0.2   # steeper kinetics: shorter pulse, less drift
            continue
        _, peak_spike, _ = crs_pulse(crs_state_for_bit(0, ep), v_w,
                                     t_pulse, ep, n_samples=8)
        _, peak_quiet, _ = crs_pulse(crs_state_for_bit(1, ep), v_w,
                                     t_pulse, ep, n_samples=8)
        report["peak_spike_a"] = peak_spike
        report["peak_quiet_a"] = peak_quiet
        if peak_quiet <= 0 or peak_spike / peak_quiet < target_margin ** 2:
            v_w += 0.2
            continue
        i_spike = math.sqrt(peak_spike * peak_quiet)
        report["i_spike_a"] = i_spike
        return PulseParams(v_w=v_w, t_pulse=t_pulse, t_gap=t_gap,
                           samples_per_pulse=samples_per_pulse,
                           i_spike=i_spike)
    raise CalibrationError(
        f"no amplitude in [{v_seed}, {v_w}] V satisfied the half-select "
        f"contract at margin {target_margin}", {"attempts": attempts})


# ======================================================================
# trace artifacts
# ======================================================================

def _fmt(x):
    return f"{x:.16e}" if isinstance(x, float) else str(x)


def write_trace_csv(trace, path):
    """Device waveforms: one row per sample instant."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(trace.sample_columns) + "\n")
        for row in trace.samples:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_states_csv(trace, path):
    """Per-step cell states (behavioral bits or decoded device states)."""
    cells = sorted(trace.steps[0].cell_states) if trace.steps else []
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("step_index,annotation," + ",".join(cells) + "\n")
        for rec in trace.steps:
            fh.write(",".join([str(rec.index), rec.annotation]
                              + [str(rec.cell_states[c]) for c in cells])
                     + "\n")


def write_verdicts_json(trace, path):
    doc = [{"step": r.step_index, "cell": r.cell, "latch": r.latch,
            "spike": r.spike, "bit": r.bit,
            "peak_current_a": r.peak_current}
           for r in trace.reads]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def params_fingerprint(ep):
    """Stable hash of a parameter set, for calibration sidecar naming."""
    return hashlib.sha256(params_text(ep).encode("utf-8")).hexdigest()[:12]
