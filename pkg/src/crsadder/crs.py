"""Complementary resistive switch: two ECM cells in anti-serial connection.

The pair hangs between a word line (wl, top terminal) and a bit line
(bl, bottom terminal) with a floating middle node.  Device polarity is
wl minus bl; the top cell is oriented so that positive device voltage
dissolves its filament while growing the bottom one, and vice versa.

Logic encoding of the pair (gap below the midpoint = low-ohmic):

    ZERO  top low-ohmic,  bottom high-ohmic
    ONE   top high-ohmic, bottom low-ohmic
    ON    both low-ohmic (transient only, conducts heavily)

Both stored states put one high-ohmic cell in series, so ZERO and ONE
are indistinguishable, and harmless, to small probe voltages; reading
is done destructively by writing ONE and watching for the current spike
that appears only when the pair passes through ON (stored ZERO).

State update rule of the pair under one full-amplitude pulse pair
(wl, bl), each line carrying logic levels mapped to +V/2 and -V/2:

    Z = (wl OR NOT bl) AND Z'  OR  (wl AND NOT bl) AND NOT Z'

i.e. wl=1,bl=0 writes ONE; wl=0,bl=1 writes ZERO; equal levels hold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .ecm import (
    EcmParams,
    EcmState,
    solve_cell_dc,
    state_derivative,
    _implicit_substep,
    _rail_masked_rate,
)


class IndeterminateStateError(RuntimeError):
    """Both cells high-ohmic: the pair holds no valid logic value."""


class ThresholdExtractionError(RuntimeError):
    """Sweep amplitude did not exercise all four switching thresholds."""


class CrsLogicState(enum.Enum):
    ZERO = "0"
    ONE = "1"
    ON = "on"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CrsDeviceState:
    top: EcmState
    bottom: EcmState


@dataclass(frozen=True)
class CrsThresholds:
    """Switching landmarks of a full CRS sweep, None where not observed.

    v_th1/v_th2 bound the conducting ON window on the positive branch,
    v_th3/v_th4 the mirrored window on the negative branch (v_th4 is the
    more negative edge).  on_window_volts is the positive window width.
    """

    v_th1: float | None
    v_th2: float | None
    v_th3: float | None
    v_th4: float | None

    @property
    def on_window_volts(self):
        if self.v_th1 is None or self.v_th2 is None:
            return None
        return self.v_th2 - self.v_th1


def fsm_next(z, wl, bl):
    """Pair state after one full pulse pair; all arguments are 0/1 ints."""
    for name, v in (("z", z), ("wl", wl), ("bl", bl)):
        if v not in (0, 1):
            raise ValueError(f"{name} must be 0 or 1, got {v!r}")
    return ((wl | (1 - bl)) & z) | ((wl & (1 - bl)) & (1 - z))


def crs_state_for_bit(bit, p):
    """Fully formed device state storing the given bit."""
    if bit == 0:
        return CrsDeviceState(EcmState(p.x_min), EcmState(p.l))
    if bit == 1:
        return CrsDeviceState(EcmState(p.l), EcmState(p.x_min))
    raise ValueError(f"bit must be 0 or 1, got {bit!r}")


def classify(x_top, x_bot, gap_threshold):
    """Logic state of a gap pair, or None when both cells are high-ohmic."""
    top_low = x_top < gap_threshold
    bot_low = x_bot < gap_threshold
    if top_low and not bot_low:
        return CrsLogicState.ZERO
    if bot_low and not top_low:
        return CrsLogicState.ONE
    if top_low and bot_low:
        return CrsLogicState.ON
    return None


def decode_state(s, gap_threshold):
    """Logic state of the pair; a cell is low-ohmic iff x < gap_threshold."""
    state = classify(s.top.x, s.bottom.x, gap_threshold)
    if state is None:
        raise IndeterminateStateError(
            f"both cells high-ohmic (x_top={s.top.x:.3e}, "
            f"x_bottom={s.bottom.x:.3e})")
    return state


# ======================================================================
# voltage divider over the two cells
# ======================================================================

def solve_crs_divider(v_w, v_b, x_top, x_bot, p, vm_guess=None):
    """Middle-node voltage and branch solutions of the loaded pair.

    Cell voltages are measured from the middle node outward: the top
    cell sees v_m - v_w, the bottom v_m - v_b, which realizes the
    anti-serial orientation.  The node residual i_top + i_bot is
    strictly increasing in v_m, so the unique root lies between the two
    line voltages; a bracketed secant finds it.

    Returns (v_m, j_series, sol_top, sol_bot) where j_series is the
    current flowing from wl to bl (equals the bottom cell current).
    """
    if v_w == v_b:
        sol_t = solve_cell_dc(0.0, x_top, p)
        sol_b = solve_cell_dc(0.0, x_bot, p)
        return v_w, 0.0, sol_t, sol_b
    lo, hi = min(v_w, v_b), max(v_w, v_b)

    def node_current(v_m):
        st = solve_cell_dc(v_m - v_w, x_top, p)
        sb = solve_cell_dc(v_m - v_b, x_bot, p)
        return st.i_total + sb.i_total, st, sb

    g_lo, sol_t, sol_b = node_current(lo)
    if g_lo >= 0.0:
        return lo, sol_b.i_total, sol_t, sol_b
    g_hi, st_hi, sb_hi = node_current(hi)
    if g_hi <= 0.0:
        return hi, sb_hi.i_total, st_hi, sb_hi

    a, b, ga, gb = lo, hi, g_lo, g_hi
    v = vm_guess if (vm_guess is not None and a < vm_guess < b) \
        else 0.5 * (a + b)
    best = None
    side = 0
    for _ in range(200):
        g, st, sb = node_current(v)
        scale = max(abs(st.i_total), abs(sb.i_total), 1e-30)
        if best is None or abs(g) < best[0]:
            best = (abs(g), v, sb.i_total, st, sb)
        if abs(g) <= 1e-12 * scale:
            return v, sb.i_total, st, sb
        # Illinois update: when the same endpoint moves twice in a row,
        # halve the retained side's value, otherwise false position
        # stagnates against the exponentially larger far endpoint
        if g < 0.0:
            if side == -1:
                gb *= 0.5
            a, ga, side = v, g, -1
        else:
            if side == 1:
                ga *= 0.5
            b, gb, side = v, g, 1
        denom = gb - ga
        v_new = (a * gb - b * ga) / denom if denom != 0.0 else 0.5 * (a + b)
        if not (a < v_new < b):
            v_new = 0.5 * (a + b)
        if v_new == v or b - a <= 4.0 * math.ulp(max(abs(a), abs(b))):
            break
        v = v_new
    # bracket collapsed to float resolution; accept the best point seen
    _, v, j, st, sb = best
    return v, j, st, sb


def series_current(v_applied, s, p):
    """Terminal current through the pair at a given applied voltage."""
    v_w, v_b = 0.5 * v_applied, -0.5 * v_applied
    _, j, _, _ = solve_crs_divider(v_w, v_b, s.top.x, s.bottom.x, p)
    return j


# ======================================================================
# transient of the loaded pair
# ======================================================================

CRS_MOTION_LIMIT = 0.02   # max per-substep gap motion, fraction of span


def step_crs_transient(s, v_applied, dt, p, max_dt=None):
    """Advance the pair by dt with v_applied split +v/2 on wl, -v/2 on bl.

    Semi-implicit scheme: the divider is re-solved at the current gaps,
    then each cell takes a backward-Euler substep at its frozen cell
    voltage.  Substeps shrink whenever either gap would move more than
    CRS_MOTION_LIMIT of the span.
    """
    state, _, _ = _march_crs(s, v_applied, dt, p, max_dt, None, 0.0)
    return state


def crs_pulse(s, v_applied, t_pulse, p, n_samples=60, max_dt=None):
    """Apply one rectangular pulse; record the current waveform.

    Returns (state_after, peak_abs_current, samples); samples are
    (t, v_m, j_series, x_top, x_bottom) rows, n_samples of them spread
    evenly over the pulse.
    """
    if max_dt is None:
        max_dt = t_pulse / 200.0
    samples = []
    state = s
    peak = 0.0
    t = 0.0
    sample_dt = t_pulse / n_samples
    for _ in range(n_samples):
        state, pk, row = _march_crs(state, v_applied, sample_dt, p,
                                    max_dt, t, peak)
        peak = pk
        samples.append(row)
        t += sample_dt
    return state, peak, samples


def _march_crs(s, v_applied, dt, p, max_dt, t0, peak_in):
    v_w, v_b = 0.5 * v_applied, -0.5 * v_applied
    x_t, x_b = s.top.x, s.bottom.x
    span = p.l - p.x_min
    vm = None
    peak = peak_in
    remaining = dt
    while remaining > 0.0:
        sub = min(remaining, max_dt) if max_dt else remaining
        vm, j, sol_t, sol_b = solve_crs_divider(v_w, v_b, x_t, x_b, p,
                                                vm_guess=vm)
        if abs(j) > peak:
            peak = abs(j)
        rate_t = _rail_masked_rate(state_derivative(sol_t.i_ion, p), x_t, p)
        rate_b = _rail_masked_rate(state_derivative(sol_b.i_ion, p), x_b, p)
        worst = max(abs(rate_t), abs(rate_b))
        if worst == 0.0:
            break   # both cells pinned or unbiased: divider is static
        if worst * sub > CRS_MOTION_LIMIT * span:
            sub = CRS_MOTION_LIMIT * span / worst
        x_t = _implicit_substep(x_t, vm - v_w, sub, p)
        x_b = _implicit_substep(x_b, vm - v_b, sub, p)
        remaining -= sub
    state = CrsDeviceState(EcmState(x_t), EcmState(x_b))
    if t0 is None:
        return state, peak, None
    # sample row at the end of the marched interval
    vm, j, _, _ = solve_crs_divider(v_w, v_b, x_t, x_b, p, vm_guess=vm)
    if abs(j) > peak:
        peak = abs(j)
    return state, peak, (t0 + dt, vm, j, x_t, x_b)


# ======================================================================
# quasi-static sweep of the pair
# ======================================================================

DEFAULT_CRS_AMPLITUDE = 2.0


def sweep_iv_crs(amplitude, rate, s0, p, n_samples=1200, frac=0.5):
    """Triangular sweep 0 -> +A -> -A -> 0 of the loaded pair.

    Returns (rows, thresholds).  Each row is (v, j, x_top, x_bottom,
    label) with label the classified logic state or "indeterminate".
    Thresholds are the frac-of-peak current crossings on each branch;
    an amplitude too small to produce a conduction event on both
    branches raises ThresholdExtractionError.
    """
    if amplitude <= 0 or rate <= 0:
        raise ValueError("amplitude and rate must be > 0")
    from .ecm import triangle_voltage
    total = 4.0 * amplitude / rate
    state = s0
    rows = []
    t_prev = 0.0
    for k in range(n_samples + 1):
        t = total * k / n_samples
        v = triangle_voltage(t, amplitude, rate)
        if t > t_prev:
            state = step_crs_transient(state, v, t - t_prev, p,
                                       max_dt=(t - t_prev))
            t_prev = t
        j = series_current(v, state, p)
        cls = classify(state.top.x, state.bottom.x, p.gap_midpoint())
        rows.append((v, j, state.top.x, state.bottom.x,
                     str(cls) if cls is not None else "indeterminate"))
    th = _extract_thresholds(rows, frac)
    missing = [name for name in ("v_th1", "v_th2", "v_th3", "v_th4")
               if getattr(th, name) is None]
    if missing:
        raise ThresholdExtractionError(
            f"no {'/'.join(missing)} within amplitude {amplitude} V")
    return rows, th


def _extract_thresholds(rows, frac):
    pos = [(v, j, lab) for v, j, _, _, lab in rows if v > 0]
    neg = [(v, j, lab) for v, j, _, _, lab in rows if v < 0]

    def window(branch):
        # a conduction event requires the pair to actually visit ON;
        # otherwise frac-of-peak crossings of the leakage floor would
        # masquerade as thresholds
        if not any(lab == "on" for _, _, lab in branch):
            return None, None
        mags = [abs(j) for _, j, _ in branch]
        pk = max(mags)
        k_pk = mags.index(pk)
        level = frac * pk
        first = next((branch[k][0] for k, m in enumerate(mags)
                      if m >= level), None)
        last = next((branch[k][0] for k, m in enumerate(mags)
                     if k > k_pk and m < level), None)
        if first is None or last is None:
            return None, None
        return first, last
    th1, th2 = window(pos)
    th3, th4 = window(neg)
    return CrsThresholds(th1, th2, th3, th4)
