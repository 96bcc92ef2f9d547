"""Behavioral circuit backend: RC phase-shift oscillators at waveform level.

Each oscillator is a saturating inverting amplifier closing a loop around a
three-stage series-C / shunt-R high-pass ladder.  The amplifier output

    u = sat(gain * (-sync_gain * sync_in - v3))

is resolved algebraically each evaluation (the residual is strictly
monotone in u, so a safeguarded Newton iteration converges to the unique
root); the minus sign on the sync path realizes the pi response between
sync input and output that makes positive coupling weights
antiphase-locking.  The integrated states per oscillator are the three
capacitor voltages q_k plus the sync-summer output s (a first-order lag
standing in for the summer chain's finite bandwidth, which also decouples
the per-oscillator algebraic solves).  Node voltages follow as
v1 = u - q1, v2 = v1 - q2, v3 = v2 - q3, and the ladder's KCL gives

    dq3/dt = v3/(RC)   dq2/dt = (v2 + v3)/(RC)   dq1/dt = (v1 + v2 + v3)/(RC)

Small-signal analysis of the closed loop reproduces the textbook results:
oscillation starts above gain 29 at frequency 1/(2*pi*RC*sqrt(6)).

The second-harmonic source acts on the oscillation parametrically: mixed
through the odd saturation it modulates the effective loop gain, which
amplifies one quadrature of the fundamental and damps the other, so every
oscillator's phase is pulled onto a common line (two admissible phases a
half cycle apart).  Couplings then pick signs along that line.  The SHIL
amplitude must stay well below the level that quenches the oscillation
outright, at which point the network just follows the forcing.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import SimulationDiverged
from .machine import MachineConfig, effective_weights

TWO_PI = 2.0 * np.pi

DEFAULT_STEPS_PER_PERIOD = 400
GAIN_THRESHOLD = 29.0

# Summer-lag corner sits SUMMER_RATIO times above the ladder corner 1/(RC).
SUMMER_RATIO = 20.0
# Per-oscillator free-run frequency jitter (relative), applied per run so
# waveform phases decorrelate during the free interval.
FREERUN_JITTER = 0.002
# Circuit SHIL source amplitude in units of sat_level when the machine's
# shil amplitude is left unset; large enough to binarize relative phases
# within the settle window, small enough not to quench the oscillation.
DEFAULT_SHIL_UNITS = 0.25

_NEWTON_ITERS = 8
_BISECT_ITERS = 45
_RESIDUAL_TOL = 1e-11


def _make_output_solver(p: "OscParams"):
    """Solver for u = sat(gain*(c - u)) with c = drive + Q.

    The residual u - sat(...) is strictly increasing in u, so the root is
    unique and bracketed by the saturation rails.  A few warm-started
    Newton steps handle the common case; any elements still unconverged
    fall back to bisection, which cannot fail on a monotone residual.
    """
    sat, sat_prime, lp, lm = _sat_funcs(p)
    G = p.gain

    def solve(c, guess):
        lo = np.full(c.shape, -lm)
        hi = np.full(c.shape, lp)
        u = np.clip(guess, lo, hi)
        fu = None
        for _ in range(_NEWTON_ITERS):
            x = G * (c - u)
            fu = u - sat(x)
            if np.max(np.abs(fu)) < _RESIDUAL_TOL:
                return u
            hi = np.where(fu > 0, u, hi)
            lo = np.where(fu <= 0, u, lo)
            un = u - fu / (1.0 + G * sat_prime(x))
            outside = (un <= lo) | (un >= hi)
            u = np.where(outside, 0.5 * (lo + hi), un)
        x = G * (c - u)
        fu = u - sat(x)
        if np.max(np.abs(fu)) < _RESIDUAL_TOL:
            return u
        hi = np.where(fu > 0, u, hi)
        lo = np.where(fu <= 0, u, lo)
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            fm = mid - sat(G * (c - mid))
            hi = np.where(fm > 0, mid, hi)
            lo = np.where(fm <= 0, mid, lo)
        return 0.5 * (lo + hi)

    return solve


@dataclass(frozen=True)
class OscParams:
    """Component values of one phase-shift oscillator.

    Defaults are tuned for the machine's nominal operating point: mild
    clipping (gain 33), a 4 Vpp steady swing, and a sync attenuation that
    keeps realistic coupling drives in the injection-locking regime rather
    than overdriving the amplifier.  rail_asym models unequal op-amp swing
    limits; it is zero by default because a common asymmetry acts on the
    network like a spurious uniform bias field.
    """

    R: float = 1709.0  # ohms
    C: float = 1.0e-8  # farads
    gain: float = 33.0
    sat_level: float = 3.08  # volts; steady output swing is ~1.3x this
    sync_gain: float = 0.03
    rail_asym: float = 0.0

    def __post_init__(self):
        if self.R <= 0 or self.C <= 0 or self.sat_level <= 0:
            raise ValueError("R, C, sat_level must be positive")
        if self.gain <= GAIN_THRESHOLD:
            raise ValueError(f"gain must exceed {GAIN_THRESHOLD} for oscillation")
        if not 0 <= self.rail_asym < 1:
            raise ValueError("rail_asym must lie in [0, 1)")

    @property
    def rc(self) -> float:
        return self.R * self.C

    @property
    def analytic_frequency(self) -> float:
        """Small-signal oscillation frequency of the loaded ladder."""
        return 1.0 / (TWO_PI * self.rc * np.sqrt(6.0))


@dataclass(frozen=True)
class CircuitState:
    """Ladder node voltages and amplifier output of one oscillator."""

    v1: float
    v2: float
    v3: float
    u: float

    def as_charges(self) -> tuple[float, float, float]:
        return (self.u - self.v1, self.v1 - self.v2, self.v2 - self.v3)


@dataclass(frozen=True)
class CircuitTrace:
    """Sampled amplifier outputs (volts) of a network simulation."""

    times: np.ndarray  # seconds
    outputs: np.ndarray  # (samples, n)
    f0: float  # nominal frequency fixing the period unit
    sync_flags: np.ndarray  # per-sample gate state

    def __post_init__(self):
        for name in ("times", "outputs", "sync_flags"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.outputs.shape[1]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def _sat_funcs(p: OscParams):
    lp = p.sat_level * (1.0 + p.rail_asym)
    lm = p.sat_level * (1.0 - p.rail_asym)

    def sat(x):
        return np.where(x >= 0, lp * np.tanh(x / lp), lm * np.tanh(x / lm))

    def sat_prime(x):
        t = np.tanh(x / np.where(x >= 0, lp, lm))
        return 1.0 - t * t

    return sat, sat_prime, lp, lm


def solve_output(Q, drive, p: OscParams, guess=None):
    """Unique root of u = sat(gain*(drive - u + Q)).

    Q is the summed capacitor voltage (so v3 = u - Q) and drive the signal
    on the sync path, already sign-resolved by the caller.
    """
    c = np.asarray(drive + Q, dtype=float)
    solve = _make_output_solver(p)
    return solve(c, guess if guess is not None else np.zeros_like(c))


def oscillator_derivative(
    state: CircuitState, sync_in: float, p: OscParams
) -> tuple[float, float, float, float]:
    """Time derivative (dv1, dv2, dv3, du) at a consistent operating point.

    The amplifier output is algebraic, so du/dt follows from the implicit
    function theorem with the sync input held quasi-static.
    """
    q1, q2, q3 = state.as_charges()
    Q = q1 + q2 + q3
    u = float(solve_output(np.array(Q), np.array(-p.sync_gain * sync_in), p))
    v3 = u - Q
    v2 = v3 + q3
    v1 = v2 + q2
    rc = p.rc
    dq1 = (v1 + v2 + v3) / rc
    dq2 = (v2 + v3) / rc
    dq3 = v3 / rc
    _, sat_prime, _, _ = _sat_funcs(p)
    x = p.gain * (-p.sync_gain * sync_in - v3)
    slope = p.gain * float(sat_prime(np.array(x)))
    du = slope / (1.0 + slope) * (dq1 + dq2 + dq3)
    return (du - dq1, du - dq1 - dq2, du - dq1 - dq2 - dq3, du)


def _integrate_network(
    q0: np.ndarray,
    s0: np.ndarray,
    W: np.ndarray,
    shil_volts: float,
    f_shil: float,
    sync_on: bool,
    p: OscParams,
    rc_scale,
    duration_s: float,
    steps_per_period: int,
    sample_stride: int,
    f0: float,
    t0: float = 0.0,
    record_states: bool = False,
):
    """Fixed-step RK4 of the batched network.

    Returns (times, u_samples, final_state[, state_samples]).  States are
    (..., n, 4) = (q1, q2, q3, s); the summer state always tracks the
    coupled sum plus SHIL, while the gate decides whether the oscillator
    sees it, so closing the gate causes no summer turn-on transient.
    """
    state = np.concatenate([np.asarray(q0, float), np.asarray(s0, float)[..., None]],
                           axis=-1)
    dt = 1.0 / (f0 * steps_per_period)
    n_steps = int(round(duration_s * f0 * steps_per_period))
    inv_rc = 1.0 / (p.rc * np.asarray(rc_scale))
    tau_s_inv = SUMMER_RATIO / p.rc
    g = p.sync_gain
    shil_w = TWO_PI * f_shil
    solver = _make_output_solver(p)

    def solve_u(Q, drive, ug):
        return solver(drive + Q, ug)

    zero_drive = np.zeros(state.shape[:-1])

    def f(st, tt, ug):
        q1 = st[..., 0]
        q2 = st[..., 1]
        q3 = st[..., 2]
        s = st[..., 3]
        Q = q1 + q2 + q3
        drive = -g * s if sync_on else zero_drive
        u = solve_u(Q, drive, ug)
        v3 = u - Q
        v2 = v3 + q3
        v1 = v2 + q2
        d = np.empty_like(st)
        d[..., 0] = (v1 + v2 + v3) * inv_rc
        d[..., 1] = (v2 + v3) * inv_rc
        d[..., 2] = v3 * inv_rc
        summed = (W * u[..., None, :]).sum(axis=-1)
        d[..., 3] = ((summed + shil_volts * np.sin(shil_w * tt)) - s) * tau_s_inv
        return d, u

    n_samples = n_steps // sample_stride
    times = np.empty(n_samples)
    outputs = np.empty((n_samples,) + state.shape[:-1])
    states = np.empty((n_samples,) + state.shape) if record_states else None
    ug = np.zeros(state.shape[:-1])
    t = t0
    half = 0.5 * dt
    sixth = dt / 6.0
    si = 0
    for k in range(n_steps):
        k1, u1 = f(state, t, ug)
        k2, u2 = f(state + half * k1, t + half, u1)
        k3, u3 = f(state + half * k2, t + half, u2)
        k4, u4 = f(state + dt * k3, t + dt, u3)
        state = state + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        ug = u4
        t = t0 + (k + 1) * dt
        if (k + 1) % sample_stride == 0 and si < n_samples:
            Q = state[..., 0] + state[..., 1] + state[..., 2]
            drive = -g * state[..., 3] if sync_on else zero_drive
            times[si] = t
            outputs[si] = solve_u(Q, drive, ug)
            if record_states:
                states[si] = state
            si += 1
    if not np.isfinite(state).all():
        raise SimulationDiverged(f"non-finite circuit state at t={t:.6e} s")
    if record_states:
        return times, outputs, state, states
    return times, outputs, state


def resolve_shil_voltage(m: MachineConfig, p: OscParams) -> float:
    """SHIL source amplitude in volts; unset machine amplitudes use the default."""
    if not m.shil.enabled:
        return 0.0
    units = DEFAULT_SHIL_UNITS if m.shil.amplitude is None else float(m.shil.amplitude)
    return units * p.sat_level


def random_network_state(n: int, p: OscParams, rng: np.random.Generator):
    """Small random ladder charges: a power-on state before oscillation grows."""
    q = rng.normal(0.0, 0.05 * p.sat_level, (n, 3))
    s = np.zeros(n)
    return q, s


def simulate_circuit(
    m: MachineConfig,
    p: OscParams,
    init=None,
    duration_s: float = 0.02,
    sample_rate: float = 100.0,
    rng: np.random.Generator | None = None,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    rc_scale=None,
) -> CircuitTrace:
    """Simulate the network under a fixed sync gate state.

    ``init`` is a (q, s) pair as produced by random_network_state or
    phases_to_network_state; None draws a power-on state from rng.
    sample_rate is in samples per nominal period.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    if init is None:
        if rng is None:
            rng = np.random.default_rng(0)
        init = random_network_state(m.n, p, rng)
    q0, s0 = init
    W = effective_weights(m)
    shil = resolve_shil_voltage(m, p)
    stride = max(1, int(round(steps_per_period / sample_rate)))
    if rc_scale is None:
        rc_scale = 1.0 / (1.0 + np.asarray(m.detuning))
    times, outputs, _ = _integrate_network(
        q0, s0, W, shil, 2.0 * m.f0, m.sync_enabled, p, rc_scale,
        duration_s, steps_per_period, stride, m.f0,
    )
    flags = np.full(times.shape, bool(m.sync_enabled))
    return CircuitTrace(times=times, outputs=outputs, f0=m.f0, sync_flags=flags)


def measure_free_run_frequency(trace: CircuitTrace, osc_index: int = 0) -> float:
    """Frequency from mean rising-zero-crossing interval of the steady tail."""
    u = trace.outputs[:, osc_index]
    t = trace.times
    i0 = int(len(t) * 0.4)
    u_tail, t_tail = u[i0:], t[i0:]
    if np.max(np.abs(u_tail)) < 1e-6:
        raise RuntimeError("no oscillation detected (flat trace)")
    neg = np.signbit(u_tail)
    idx = np.nonzero(~neg[1:] & neg[:-1])[0]
    if len(idx) < 10:
        raise RuntimeError(
            f"no oscillation detected ({len(idx)} rising crossings; need >= 10)"
        )
    crossings = t_tail[idx] - u_tail[idx] * (t_tail[idx + 1] - t_tail[idx]) / (
        u_tail[idx + 1] - u_tail[idx]
    )
    return float(1.0 / np.mean(np.diff(crossings)))


def steady_amplitude(trace: CircuitTrace, osc_index: int = 0) -> float:
    """Peak-to-peak output voltage over the steady tail of a trace."""
    u = trace.outputs[:, osc_index]
    tail = u[int(len(u) * 0.5):]
    return float(tail.max() - tail.min())


def _free_run_single(p: OscParams, periods: float, f_ref: float,
                     record_states: bool = False):
    # deterministic seeded startup of one oscillator on a reference time base
    rng = np.random.default_rng(12345)
    q0 = rng.normal(0.0, 0.4 * p.sat_level, (1, 3))
    s0 = np.zeros(1)
    return _integrate_network(
        q0, s0, np.zeros((1, 1)), 0.0, f_ref, False, p, 1.0,
        periods / f_ref, DEFAULT_STEPS_PER_PERIOD, 4, f_ref,
        record_states=record_states,
    )


def free_run_trace(p: OscParams, periods: float, f_ref: float) -> CircuitTrace:
    """Single free oscillator from a seeded power-on state."""
    times, outputs, _ = _free_run_single(p, periods, f_ref)
    return CircuitTrace(times=times, outputs=outputs, f0=f_ref,
                        sync_flags=np.zeros(times.shape, dtype=bool))


def calibrate(
    p: OscParams,
    target_f0: float,
    tolerance: float = 0.005,
    max_iters: int = 5,
) -> OscParams:
    """Scale R*C until the measured free-run frequency hits the target.

    The analytic small-signal frequency 1/(2*pi*RC*sqrt(6)) seeds the
    search; because the whole loop scales in time with RC, each refinement
    is an exact rescale and one pass usually suffices.
    """
    if target_f0 <= 0:
        raise ValueError("target frequency must be positive")
    rc_analytic = 1.0 / (TWO_PI * target_f0 * np.sqrt(6.0))
    cand = dataclasses.replace(p, R=rc_analytic / p.C)
    for _ in range(max_iters):
        f_meas = measure_free_run_frequency(free_run_trace(cand, 50.0, target_f0))
        if abs(f_meas - target_f0) / target_f0 <= tolerance:
            return cand
        cand = dataclasses.replace(cand, R=cand.R * f_meas / target_f0)
    f_meas = measure_free_run_frequency(free_run_trace(cand, 50.0, target_f0))
    if abs(f_meas - target_f0) / target_f0 <= tolerance:
        return cand
    raise RuntimeError(
        f"calibration failed to converge: measured {f_meas:.1f} Hz vs target {target_f0}"
    )


_CALIBRATED: dict[tuple, OscParams] = {}
_CYCLE_TABLE: dict[tuple, np.ndarray] = {}


def calibrated_params(f0: float, base: OscParams | None = None) -> OscParams:
    base = base or OscParams()
    key = (f0, base)
    if key not in _CALIBRATED:
        _CALIBRATED[key] = calibrate(base, f0)
    return _CALIBRATED[key]


def _limit_cycle_states(p: OscParams, f0: float) -> np.ndarray:
    """(steps_per_period, 3) capacitor voltages over one steady period."""
    key = (p, f0)
    if key not in _CYCLE_TABLE:
        # settle onto the limit cycle, then record one period at full rate
        _, _, settled = _free_run_single(p, 40.0, f0)
        times, outputs, final, states = _integrate_network(
            settled[..., :3], np.zeros(1), np.zeros((1, 1)), 0.0, f0, False, p, 1.0,
            1.0 / f0, DEFAULT_STEPS_PER_PERIOD, 1, f0, record_states=True,
        )
        _CYCLE_TABLE[key] = states[:, 0, :3].copy()
    return _CYCLE_TABLE[key]


def phases_to_network_state(theta, p: OscParams, f0: float):
    """Map oscillator phases onto points of the free-running limit cycle.

    Preserves relative phases, which is what seeds the same basin as the
    phase backend for a given random draw.
    """
    table = _limit_cycle_states(p, f0)
    steps = table.shape[0]
    th = np.asarray(theta, dtype=float)
    idx = np.mod(np.rint(th / TWO_PI * steps).astype(int), steps)
    q = table[idx]  # (..., 3)
    s = np.zeros(th.shape)
    return q, s


def run_readout_batch(g, m: MachineConfig, sched, seeds) -> list:
    """Protocol steps 1-6 on the circuit backend for a batch of seeded runs.

    Free interval simulated with per-oscillator frequency jitter; readout
    through multiplier/limited-integrator detectors against oscillator 1.
    Lock timing is not estimated from waveforms, so results carry None.
    """
    from .readout import DetectorParams, phase_detector, spins_from_detectors

    n = m.n
    p = calibrated_params(m.f0)
    B = len(seeds)
    rngs = [np.random.default_rng(s) for s in seeds]
    theta0 = np.stack([r.uniform(0.0, TWO_PI, n) for r in rngs])
    jitter = np.stack([r.uniform(-FREERUN_JITTER, FREERUN_JITTER, n) for r in rngs])
    q0, s0 = phases_to_network_state(theta0, p, m.f0)
    rc_scale = 1.0 / ((1.0 + np.asarray(m.detuning)) * (1.0 + jitter))

    W = effective_weights(m)
    shil = resolve_shil_voltage(m, p)
    stride = 4  # detector fidelity: 100 samples per period
    state_q, state_s = q0, s0
    if sched.free_run_periods > 0:
        _, _, final = _integrate_network(
            state_q, state_s, W, shil, 2.0 * m.f0, False, p, rc_scale,
            sched.free_run_periods / m.f0, DEFAULT_STEPS_PER_PERIOD, stride, m.f0,
        )
        state_q, state_s = final[..., :3], final[..., 3]
    times, outputs, _ = _integrate_network(
        state_q, state_s, W, shil, 2.0 * m.f0, True, p, rc_scale,
        sched.settle_periods / m.f0, DEFAULT_STEPS_PER_PERIOD, stride, m.f0,
    )

    det = DetectorParams()
    dt = float(times[1] - times[0])
    period = 1.0 / m.f0
    results = []
    for b in range(B):
        ref = outputs[:, b, 0]
        values = [
            phase_detector(outputs[:, b, i], ref, det, dt, period)
            for i in range(1, n)
        ]
        results.append(spins_from_detectors(np.array(values), det.limit))
    return results


def run_trace(g, m: MachineConfig, sched, seed) -> CircuitTrace:
    """One seeded run recorded end to end (free interval plus settle)."""
    n = m.n
    p = calibrated_params(m.f0)
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    theta0 = rng.uniform(0.0, TWO_PI, n)
    jitter = rng.uniform(-FREERUN_JITTER, FREERUN_JITTER, n)
    q0, s0 = phases_to_network_state(theta0, p, m.f0)
    rc_scale = 1.0 / ((1.0 + np.asarray(m.detuning)) * (1.0 + jitter))
    W = effective_weights(m)
    shil = resolve_shil_voltage(m, p)
    stride = 4
    t_free, out_free, final = _integrate_network(
        q0[None], s0[None], W, shil, 2.0 * m.f0, False, p, rc_scale[None],
        sched.free_run_periods / m.f0, DEFAULT_STEPS_PER_PERIOD, stride, m.f0,
    )
    t_on, out_on, _ = _integrate_network(
        final[..., :3], final[..., 3], W, shil, 2.0 * m.f0, True, p, rc_scale[None],
        sched.settle_periods / m.f0, DEFAULT_STEPS_PER_PERIOD, stride, m.f0,
        t0=float(t_free[-1]) if len(t_free) else 0.0,
    )
    times = np.concatenate([t_free, t_on])
    outputs = np.concatenate([out_free[:, 0, :], out_on[:, 0, :]], axis=0)
    flags = np.concatenate([np.zeros(len(t_free), bool), np.ones(len(t_on), bool)])
    return CircuitTrace(times=times, outputs=outputs, f0=m.f0, sync_flags=flags)
