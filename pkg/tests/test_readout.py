"""Readout: detector emulation, phase thresholding, lock timing."""

import numpy as np
import pytest

from oscim.phase_dynamics import PhaseState, PhaseTrace
from oscim.readout import (
    DetectorParams,
    lock_period,
    phase_detector,
    spins_from_detectors,
    spins_from_phases,
)

TWO_PI = 2 * np.pi


def sine_wave(freq, phase, duration, dt):
    t = np.arange(0.0, duration, dt)
    return np.sin(TWO_PI * freq * t + phase)


class TestPhaseDetector:
    DT = 1e-6
    F = 3800.0

    def detector(self, phi, periods=8.0):
        p = DetectorParams(settle_periods=5.0)
        dur = periods / self.F
        ref = sine_wave(self.F, 0.0, dur, self.DT)
        x = sine_wave(self.F, phi, dur, self.DT)
        return phase_detector(x, ref, p, self.DT, 1.0 / self.F)

    def test_in_phase_saturates_positive(self):
        assert self.detector(0.0) == pytest.approx(1.0)

    def test_antiphase_saturates_negative(self):
        assert self.detector(np.pi) == pytest.approx(-1.0)

    def test_small_offset_stays_positive(self):
        assert self.detector(0.2) > 0.0

    def test_sign_tracks_cosine_away_from_quadrature(self):
        for phi in np.linspace(0, TWO_PI, 37):
            if abs(np.cos(phi)) < np.cos(np.pi / 2 - 0.1):
                continue
            v = self.detector(phi)
            assert np.sign(v) == np.sign(np.cos(phi))

    def test_window_too_short(self):
        p = DetectorParams(settle_periods=5.0)
        short = sine_wave(self.F, 0.0, 2.0 / self.F, self.DT)
        with pytest.raises(ValueError, match="too short"):
            phase_detector(short, short, p, self.DT, 1.0 / self.F)


class TestSpinsFromPhases:
    def test_clean_antiphase(self):
        r = spins_from_phases(PhaseState(theta=np.array([0.05, np.pi - 0.1])))
        assert r.spins == (1, -1)
        assert r.resolved == (True, True)
        assert r.bitstring() == "01"

    def test_dead_zone_flags_unresolved(self):
        r = spins_from_phases(
            PhaseState(theta=np.array([0.0, np.pi / 2])), tolerance_rad=0.5
        )
        assert r.resolved == (True, False)
        assert r.unresolved_count == 1

    def test_reference_normalization(self):
        r = spins_from_phases(PhaseState(theta=np.array([np.pi, 0.0])))
        assert r.spins == (1, -1)  # global flip applied
        assert r.bitstring() == "01"

    def test_invariant_under_global_pi_shift(self):
        theta = np.array([0.1, np.pi - 0.05, 0.2, np.pi + 0.02])
        a = spins_from_phases(PhaseState(theta=theta))
        b = spins_from_phases(PhaseState(theta=(theta + np.pi) % TWO_PI))
        assert a.spins == b.spins


class TestSpinsFromDetectors:
    def test_signs_decode(self):
        r = spins_from_detectors(np.array([0.8, -0.9, 0.7]), limit=1.0)
        assert r.spins == (1, 1, -1, 1)
        assert all(r.resolved)

    def test_dead_zone(self):
        r = spins_from_detectors(np.array([0.02, -0.9]), limit=1.0)
        assert r.resolved == (True, False, True)


def make_trace(times, thetas, sync_at=0.0):
    return PhaseTrace(
        times=np.asarray(times, float),
        thetas=np.asarray(thetas, float),
        sync_events=((sync_at, True),),
    )


class TestLockPeriod:
    def test_constant_binarized_trace_locks_at_zero(self):
        times = np.linspace(0, 5, 51)
        thetas = np.tile([0.0, np.pi], (51, 1))
        assert lock_period(make_trace(times, thetas)) == 0.0

    def test_never_binarized_returns_none(self):
        times = np.linspace(0, 5, 51)
        thetas = np.tile([np.pi / 2, np.pi / 3], (51, 1))
        assert lock_period(make_trace(times, thetas)) is None

    def test_reports_start_of_held_window(self):
        times = np.linspace(0, 10, 101)
        thetas = np.where(times[:, None] >= 3.0, 0.0, np.pi / 2 * np.ones((101, 2)))
        lock = lock_period(make_trace(times, thetas))
        assert lock == pytest.approx(3.0, abs=0.11)

    def test_requires_hold(self):
        # binarized for only one period, then off again
        times = np.linspace(0, 10, 101)
        inside = (times >= 3.0) & (times <= 4.0)
        thetas = np.where(inside[:, None], 0.0, np.pi / 2 * np.ones((101, 2)))
        assert lock_period(make_trace(times, thetas)) is None

    def test_measured_from_sync_on(self):
        times = np.linspace(0, 10, 101)
        thetas = np.where(times[:, None] >= 3.0, 0.0, np.pi / 2 * np.ones((101, 2)))
        lock = lock_period(make_trace(times, thetas, sync_at=2.0))
        assert lock == pytest.approx(1.0, abs=0.11)
