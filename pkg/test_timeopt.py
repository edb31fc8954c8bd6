#!/usr/bin/env python3
"""
Test script for minimal-time synthesis: alpha*, pulse sequences,
simulation, verification and the brute-force oracle
"""

import os
import sys
from datetime import datetime

import numpy as np
from scipy.stats import special_ortho_group

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from control.timeopt import (
    BruteForceGrid,
    Drift,
    HardPulse,
    PulseSequence,
    alpha_star,
    expand_native,
    merge_pulses,
    permutohedron_alpha,
    simulate,
    synthesize,
    t_min_adjoint_bruteforce,
    verify,
)
from lie.kakdec import pi_A, single_spin_alpha
from lie.kron import IX, IY, IZ, from_coordinates
from lie.matcore import expm_ah, random_su
from systems.registry import build_system
from utils.errors import DimensionCap, MalformedInput

SU2 = build_system("su2")
SU4 = build_system("su4")


def _random_k(rng):
    return SU4.from_cartan_frame(special_ortho_group.rvs(4, random_state=rng))


def test_alpha_star_origin():
    result = alpha_star(np.zeros(3), SU4.orbit)
    assert result.alpha == 0.0
    assert result.betas[0] == 1.0 and result.betas.sum() == 1.0


def test_alpha_star_single_spin():
    result = alpha_star(np.array([np.pi / 4]), SU2.orbit)
    assert abs(result.alpha - np.pi / 4) < 1e-12
    assert SU2.orbit.index_of([1.0]) == 1
    assert np.allclose(result.betas, [0.0, 1.0])


def test_alpha_star_methods_agree():
    rng = np.random.default_rng(51)
    for _ in range(50):
        x = pi_A(random_su(4, rng), SU4)
        exact = alpha_star(x, SU4.orbit)
        lp = alpha_star(x, SU4.orbit, method="simplex")
        assert abs(exact.alpha - lp.alpha) < 1e-9
        assert abs(exact.alpha - permutohedron_alpha(x, SU4)) < 1e-9
        assert np.allclose(exact.target(), x, atol=1e-9)
        assert np.all(exact.betas >= 0.0) and abs(exact.betas.sum() - 1.0) < 1e-12
    try:
        alpha_star(np.zeros(3), SU4.orbit, method="newton")
    except MalformedInput:
        return
    assert False, "expected MalformedInput"


def test_alpha_star_homogeneous():
    x = SU4.roots.coords_from_phases(np.array([0.6, -0.1, -0.2, -0.3]))
    base = alpha_star(x, SU4.orbit).alpha
    for c in (0.5, 2.0, 3.7):
        assert abs(alpha_star(c * x, SU4.orbit).alpha - c * base) < 1e-9


def test_single_spin_alpha_closed_form():
    rng = np.random.default_rng(52)
    for _ in range(50):
        g = random_su(2, rng)
        analytic = single_spin_alpha(g)
        assert abs(alpha_star(pi_A(g, SU2), SU2.orbit).alpha - analytic) < 1e-9
        assert 0.0 <= analytic <= np.pi / 2


def test_synthesize_k_target():
    k = _random_k(np.random.default_rng(53))
    seq = synthesize(k, SU4)
    assert seq.pulse_count == 1 and seq.drift_count == 0
    assert seq.total_time == 0.0
    assert np.linalg.norm(simulate(seq, SU4).endpoint - k) < 1e-9


def test_synthesize_single_spin_drift():
    seq = synthesize(expm_ah((np.pi / 4) * IZ), SU2)
    assert seq.pulse_count == 0 and seq.drift_count == 1
    assert abs(seq.total_time - np.pi / 4) < 1e-12
    assert seq.segments[0].direction_index == 1


def test_synthesize_random_targets():
    rng = np.random.default_rng(54)
    for _ in range(100):
        U = random_su(4, rng)
        seq = synthesize(U, SU4)
        report = verify(seq, U, SU4)
        assert report.endpoint_error <= 1e-8
        assert abs(report.total_time - report.alpha_star) < 1e-10
        assert report.certificate


def test_synthesize_near_identity_targets():
    rng = np.random.default_rng(58)
    for _ in range(20):
        U = expm_ah(1e-7 * from_coordinates(rng.standard_normal(15), 2))
        report = verify(synthesize(U, SU4), U, SU4)
        assert report.endpoint_error <= 1e-8 and report.certificate
    U = expm_ah(1e-8 * IY + 3e-8 * IZ) @ expm_ah(0.3 * IX)
    report = verify(synthesize(U, SU2), U, SU2)
    assert report.endpoint_error <= 1e-8 and report.certificate


def test_verify_rejects_slow_sequence():
    U = random_su(4, np.random.default_rng(55))
    seq = synthesize(U, SU4)
    slow = PulseSequence(segments=list(seq.segments), system_id=seq.system_id, hd=seq.hd)
    drift = next(i for i, s in enumerate(slow.segments) if isinstance(s, Drift))
    old = slow.segments[drift]
    slow.segments[drift] = Drift(direction_index=old.direction_index, k=old.k, duration=old.duration + 0.1)
    report = verify(slow, U, SU4)
    assert not report.certificate
    assert report.endpoint_error > 1e-3


def test_verify_empty_sequence():
    report = verify(PulseSequence(segments=[], system_id="su4", hd=[1.0, 2.0, 4.0]), np.eye(4), SU4)
    assert report.endpoint_error == 0.0
    assert report.alpha_star == 0.0 and report.certificate


def test_expand_native_preserves_endpoint():
    rng = np.random.default_rng(56)
    for _ in range(10):
        U = random_su(4, rng)
        seq = synthesize(U, SU4)
        native = expand_native(seq, SU4)
        d = SU4.drift_index()
        for seg in native.segments:
            if isinstance(seg, Drift):
                assert seg.direction_index == d
                assert np.allclose(seg.k, np.eye(4))
        assert abs(native.total_time - seq.total_time) < 1e-12
        assert np.linalg.norm(simulate(native, SU4).endpoint - U) < 1e-8


def test_drift_order_does_not_matter():
    U = random_su(4, np.random.default_rng(57))
    seq = synthesize(U, SU4)
    pulse, drifts = seq.segments[:1], seq.segments[1:]
    reordered = PulseSequence(segments=pulse + drifts[::-1], system_id=seq.system_id, hd=seq.hd)
    a = simulate(seq, SU4).endpoint
    b = simulate(reordered, SU4).endpoint
    assert np.linalg.norm(a - b) < 1e-9


def test_time_is_double_coset_invariant():
    rng = np.random.default_rng(58)
    for _ in range(20):
        U = random_su(4, rng)
        k1, k2 = _random_k(rng), _random_k(rng)
        assert abs(synthesize(k1 @ U @ k2, SU4).total_time - synthesize(U, SU4).total_time) < 1e-8


def test_merge_pulses():
    a, b = expm_ah(0.3 * IX), expm_ah(-0.8 * IX)
    merged = merge_pulses([HardPulse(k=a), HardPulse(k=b)])
    assert len(merged) == 1 and np.allclose(merged[0].k, b @ a)
    assert merge_pulses([HardPulse(k=a), HardPulse(k=a.conj().T)]) == []
    drift = Drift(direction_index=0, k=np.eye(2), duration=0.2)
    assert len(merge_pulses([HardPulse(k=a), drift, HardPulse(k=b)])) == 3


def test_sequence_dict_encoding():
    seq = synthesize(random_su(4, np.random.default_rng(59)), SU4)
    restored = PulseSequence.from_dict(seq.to_dict())
    assert restored.to_dict() == seq.to_dict()
    for bad in ({"segments": []}, {"system": "su4", "hd": [1, 2, 4], "segments": [{"type": "wait", "k": {}}]}):
        try:
            PulseSequence.from_dict(bad)
        except MalformedInput:
            continue
        assert False, f"expected MalformedInput for {bad}"


def test_simulate_trajectory():
    U = random_su(4, np.random.default_rng(60))
    seq = synthesize(U, SU4)
    traj = simulate(seq, SU4, step=0.01)
    assert np.allclose(traj.states[-1], traj.endpoint)
    assert abs(traj.times[-1] - seq.total_time) < 1e-12
    frame = traj.to_frame()
    assert frame.shape == (len(traj.times), 1 + 2 * 16)
    timed = simulate(seq, SU4, v_max=40.0)
    assert np.linalg.norm(timed.endpoint - U) < 1e-8
    assert timed.times[-1] > seq.total_time


def test_bruteforce_matches_alpha():
    target = expm_ah((np.pi / 4) * IZ)
    t = t_min_adjoint_bruteforce(target, SU2)
    assert abs(t - np.pi / 4) < 0.01


def test_bruteforce_agrees_on_seeded_targets():
    rng = np.random.default_rng(59)
    dt = BruteForceGrid().dt
    for k in range(50):
        U = random_su(2, rng)
        alpha = alpha_star(pi_A(U, SU2), SU2.orbit).alpha
        assert abs(alpha - single_spin_alpha(U)) < 1e-9
        t = t_min_adjoint_bruteforce(U, SU2, seed=k)
        assert alpha <= t + 1.5 * dt, f"target {k}: brute force {t} beats alpha {alpha}"
        assert t - alpha < 2 * dt, f"target {k}: brute force {t} exceeds alpha {alpha}"


def test_bruteforce_trivial_targets():
    grid = BruteForceGrid(n_dirs=16, n_mix=4, t_max=0.5)
    assert t_min_adjoint_bruteforce(np.eye(2), SU2, grid) == 0.0
    assert t_min_adjoint_bruteforce(expm_ah(0.5 * IX), SU2, grid) == 0.0
    try:
        t_min_adjoint_bruteforce(np.eye(4), SU4, grid)
    except DimensionCap:
        return
    assert False, "expected DimensionCap"


def main():
    print("⏱️ Time-Optimal Synthesis Tests")
    print("=" * 60)
    print(f"Test started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_") and callable(obj)]
    failures = 0
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
        except Exception as e:
            failures += 1
            print(f"❌ {test.__name__}: {e}")
    print("=" * 60)
    print(f"{len(tests) - failures}/{len(tests)} passed")
    return failures


if __name__ == "__main__":
    sys.exit(1 if main() else 0)
