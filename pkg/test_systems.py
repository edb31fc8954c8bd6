#!/usr/bin/env python3
"""
Test script for the registered spin systems
"""

import os
import sys
from datetime import datetime

import numpy as np

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from lie.kron import IX, IZ, ONE, kron
from lie.matcore import expm_ah, unitarity_residual
from systems.registry import SYSTEMS, build_system, build_system_from_drift
from utils.errors import DimMismatch, NonGenericSystem, NotInCartanSubalgebra, UnknownSystem


def test_registry():
    assert sorted(SYSTEMS) == ["su2", "su4"]
    su2 = build_system("su2")
    assert su2.dim == 2 and su2.n_spins == 1
    assert np.allclose(su2.H_d, IZ)
    su4 = build_system("su4")
    assert su4.dim == 4 and su4.roots.rank == 3
    assert len(su4.H_js) == 4
    assert np.allclose(su4.H_js[0], kron(IX, ONE))


def test_unknown_system():
    try:
        build_system("su8")
    except UnknownSystem as e:
        assert "su2" in str(e)
        return
    assert False, "expected UnknownSystem"


def test_bad_drift():
    try:
        build_system("su4", [1.0, 2.0])
    except DimMismatch:
        pass
    else:
        assert False, "expected DimMismatch"
    try:
        build_system("su4", [1.0, 1.0, 1.0])
    except NonGenericSystem:
        pass
    else:
        assert False, "expected NonGenericSystem"
    # Skipping validation keeps degenerate drifts usable for orbit work
    assert build_system("su4", [1.0, 1.0, 1.0], validate=False).orbit.size == 4


def test_frame_is_unitary():
    for name in SYSTEMS:
        system = build_system(name)
        assert unitarity_residual(system.frame) < 1e-12
        for h in system.roots.h_basis:
            w = system.to_cartan_frame(h)
            assert np.allclose(w, np.diag(np.diag(w)))


def test_in_k():
    su2 = build_system("su2")
    assert su2.in_k(np.eye(2))
    assert su2.in_k(expm_ah(0.4 * IX))
    assert not su2.in_k(expm_ah(0.4 * IZ))
    su4 = build_system("su4")
    assert su4.in_k(kron(expm_ah(0.3 * IX), expm_ah(-1.1 * IZ)))
    assert not su4.in_k(expm_ah(0.2 * su4.H_d))


def test_coefficients_and_rebuild():
    su4 = build_system("su4")
    assert np.allclose(su4.coefficients_of(su4.H_d), [1.0, 2.0, 4.0])
    rebuilt = build_system_from_drift("su4", su4.roots.matrix([0.5, -1.5, 3.0]))
    assert np.allclose(rebuilt.h_coeffs, [0.5, -1.5, 3.0])
    try:
        su4.coefficients_of(kron(IX, ONE))
    except NotInCartanSubalgebra:
        return
    assert False, "expected NotInCartanSubalgebra"


def test_weyl_elements():
    for name in SYSTEMS:
        system = build_system(name)
        orbit = system.orbit_matrices()
        for j in range(system.orbit.size):
            n = system.weyl_element(j)
            assert system.in_k(n)
            assert np.max(np.abs(n @ system.H_d @ n.conj().T - orbit[j])) < 1e-10


def test_drift_index():
    su2 = build_system("su2")
    assert su2.drift_index() == 1
    su4 = build_system("su4")
    assert np.allclose(su4.orbit.points[su4.drift_index()], [1.0, 2.0, 4.0])


def test_describe():
    info = build_system("su4").describe()
    assert info["system"] == "su4"
    assert info["hd"] == [1.0, 2.0, 4.0]
    assert len(info["orbit"]["points"]) == 24
    assert len(info["cell"]["vertices"]) == 4


def main():
    print("🌀 Spin System Tests")
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
