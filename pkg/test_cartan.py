#!/usr/bin/env python3
"""
Test script for symmetric pairs, the Killing form, root data, Weyl orbits,
genericity, controllability and Kostant convexity sampling
"""

import os
import sys
from datetime import datetime

import numpy as np

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from lie.cartan import (
    cartan_split,
    check_symmetric_pair,
    controllability_check,
    gamma_project,
    is_generic,
    kostant_sample,
    killing_su,
    lie_closure_dimension,
    random_k_element,
    spin_pair,
    weyl_orbit,
    weyl_reflect,
)
from lie.kron import IX, IY, IZ, TensorBasisElem, from_coordinates
from lie.matcore import expm_ah
from systems.registry import build_system
from utils.errors import DimensionCap, ZeroCoroot


def test_killing_form_values():
    assert abs(killing_su(IZ, IZ, 2) + 8.0) < 1e-12
    assert abs(killing_su(IX, IY, 2)) < 1e-12
    rng = np.random.default_rng(31)
    X = from_coordinates(rng.standard_normal(15), 2)
    Y = from_coordinates(rng.standard_normal(15), 2)
    Z = from_coordinates(rng.standard_normal(15), 2)
    assert abs(killing_su(X, Y) - killing_su(Y, X)) < 1e-9
    lhs = killing_su(X @ Y - Y @ X, Z)
    rhs = killing_su(X, Y @ Z - Z @ Y)
    assert abs(lhs - rhs) < 1e-9


def test_cartan_split():
    pair = spin_pair(2)
    X = TensorBasisElem.parse("Ix⊗1").matrix()
    Xk, Xp = cartan_split(X, pair)
    assert np.allclose(Xk, X) and np.allclose(Xp, 0.0)
    X = TensorBasisElem.parse("Ix⊗Iy").matrix()
    Xk, Xp = cartan_split(X, pair)
    assert np.allclose(Xk, 0.0) and np.allclose(Xp, X)
    rng = np.random.default_rng(32)
    X = from_coordinates(rng.standard_normal(15), 2)
    Xk, Xp = cartan_split(X, pair)
    assert np.allclose(Xk + Xp, X)
    assert abs(killing_su(Xk, Xp)) < 1e-9


def test_theta_is_involution():
    for n in (1, 2, 3):
        pair = spin_pair(n)
        assert np.all(pair.signs ** 2 == 1.0)


def test_symmetric_pair_theorem():
    assert check_symmetric_pair(1).is_symmetric
    assert check_symmetric_pair(2).is_symmetric
    result = check_symmetric_pair(3)
    assert not result.is_symmetric
    assert result.witness == ("Ix⊗Iy⊗Iz", "i·Iy⊗Iy⊗1")
    assert result.p_component_norm > 0.1
    try:
        check_symmetric_pair(4)
    except DimensionCap:
        return
    assert False, "expected DimensionCap"


def test_k_and_p_orthogonal():
    pair = spin_pair(2)
    for K in pair.k_matrices:
        for P in pair.p_matrices:
            assert abs(killing_su(K, P)) < 1e-9


def test_frame_makes_k_real():
    system = build_system("su4")
    for K in system.pair.k_matrices:
        W = system.to_cartan_frame(K)
        assert np.max(np.abs(W.imag)) <= 1e-10
        assert np.allclose(W.real, -W.real.T)


def test_weyl_reflect():
    roots = build_system("su4").roots
    y = roots.coroots[0]
    assert np.allclose(weyl_reflect(y, y, roots), -y)
    rng = np.random.default_rng(33)
    x = rng.standard_normal(3)
    for y in roots.coroots:
        assert np.max(np.abs(weyl_reflect(weyl_reflect(x, y, roots), y, roots) - x)) < 1e-12
    su2 = build_system("su2").roots
    assert np.allclose(weyl_reflect(np.array([1.0]), np.array([1.0]), su2), [-1.0])
    try:
        weyl_reflect(x, np.zeros(3), roots)
    except ZeroCoroot:
        return
    assert False, "expected ZeroCoroot"


def test_coroots_reflection_closed():
    roots = build_system("su4").roots
    coroots = roots.coroots
    assert len(coroots) == 12
    for y in coroots:
        for z in coroots:
            image = weyl_reflect(z, y, roots)
            assert np.min(np.max(np.abs(coroots - image), axis=1)) < 1e-10


def test_coroot_angle_table():
    roots = build_system("su4").roots
    coroots = roots.coroots
    lengths = np.array([roots.inner(y, y) for y in coroots])
    assert np.all(lengths > 0.0) and np.ptp(lengths) < 1e-10 * lengths.max()
    allowed = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    for i, y in enumerate(coroots):
        cosines = np.array([roots.inner(y, z) for z in coroots]) / lengths[i]
        nearest = allowed[np.argmin(np.abs(cosines[:, None] - allowed[None, :]), axis=1)]
        assert np.max(np.abs(cosines - nearest)) < 1e-10
        counts = [int(np.sum(nearest == value)) for value in allowed]
        assert counts == [1, 4, 2, 4, 1], f"coroot {i}: pairing counts {counts}"
        cartan_integers = 2.0 * np.array([roots.inner(z, y) for z in coroots]) / lengths[i]
        assert np.allclose(cartan_integers, np.rint(cartan_integers), atol=1e-10)
    su2 = build_system("su2").roots
    y = su2.coroots
    assert abs(su2.inner(y[0], y[1]) / su2.inner(y[0], y[0]) + 1.0) < 1e-12


def test_weyl_orbits():
    su2 = build_system("su2", validate=False)
    assert np.allclose(weyl_orbit(np.array([1.0]), su2.roots).points, [[-1.0], [1.0]])
    su4 = build_system("su4", validate=False)
    orbit = weyl_orbit(np.array([1.0, 2.0, 4.0]), su4.roots)
    assert orbit.size == 24
    norms = [su4.roots.inner(p, p) for p in orbit.points]
    assert np.ptp(norms) < 1e-9
    assert weyl_orbit(np.array([1.0, 1.0, 1.0]), su4.roots).size == 4
    for p in orbit.points:
        for y in su4.roots.coroots:
            orbit.index_of(weyl_reflect(p, y, su4.roots))


def test_is_generic():
    roots = build_system("su4", validate=False).roots
    assert is_generic(np.array([1.0, 2.0, 4.0]), roots)
    assert not is_generic(np.array([1.0, 0.0, 0.0]), roots)
    assert not is_generic(np.zeros(3), roots)


def test_controllability():
    assert controllability_check(IZ, [IX])
    assert not controllability_check(np.zeros((2, 2), dtype=complex), [IX])
    assert lie_closure_dimension([IX]) == 1
    system = build_system("su4")
    assert controllability_check(system.H_d, system.H_js)


def test_gamma_project():
    system = build_system("su4")
    roots = system.roots
    x = np.array([0.3, -0.2, 0.9])
    assert np.allclose(gamma_project(roots.matrix(x), roots), x)
    rng = np.random.default_rng(34)
    X = from_coordinates(rng.standard_normal(15), 2)
    rest = X - roots.matrix(gamma_project(X, roots))
    for h in roots.h_basis:
        assert abs(killing_su(rest, h)) < 1e-9


def test_gamma_project_single_spin():
    system = build_system("su2")
    rng = np.random.default_rng(35)
    for _ in range(50):
        k = expm_ah(rng.uniform(0, 2 * np.pi) * IX)
        coef = gamma_project(k @ IZ @ k.conj().T, system.roots)[0]
        assert -1.0 - 1e-12 <= coef <= 1.0 + 1e-12


def test_random_k_element_in_k():
    system = build_system("su4")
    rng = np.random.default_rng(36)
    for _ in range(10):
        assert system.in_k(random_k_element(system.pair, rng))


def test_kostant_convexity():
    su2 = build_system("su2")
    report = kostant_sample(np.array([1.0]), su2.pair, su2.roots, 10000, seed=37, workers=4)
    assert report.inside and report.orbit_size == 2
    su4 = build_system("su4")
    report = kostant_sample(np.array([1.0, 2.0, 4.0]), su4.pair, su4.roots, 10000, seed=38, workers=4)
    assert report.orbit_size == 24
    assert report.max_violation <= 1e-8
    zero = kostant_sample(np.zeros(3), su4.pair, su4.roots, 20, seed=39)
    assert zero.max_violation <= 1e-12


def test_kostant_deterministic():
    su4 = build_system("su4")
    first = kostant_sample(np.array([1.0, 2.0, 4.0]), su4.pair, su4.roots, 100, seed=40, workers=3)
    second = kostant_sample(np.array([1.0, 2.0, 4.0]), su4.pair, su4.roots, 100, seed=40, workers=3)
    assert first.to_dict() == second.to_dict()


def main():
    print("🔺 Cartan Decomposition Tests")
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
