#!/usr/bin/env python3
"""
Kronecker identity suite and tensor Pauli basis checks
"""

import os
import sys
from datetime import datetime

import numpy as np

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from lie.kron import (
    IX,
    IY,
    IZ,
    ONE,
    TensorBasisElem,
    _commutation_matrix,
    basis_coordinates,
    basis_matrices,
    comm,
    from_coordinates,
    kron,
    parse_combination,
    pauli_basis,
)
from lie.matcore import random_su
from utils.errors import DimMismatch, DimensionCap, MalformedInput

INSTANCES = 500
TOL = 1e-11


def _random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_kron_matches_basis_table():
    expected = np.array([
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, 0, 0, 0],
        [0, -1, 0, 0],
    ], dtype=complex)
    assert np.array_equal(kron(IX, ONE), expected)
    assert np.array_equal(kron(ONE, ONE), np.eye(4))


def test_kronecker_identities():
    """Mixed product, adjoint, inverse, trace, determinant and commutator rules"""
    rng = np.random.default_rng(21)
    for _ in range(INSTANCES):
        A, B, C, D = (_random_complex(rng, 2) for _ in range(4))
        assert np.max(np.abs(kron(A, C) @ kron(B, D) - kron(A @ B, C @ D))) < TOL * 10
        assert np.max(np.abs(kron(A, B).conj().T - kron(A.conj().T, B.conj().T))) < TOL
        assert abs(np.trace(kron(A, B)) - np.trace(A) * np.trace(B)) < TOL * 10
        assert np.max(np.abs(kron(A + C, B) - kron(A, B) - kron(C, B))) < TOL
        det_lhs = np.linalg.det(kron(A, B))
        det_rhs = (np.linalg.det(A) * np.linalg.det(B)) ** 2
        assert abs(det_lhs - det_rhs) < 1e-9 * max(1.0, abs(det_rhs))

        U, V = random_su(2, rng), random_su(2, rng)
        inverse = np.linalg.inv(kron(U, V))
        assert np.max(np.abs(inverse - kron(np.linalg.inv(U), np.linalg.inv(V)))) < TOL

        A2, B2 = _random_complex(rng, 2), _random_complex(rng, 2)
        lhs = comm(kron(A, B), kron(A2, B2))
        rhs = kron(comm(A, A2), B @ B2) + kron(A2 @ A, comm(B, B2))
        assert np.max(np.abs(lhs - rhs)) < TOL * 100


def test_commutation_matrix():
    rng = np.random.default_rng(22)
    A, B = _random_complex(rng, 2), _random_complex(rng, 4)
    P = _commutation_matrix(2, 4)
    assert np.max(np.abs(kron(B, A) - P @ kron(A, B) @ P.T)) < TOL


def test_pauli_basis_sizes():
    assert [e.label() for e in pauli_basis(1)] == ["Ix", "Iy", "Iz"]
    assert len(pauli_basis(2)) == 15
    mats = basis_matrices(3)
    assert mats.shape == (63, 8, 8)
    assert np.max(np.abs(mats + np.conj(np.swapaxes(mats, 1, 2)))) < 1e-12
    gram = np.einsum("aij,bij->ab", mats.conj(), mats)
    assert np.allclose(gram, 8.0 * np.eye(63))
    try:
        pauli_basis(5)
    except DimensionCap:
        return
    assert False, "expected DimensionCap"


def test_factor_norms():
    for F in (IX, IY, IZ):
        assert abs(np.trace(F.conj().T @ F) - 2.0) < 1e-15
        assert np.allclose(F + F.conj().T, 0.0)


def test_commutator():
    assert np.allclose(comm(IX, IY), 2 * IZ)
    assert np.allclose(comm(IX, IX), 0.0)
    rng = np.random.default_rng(23)
    A, B = _random_complex(rng, 4), _random_complex(rng, 4)
    assert np.array_equal(comm(A, B), -comm(B, A))
    try:
        comm(A, IX)
    except DimMismatch:
        return
    assert False, "expected DimMismatch"


def test_jacobi_identity():
    mats = basis_matrices(2)
    worst = 0.0
    for X in mats:
        for Y in mats:
            for Z in mats:
                total = comm(X, comm(Y, Z)) + comm(Y, comm(Z, X)) + comm(Z, comm(X, Y))
                worst = max(worst, float(np.max(np.abs(total))))
    assert worst < TOL


def test_labels():
    elem = TensorBasisElem.parse("i·1⊗Ix⊗Iy")
    assert elem.weight == 2 and elem.phase_exponent == 1
    assert elem.label() == "i·1⊗Ix⊗Iy"
    assert TensorBasisElem.parse("Ix@Iy") == TensorBasisElem.parse("i·Ix⊗Iy")
    assert np.allclose(TensorBasisElem.parse("Ix⊗Iy").matrix(), 1j * kron(IX, IY))
    for bad in ("1⊗1", "Iq", ""):
        try:
            TensorBasisElem.parse(bad)
        except MalformedInput:
            continue
        assert False, f"expected MalformedInput for {bad!r}"


def test_coordinates_and_combinations():
    rng = np.random.default_rng(24)
    coords = rng.standard_normal(15)
    assert np.allclose(basis_coordinates(from_coordinates(coords, 2), 2), coords)
    assert np.allclose(parse_combination("Iz:1", 1), IZ)
    combo = parse_combination("Ix⊗1:0.5, i·Iz⊗Iz:2", 2)
    assert np.allclose(combo, 0.5 * kron(IX, ONE) + 2j * kron(IZ, IZ))
    try:
        parse_combination("Ix:1", 2)
    except DimMismatch:
        return
    assert False, "expected DimMismatch"


def main():
    print("⊗ Kronecker Formalism Tests")
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
