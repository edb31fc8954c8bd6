"""
Kronecker products and the tensor Pauli basis of su(2^n).

Factor conventions (all anti-Hermitian, [Ix, Iy] = 2 Iz):

    Ix = [[0, 1], [-1, 0]]   = i * sigma_y
    Iy = [[0, i], [i, 0]]    = i * sigma_x
    Iz = [[i, 0], [0, -i]]   = i * sigma_z

A tensor element with an even number of non-identity factors carries an
extra factor i so that every basis element is anti-Hermitian.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, reduce
from typing import List, Tuple

import numpy as np

from utils.errors import DimMismatch, DimensionCap, MalformedInput

MAX_SPINS = 4
TENSOR_SEPARATORS = ("⊗", "@")
PHASE_PREFIXES = ("i·", "i*")


class PauliFactor(Enum):
    ONE = "1"
    IX = "Ix"
    IY = "Iy"
    IZ = "Iz"

    @property
    def matrix(self) -> np.ndarray:
        return _FACTOR_MATRICES[self].copy()


_FACTOR_MATRICES = {
    PauliFactor.ONE: np.eye(2, dtype=complex),
    PauliFactor.IX: np.array([[0, 1], [-1, 0]], dtype=complex),
    PauliFactor.IY: np.array([[0, 1j], [1j, 0]], dtype=complex),
    PauliFactor.IZ: np.array([[1j, 0], [0, -1j]], dtype=complex),
}

_FACTOR_ORDER = [PauliFactor.ONE, PauliFactor.IX, PauliFactor.IY, PauliFactor.IZ]

IX = _FACTOR_MATRICES[PauliFactor.IX]
IY = _FACTOR_MATRICES[PauliFactor.IY]
IZ = _FACTOR_MATRICES[PauliFactor.IZ]
ONE = _FACTOR_MATRICES[PauliFactor.ONE]


@dataclass(frozen=True)
class TensorBasisElem:
    """Tensor product of Pauli factors with the even-weight phase i"""
    factors: Tuple[PauliFactor, ...]

    @property
    def weight(self) -> int:
        return sum(1 for f in self.factors if f is not PauliFactor.ONE)

    @property
    def phase_exponent(self) -> int:
        return 1 if self.weight % 2 == 0 else 0

    @property
    def n_spins(self) -> int:
        return len(self.factors)

    def matrix(self) -> np.ndarray:
        product = kron_all([f.matrix for f in self.factors])
        return (1j ** self.phase_exponent) * product

    def label(self) -> str:
        body = "⊗".join(f.value for f in self.factors)
        return f"i·{body}" if self.phase_exponent else body

    def __str__(self) -> str:
        return self.label()

    @classmethod
    def parse(cls, text: str) -> 'TensorBasisElem':
        """Parse "i·1⊗Ix⊗Iy" style labels; the phase prefix is optional"""
        body = text.strip()
        for prefix in PHASE_PREFIXES:
            if body.startswith(prefix):
                body = body[len(prefix):]
                break
        for sep in TENSOR_SEPARATORS[1:]:
            body = body.replace(sep, TENSOR_SEPARATORS[0])
        try:
            factors = tuple(PauliFactor(token.strip()) for token in body.split(TENSOR_SEPARATORS[0]))
        except ValueError:
            raise MalformedInput(f"Unknown Pauli label: {text}")
        elem = cls(factors)
        if elem.weight == 0:
            raise MalformedInput(f"Identity is not an element of su(2^n): {text}")
        return elem


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Entry (ij, kl) = A[i, k] * B[j, l] in lexicographic index order"""
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def kron_all(matrices: List[np.ndarray]) -> np.ndarray:
    return reduce(kron, matrices)


def comm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape != B.shape:
        raise DimMismatch(f"Commutator of shapes {A.shape} and {B.shape}")
    return A @ B - B @ A


@lru_cache(maxsize=None)
def _basis_tuple(n: int) -> Tuple[TensorBasisElem, ...]:
    elems = [TensorBasisElem(factors) for factors in itertools.product(_FACTOR_ORDER, repeat=n)]
    elems = [e for e in elems if e.weight > 0]
    elems.sort(key=lambda e: (e.weight, [_FACTOR_ORDER.index(f) for f in e.factors]))
    return tuple(elems)


def pauli_basis(n: int) -> List[TensorBasisElem]:
    """Weight-major, then lexicographic on factor labels; 4^n - 1 elements"""
    if n < 1 or n > MAX_SPINS:
        raise DimensionCap(f"pauli_basis supports 1..{MAX_SPINS} spins, got {n}")
    return list(_basis_tuple(n))


@lru_cache(maxsize=None)
def _basis_stack(n: int) -> np.ndarray:
    return np.array([e.matrix() for e in _basis_tuple(n)])


def basis_matrices(n: int) -> np.ndarray:
    """Stacked matrices of pauli_basis(n), shape (4^n - 1, 2^n, 2^n)"""
    pauli_basis(n)
    return _basis_stack(n).copy()


def basis_coordinates(X: np.ndarray, n: int) -> np.ndarray:
    """Real coordinates of X in su(2^n) over pauli_basis(n)"""
    stack = _basis_stack(n)
    if X.shape != stack.shape[1:]:
        raise DimMismatch(f"Expected a {stack.shape[1:]} matrix, got {X.shape}")
    norm_sq = 2 ** n
    return np.real(np.einsum("bij,ij->b", stack.conj(), X)) / norm_sq


def from_coordinates(coords: np.ndarray, n: int) -> np.ndarray:
    return np.einsum("b,bij->ij", np.asarray(coords, dtype=float), _basis_stack(n))


def parse_combination(text: str, n: int) -> np.ndarray:
    """Parse "Ix:0.5,i·Ix⊗Iy:1" into the matrix sum of coefficient * element"""
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for term in filter(None, (t.strip() for t in text.split(","))):
        label, _, coef = term.rpartition(":")
        if not label:
            label, coef = coef, "1"
        elem = TensorBasisElem.parse(label)
        if elem.n_spins != n:
            raise DimMismatch(f"Label {label} has {elem.n_spins} factors, system has {n}")
        try:
            total += float(coef) * elem.matrix()
        except ValueError:
            raise MalformedInput(f"Bad coefficient in term: {term}")
    return total


def _commutation_matrix(m: int, n: int) -> np.ndarray:
    """Permutation P with kron(B, A) = P kron(A, B) P^T for A m x m, B n x n"""
    P = np.zeros((m * n, m * n))
    for i in range(m):
        for j in range(n):
            P[j * m + i, i * n + j] = 1.0
    return P
