"""
Dense complex-matrix kernel for small fixed sizes (2 to 16).

Every exponential here is of an anti-Hermitian matrix, so exponentials and
logarithms go through spectral decompositions and stay exactly unitary.
Functions take and return numpy arrays; MatC is the serializable record
used at the JSON boundary.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
from scipy.linalg import schur
from scipy.stats import unitary_group

import config
from utils.errors import (
    BranchAmbiguity,
    DimensionCap,
    MalformedInput,
    NotAntiHermitian,
    NotHermitian,
    NotSymmetricUnitary,
    NotUnitary,
)

logger = logging.getLogger(__name__)

MAX_DIM = 16

# Mixing angles for simultaneous diagonalization of Re S and Im S, tried in order
_MIX_ANGLES = (0.3897, 1.1071, 2.2143, 0.6435, 2.8198)
# Spectrum of the mixed matrix flatter than this is split by the orthogonal mix
_SPLIT_GAP = 1e-9
# Eigenvalues of S closer than this share a canonical basis
_DEGENERATE_TOL = 1e-12
# Largest off-diagonal of O^T S O accepted without trying another angle
_ACCEPT_OFFDIAG = 1e-11


@dataclass
class MatC:
    """Square complex matrix with explicit dimension"""
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (self.dim, self.dim):
            raise MalformedInput(
                f"MatC of dim {self.dim} needs {self.dim * self.dim} entries, "
                f"got shape {self.entries.shape}"
            )

    @classmethod
    def of(cls, array: np.ndarray) -> 'MatC':
        array = np.asarray(array, dtype=complex)
        return cls(dim=array.shape[0], entries=array)

    def is_unitary(self, tol: float) -> bool:
        return is_unitary(self.entries, tol)

    def is_hermitian(self, tol: float) -> bool:
        return is_hermitian(self.entries, tol)

    def is_anti_hermitian(self, tol: float) -> bool:
        return is_anti_hermitian(self.entries, tol)

    def is_symmetric(self, tol: float) -> bool:
        return is_symmetric(self.entries, tol)

    def is_traceless(self, tol: float) -> bool:
        return is_traceless(self.entries, tol)

    def to_dict(self) -> Dict[str, Any]:
        """Row-major {"dim", "re", "im"} encoding"""
        flat = self.entries.reshape(-1)
        return {
            "dim": int(self.dim),
            "re": [float(v) for v in flat.real],
            "im": [float(v) for v in flat.imag],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MatC':
        try:
            dim = int(data["dim"])
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"MatC needs dim/re/im fields: {e}")
        if dim < 1 or dim > MAX_DIM:
            raise DimensionCap(f"MatC dim {dim} outside 1..{MAX_DIM}")
        if re.size != dim * dim or im.size != dim * dim:
            raise MalformedInput(
                f"MatC of dim {dim} needs {dim * dim} re/im values, "
                f"got {re.size}/{im.size}"
            )
        return cls(dim=dim, entries=(re + 1j * im).reshape(dim, dim))


@dataclass
class EigDecomp:
    """Eigenvalues (ascending) or eigenphases with unit eigenvector columns"""
    values: np.ndarray
    vectors: np.ndarray

    def reassemble(self) -> np.ndarray:
        return self.vectors @ np.diag(self.values) @ self.vectors.conj().T


# Predicates

def _scale(M: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0


def is_hermitian(M: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(M - M.conj().T))) <= tol * _scale(M)


def is_anti_hermitian(M: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(M + M.conj().T))) <= tol * _scale(M)


def is_unitary(M: np.ndarray, tol: float) -> bool:
    n = M.shape[0]
    return float(np.max(np.abs(M.conj().T @ M - np.eye(n)))) <= tol


def is_special_unitary(M: np.ndarray, tol: float) -> bool:
    return is_unitary(M, tol) and abs(np.linalg.det(M) - 1.0) <= tol


def is_symmetric(M: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(M - M.T))) <= tol * _scale(M)


def is_traceless(M: np.ndarray, tol: float) -> bool:
    return abs(np.trace(M)) <= tol * _scale(M)


def _square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise MalformedInput(f"Expected a square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise DimensionCap(f"Matrix dimension {M.shape[0]} exceeds {MAX_DIM}")
    return M


# Inner products and distances

def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """Hilbert-Schmidt pairing tr(A^H B)"""
    return complex(np.trace(A.conj().T @ B))


def frob_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A))


def geodesic_distance(g: np.ndarray, h: np.ndarray) -> float:
    """Bi-invariant distance on U(n): norm of the principal eigenphases of g^-1 h"""
    phases = np.angle(np.linalg.eigvals(g.conj().T @ h))
    return float(np.linalg.norm(phases))


# Eigen-solvers

def _canonical_span_basis(block: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis of span(block) built from projections of the standard
    basis vectors, largest residual first, lowest index on ties. The result
    depends only on the spanned subspace; each vector has a real positive
    entry at its pivot.
    """
    m = block.shape[1]
    residual = block @ block.conj().T
    basis = []
    for _ in range(m):
        norms = np.linalg.norm(residual, axis=0)
        pivot = int(np.flatnonzero(norms >= norms.max() * (1.0 - 1e-9))[0])
        v = residual[:, pivot] / norms[pivot]
        basis.append(v)
        residual = residual - np.outer(v, v.conj() @ residual)
    return np.column_stack(basis)


def _clusters(values: np.ndarray, gap: float) -> List[np.ndarray]:
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] >= gap:
            groups.append(np.arange(start, i))
            start = i
    return groups


def jacobi_eigh(H: np.ndarray, tol: float = 1e-14, max_sweeps: int = 64) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi for Hermitian H, sweeps in (p, q) row order"""
    a = np.array(H, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                magnitude = abs(a[p, q])
                if magnitude < 1e-300:
                    continue
                phase = a[p, q] / magnitude
                diff = (a[q, q] - a[p, p]).real
                phi = diff / (2.0 * magnitude)
                t = 1.0 / (abs(phi) + np.sqrt(phi ** 2 + 1.0))
                if phi < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t ** 2 + 1.0)
                s = t * c
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -s * np.conj(phase)
                rot[q, q] = c * np.conj(phase)
                a = rot.conj().T @ a @ rot
                v = v @ rot
    else:
        logger.warning("Jacobi sweeps exhausted before convergence")
    values = np.diag(a).real
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def herm_eig(H: np.ndarray, tol: Optional[float] = None, canonical: bool = True) -> EigDecomp:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending"""
    H = _square(H)
    tol = config.get_tolerance("herm") if tol is None else tol
    if not is_hermitian(H, tol):
        residual = float(np.max(np.abs(H - H.conj().T)))
        raise NotHermitian(f"Input is not Hermitian (residual {residual:.3e})")
    H = 0.5 * (H + H.conj().T)
    if config.EIG_METHOD == "jacobi":
        values, vectors = jacobi_eigh(H)
    else:
        values, vectors = np.linalg.eigh(H)
    if canonical:
        gap = config.get_tolerance("cluster_gap")
        vectors = vectors.astype(complex)
        for idx in _clusters(values, gap):
            vectors[:, idx] = _canonical_span_basis(vectors[:, idx])
    return EigDecomp(values=values, vectors=vectors)


def expm_ah(X: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """exp(X) for anti-Hermitian X through the spectrum of iX"""
    X = _square(X)
    tol = config.get_tolerance("herm") if tol is None else tol
    if not is_anti_hermitian(X, tol):
        residual = float(np.max(np.abs(X + X.conj().T)))
        raise NotAntiHermitian(f"Input is not anti-Hermitian (residual {residual:.3e})")
    H = 0.5j * (X - X.conj().T)
    values, vectors = np.linalg.eigh(H)
    return (vectors * np.exp(-1j * values)) @ vectors.conj().T


def logu(U: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Principal logarithm of a unitary matrix, eigenphases in (-pi, pi]"""
    U = _square(U)
    tol = config.get_tolerance("unitary") if tol is None else tol
    if not is_unitary(U, tol):
        raise NotUnitary(f"Input is not unitary (residual {unitarity_residual(U):.3e})")
    T, Z = schur(U, output="complex")
    phases = np.angle(np.diag(T))
    near_pi = np.abs(np.abs(phases) - np.pi) < config.get_tolerance("branch")
    if np.any(near_pi):
        raise BranchAmbiguity(
            f"Eigenphase within {config.get_tolerance('branch'):.1e} of pi at positions "
            f"{np.flatnonzero(near_pi).tolist()}"
        )
    L = (Z * (1j * phases)) @ Z.conj().T
    return 0.5 * (L - L.conj().T)


def unitarity_residual(U: np.ndarray) -> float:
    n = U.shape[0]
    return float(np.max(np.abs(U.conj().T @ U - np.eye(n))))


def _mixed_basis(S: np.ndarray, angle: float) -> np.ndarray:
    """Real orthonormal eigenbasis of cos(a) Re S + sin(a) Im S, flat clusters split by the orthogonal mix"""
    c, s = np.cos(angle), np.sin(angle)
    values, O = np.linalg.eigh(c * S.real + s * S.imag)
    for idx in _clusters(values, _SPLIT_GAP):
        if len(idx) > 1:
            Q = O[:, idx]
            _, R = np.linalg.eigh(Q.T @ (-s * S.real + c * S.imag) @ Q)
            O[:, idx] = Q @ R
    return O


def _canonicalize_degenerate(O: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Canonical basis on each set of equal eigenvalues, sign-fixed columns elsewhere"""
    eig = np.diag(O.T @ S @ O)
    unassigned = list(range(O.shape[1]))
    while unassigned:
        i = unassigned[0]
        group = [j for j in unassigned if abs(eig[j] - eig[i]) <= _DEGENERATE_TOL]
        O[:, group] = _canonical_span_basis(O[:, group]).real
        unassigned = [j for j in unassigned if j not in group]
    return O


def sym_unitary_diag(S: np.ndarray, tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Factor a symmetric unitary S as O diag(e^{i phases}) O^T with O real
    special orthogonal.

    Re S and Im S are commuting real symmetric matrices. A linear combination
    of them is diagonalized, near-flat clusters of that spectrum are split
    with the orthogonal combination, and the basis is accepted only if it
    reassembles S; otherwise the next mixing angle is tried.
    """
    S = _square(S)
    tol = config.get_tolerance("symmetric") if tol is None else tol
    if not (is_symmetric(S, tol) and is_unitary(S, tol)):
        raise NotSymmetricUnitary(
            f"Input is not symmetric unitary (symmetry {float(np.max(np.abs(S - S.T))):.3e}, "
            f"unitarity {unitarity_residual(S):.3e})"
        )
    S = 0.5 * (S + S.T)
    best, best_residual = None, np.inf
    for angle in _MIX_ANGLES:
        O = _canonicalize_degenerate(_mixed_basis(S, angle), S)
        D = O.T @ S @ O
        residual = float(np.max(np.abs(D - np.diag(np.diag(D)))))
        if residual < best_residual:
            best, best_residual = O, residual
        if residual <= _ACCEPT_OFFDIAG:
            break
        logger.debug(f"Mixing angle {angle} leaves off-diagonal {residual:.3e}, retrying")
    else:
        if best_residual > config.get_tolerance("reassembly"):
            logger.warning(f"No mixing angle diagonalized S; best off-diagonal {best_residual:.3e}")
    O = best
    pivots = np.argmax(np.abs(O) >= np.max(np.abs(O), axis=0) * (1.0 - 1e-9), axis=0)
    O = O[:, np.argsort(pivots, kind="stable")]
    if np.linalg.det(O) < 0:
        O[:, -1] = -O[:, -1]
    phases = np.angle(np.diag(O.T @ S @ O))
    return O, phases


def random_su(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SU(dim)"""
    U = unitary_group.rvs(dim, random_state=rng)
    phase = np.linalg.det(U) ** (1.0 / dim)
    return U / phase
