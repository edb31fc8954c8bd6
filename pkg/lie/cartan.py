"""
Symmetric pairs, Killing form, root data, Weyl orbits, and the Lie-algebraic
checks built on them (genericity, controllability, Kostant convexity).

Cartan subalgebra elements are handled as real coordinate vectors over a
RootData.h_basis; matrices are always in the physical (tensor Pauli) frame.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Any, Optional, Tuple

import numpy as np

import config
from lie.kron import (
    TensorBasisElem,
    basis_coordinates,
    basis_matrices,
    comm,
    pauli_basis,
)
from lie.matcore import expm_ah
from utils.errors import DimMismatch, DimensionCap, ZeroCoroot
from utils.polytope import hull_residual

logger = logging.getLogger(__name__)


def killing_su(X: np.ndarray, Y: np.ndarray, n: Optional[int] = None) -> float:
    """Killing form of su(n): 2n tr(XY)"""
    if X.shape != Y.shape:
        raise DimMismatch(f"Killing form of shapes {X.shape} and {Y.shape}")
    n = X.shape[0] if n is None else n
    if n != X.shape[0]:
        raise DimMismatch(f"Declared n={n} for {X.shape[0]}x{X.shape[0]} matrices")
    return float(np.real(2 * n * np.trace(X @ Y)))


def killing_norm(X: np.ndarray) -> float:
    return float(np.sqrt(max(0.0, -killing_su(X, X))))


def unit_killing_norm(X: np.ndarray) -> float:
    """Killing norm scaled so that every Pauli basis element has norm 1"""
    n = X.shape[0]
    return killing_norm(X) / np.sqrt(2.0 * n * n)


@dataclass
class SymmetricPair:
    """Involution on su(2^n) given by a sign pattern over pauli_basis(n)"""
    n_spins: int
    signs: np.ndarray
    label: str

    @property
    def group_dim(self) -> int:
        return 2 ** self.n_spins

    @property
    def basis(self) -> List[TensorBasisElem]:
        return pauli_basis(self.n_spins)

    @property
    def k_indices(self) -> np.ndarray:
        return np.flatnonzero(self.signs > 0)

    @property
    def p_indices(self) -> np.ndarray:
        return np.flatnonzero(self.signs < 0)

    @property
    def k_matrices(self) -> np.ndarray:
        return basis_matrices(self.n_spins)[self.k_indices]

    @property
    def p_matrices(self) -> np.ndarray:
        return basis_matrices(self.n_spins)[self.p_indices]

    def theta(self, X: np.ndarray) -> np.ndarray:
        coords = basis_coordinates(X, self.n_spins)
        return np.einsum("b,bij->ij", self.signs * coords, basis_matrices(self.n_spins))

    def to_dict(self) -> Dict[str, Any]:
        basis = self.basis
        return {
            "label": self.label,
            "n_spins": self.n_spins,
            "k_basis": [basis[i].label() for i in self.k_indices],
            "p_basis": [basis[i].label() for i in self.p_indices],
        }


def spin_pair(n_spins: int) -> SymmetricPair:
    """k = single-spin (weight one) elements, p = everything else"""
    signs = np.array([1.0 if e.weight == 1 else -1.0 for e in pauli_basis(n_spins)])
    return SymmetricPair(n_spins=n_spins, signs=signs, label=f"spin{n_spins}")


def single_spin_pair() -> SymmetricPair:
    """(su(2), so(2)) with k spanned by Ix"""
    signs = np.array([1.0, -1.0, -1.0])
    return SymmetricPair(n_spins=1, signs=signs, label="su2/so2")


def cartan_split(X: np.ndarray, pair: SymmetricPair) -> Tuple[np.ndarray, np.ndarray]:
    theta_x = pair.theta(X)
    Xk = 0.5 * (X + theta_x)
    return Xk, X - Xk


@dataclass
class PairCheck:
    """Outcome of the bracket relations test for a candidate symmetric pair"""
    n_spins: int
    is_symmetric: bool
    witness: Optional[Tuple[str, str]] = None
    p_component_norm: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_spins": self.n_spins,
            "is_symmetric": self.is_symmetric,
            "witness": list(self.witness) if self.witness else None,
            "p_component_norm": self.p_component_norm,
        }


def _p_part_norm(C: np.ndarray, pair: SymmetricPair) -> float:
    return float(np.linalg.norm(cartan_split(C, pair)[1]))


def _k_part_norm(C: np.ndarray, pair: SymmetricPair) -> float:
    return float(np.linalg.norm(cartan_split(C, pair)[0]))


def _canonical_witness(n_spins: int) -> Tuple[TensorBasisElem, TensorBasisElem]:
    from lie.kron import PauliFactor
    pad = (PauliFactor.ONE,) * (n_spins - 3)
    first = TensorBasisElem((PauliFactor.IX, PauliFactor.IY, PauliFactor.IZ) + pad)
    second = TensorBasisElem((PauliFactor.IY, PauliFactor.IY, PauliFactor.ONE) + pad)
    return first, second


def verify_pair(pair: SymmetricPair, tol: float = 1e-10) -> PairCheck:
    """Test [k,k] in k, [k,p] in p, [p,p] in k on every basis pair"""
    basis = pair.basis
    mats = basis_matrices(pair.n_spins)
    if pair.n_spins >= 3:
        first, second = _canonical_witness(pair.n_spins)
        C = comm(first.matrix(), second.matrix())
        norm = _p_part_norm(C, pair)
        if norm > tol:
            return PairCheck(pair.n_spins, False, (first.label(), second.label()), norm)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            C = comm(mats[i], mats[j])
            same_side = pair.signs[i] == pair.signs[j]
            # [k,k] and [p,p] must land in k; mixed brackets in p
            norm = _p_part_norm(C, pair) if same_side else _k_part_norm(C, pair)
            if norm > tol:
                return PairCheck(pair.n_spins, False, (basis[i].label(), basis[j].label()), norm)
    return PairCheck(pair.n_spins, True)


def check_symmetric_pair(n_spins: int) -> PairCheck:
    if n_spins < 1 or n_spins > 3:
        raise DimensionCap(f"check_symmetric_pair supports 1..3 spins, got {n_spins}")
    result = verify_pair(spin_pair(n_spins))
    logger.info(f"Pair check for {n_spins} spins: symmetric={result.is_symmetric}")
    return result


@dataclass
class RootData:
    """
    Cartan subalgebra h with its root system.

    h_basis holds physical-frame matrices; in the Cartan frame they are
    i * diag(theta_map @ x). Roots are theta_i - theta_j, coroots the
    h-vectors whose phase vectors are e_i - e_j (i < j first, then negatives).
    """
    label: str
    h_basis: np.ndarray
    theta_map: np.ndarray
    coroots: np.ndarray = field(init=False)
    roots_as_functionals: np.ndarray = field(init=False)
    gram: np.ndarray = field(init=False)

    def __post_init__(self):
        n, r = self.theta_map.shape
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.roots_as_functionals = np.array([self.theta_map[i] - self.theta_map[j] for i, j in pairs])
        positive = []
        for i, j in pairs:
            target = np.zeros(n)
            target[i], target[j] = 1.0, -1.0
            positive.append(np.linalg.lstsq(self.theta_map, target, rcond=None)[0])
        positive = np.array(positive)
        self.coroots = np.vstack([positive, -positive])
        self.gram = np.array([[-killing_su(a, b) for b in self.h_basis] for a in self.h_basis])

    @property
    def rank(self) -> int:
        return self.theta_map.shape[1]

    def matrix(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("j,jab->ab", np.asarray(x, dtype=float), self.h_basis)

    def phases(self, x: np.ndarray) -> np.ndarray:
        return self.theta_map @ np.asarray(x, dtype=float)

    def coords_from_phases(self, theta: np.ndarray) -> np.ndarray:
        return np.linalg.lstsq(self.theta_map, np.asarray(theta, dtype=float), rcond=None)[0]

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def root_values(self, x: np.ndarray) -> np.ndarray:
        return self.roots_as_functionals @ np.asarray(x, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "rank": self.rank,
            "coroots": [[float(v) for v in c] for c in self.coroots],
            "roots_as_functionals": [[float(v) for v in c] for c in self.roots_as_functionals],
        }


def weyl_reflect(x: np.ndarray, y: np.ndarray, roots: RootData) -> np.ndarray:
    """Reflection of x through the hyperplane orthogonal to coroot y"""
    yy = roots.inner(y, y)
    if yy <= 1e-14:
        raise ZeroCoroot("Cannot reflect through a zero coroot")
    x = np.asarray(x, dtype=float)
    return x - 2.0 * roots.inner(x, y) / yy * np.asarray(y, dtype=float)


@dataclass
class WeylOrbitData:
    """Weyl orbit of a drift direction with the root data it was built from"""
    h_d: np.ndarray
    points: np.ndarray
    roots: RootData

    @property
    def size(self) -> int:
        return len(self.points)

    def matrices(self) -> np.ndarray:
        return np.array([self.roots.matrix(p) for p in self.points])

    def index_of(self, x: np.ndarray, tol: float = 1e-9) -> int:
        distances = np.max(np.abs(self.points - np.asarray(x)), axis=1)
        idx = int(np.argmin(distances))
        if distances[idx] > tol:
            raise KeyError(f"{np.asarray(x).tolist()} is not an orbit point")
        return idx

    def to_dict(self) -> Dict[str, Any]:
        return {
            "h_d": [float(v) for v in self.h_d],
            "size": self.size,
            "points": [[float(v) for v in p] for p in self.points],
        }


def weyl_orbit(h_d: np.ndarray, roots: RootData) -> WeylOrbitData:
    """Closure of {h_d} under coroot reflections, sorted lexicographically"""
    tol = config.get_tolerance("dedup")
    found = [np.asarray(h_d, dtype=float)]
    frontier = list(found)
    while frontier:
        fresh = []
        for x in frontier:
            for y in roots.coroots:
                z = weyl_reflect(x, y, roots)
                if all(np.max(np.abs(z - p)) > tol for p in found):
                    found.append(z)
                    fresh.append(z)
        frontier = fresh
    points = np.array(found)
    keys = np.round(points, 9)
    order = np.lexsort(keys.T[::-1])
    logger.debug(f"Weyl orbit of {np.asarray(h_d).tolist()} has {len(points)} points")
    return WeylOrbitData(h_d=np.asarray(h_d, dtype=float), points=points[order], roots=roots)


def is_generic(h_d: np.ndarray, roots: RootData) -> bool:
    """True when h_d lies on no root hyperplane"""
    values = roots.root_values(h_d)
    return bool(np.all(np.abs(values) > config.get_tolerance("generic")))


def _realify(M: np.ndarray) -> np.ndarray:
    return np.concatenate([M.real.ravel(), M.imag.ravel()])


def lie_closure_dimension(generators: List[np.ndarray], tol: Optional[float] = None) -> int:
    """Dimension of the real Lie algebra generated by anti-Hermitian matrices"""
    tol = config.get_tolerance("span") if tol is None else tol
    basis_vectors: List[np.ndarray] = []

    def try_add(M: np.ndarray) -> Optional[np.ndarray]:
        norm = np.linalg.norm(M)
        if norm <= tol:
            return None
        M = M / norm
        v = _realify(M)
        for b in basis_vectors:
            v = v - (b @ v) * b
        if np.linalg.norm(v) <= tol:
            return None
        basis_vectors.append(v / np.linalg.norm(v))
        return M

    generators = [np.asarray(g, dtype=complex) for g in generators]
    frontier = [m for m in (try_add(g) for g in generators) if m is not None]
    while frontier:
        fresh = []
        for A in frontier:
            for B in generators:
                added = try_add(comm(A, B))
                if added is not None:
                    fresh.append(added)
        frontier = fresh
    return len(basis_vectors)


def controllability_check(H_d: np.ndarray, H_js: List[np.ndarray]) -> bool:
    n = H_d.shape[0]
    dimension = lie_closure_dimension([H_d] + list(H_js))
    logger.debug(f"Lie closure dimension {dimension} of {n * n - 1}")
    return dimension == n * n - 1


def gamma_project(X: np.ndarray, roots: RootData) -> np.ndarray:
    """Killing-orthogonal projection of X onto h, as coordinates"""
    rhs = np.array([-killing_su(h, X) for h in roots.h_basis])
    return np.linalg.solve(roots.gram, rhs)


@dataclass
class KostantReport:
    """Hull violations of projected adjoint-orbit samples"""
    n_samples: int
    orbit_size: int
    max_violation: float
    mean_violation: float
    tolerance: float

    @property
    def inside(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "orbit_size": self.orbit_size,
            "max_violation": self.max_violation,
            "mean_violation": self.mean_violation,
            "tolerance": self.tolerance,
            "inside": self.inside,
        }


def random_k_element(pair: SymmetricPair, rng: np.random.Generator, compositions: int = 3) -> np.ndarray:
    """Product of exponentials of random k elements of unit Killing norm at most pi"""
    k_mats = pair.k_matrices
    g = np.eye(pair.group_dim, dtype=complex)
    for _ in range(compositions):
        direction = np.einsum("b,bij->ij", rng.standard_normal(len(k_mats)), k_mats)
        norm = unit_killing_norm(direction)
        if norm == 0.0:
            continue
        g = expm_ah(direction * (rng.uniform(0.0, np.pi) / norm)) @ g
    return g


def _kostant_chunk(x_matrix: np.ndarray, orbit_points: np.ndarray, pair: SymmetricPair,
                   roots: RootData, count: int, seed_seq: np.random.SeedSequence,
                   compositions: int) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    violations = np.empty(count)
    for s in range(count):
        k = random_k_element(pair, rng, compositions)
        y = gamma_project(k @ x_matrix @ k.conj().T, roots)
        violations[s] = hull_residual(orbit_points, y)
    return violations


def _split_counts(total: int, workers: int) -> List[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def kostant_sample(x: np.ndarray, pair: SymmetricPair, roots: RootData, n_samples: int,
                   seed: int, workers: int = 1) -> KostantReport:
    """Project random Ad_k x onto h and measure distance from conv(W x)"""
    compositions = config.KOSTANT_DEFAULTS["compositions"]
    orbit = weyl_orbit(x, roots)
    x_matrix = roots.matrix(x)
    workers = max(1, min(workers, n_samples)) if n_samples else 1
    streams = np.random.SeedSequence(seed).spawn(workers)
    counts = _split_counts(n_samples, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_kostant_chunk, x_matrix, orbit.points, pair, roots, c, s, compositions)
            for c, s in zip(counts, streams)
        ]
        chunks = [f.result() for f in futures]
    violations = np.concatenate(chunks) if chunks else np.zeros(0)
    report = KostantReport(
        n_samples=n_samples,
        orbit_size=orbit.size,
        max_violation=float(violations.max()) if violations.size else 0.0,
        mean_violation=float(violations.mean()) if violations.size else 0.0,
        tolerance=config.get_tolerance("hull"),
    )
    logger.info(f"Kostant sampling: {n_samples} samples, max violation {report.max_violation:.3e}")
    return report
