"""
KAK decomposition g = k1 a k2 with log a folded into the closed cell,
the torus projection pi_A, and membership in Theta = Ad_K exp(cell).

All factorizations run in the Cartan frame of the system, where K is the
real special orthogonal group and the Cartan subalgebra is diagonal.
The cell is the fundamental alcove: phase vector sorted descending with
first minus last entry at most pi.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Any, Tuple

import numpy as np

import config
from lie.cartan import RootData
from lie.matcore import MatC, is_special_unitary, is_symmetric, is_unitary, sym_unitary_diag, unitarity_residual
from utils.errors import DegenerateAngle, FactorizationFail, FoldFail, NotSpecialUnitary, NotUnitary

logger = logging.getLogger(__name__)

_PI_SNAP = 1e-12


@dataclass
class CellSpec:
    """Closed alcove of the affine Weyl group action on h"""
    pair_id: str
    roots: RootData
    vertices: np.ndarray
    d_group: List[np.ndarray]

    @classmethod
    def alcove(cls, pair_id: str, roots: RootData) -> 'CellSpec':
        n = roots.theta_map.shape[0]
        vertices = [np.zeros(roots.rank)]
        for k in range(1, n):
            weight = np.array([(n - k) / n] * k + [-k / n] * (n - k))
            vertices.append(roots.coords_from_phases(np.pi * weight))
        d_group = [np.array(signs, dtype=float)
                   for signs in itertools.product([1, -1], repeat=n)
                   if np.prod(signs) > 0]
        d_group.sort(key=lambda d: tuple(-d))
        return cls(pair_id=pair_id, roots=roots, vertices=np.array(vertices), d_group=d_group)

    @property
    def reflections(self) -> np.ndarray:
        return self.roots.coroots

    @property
    def translations(self) -> np.ndarray:
        return np.pi * self.roots.coroots

    def violation(self, x: np.ndarray) -> float:
        """Largest amount by which x breaks a cell inequality (<= 0 inside)"""
        theta = self.roots.phases(x)
        ordering = theta[1:] - theta[:-1]
        width = theta[0] - theta[-1] - np.pi
        return float(max(np.max(ordering), width))

    def contains(self, x: np.ndarray, tol: float = None) -> bool:
        tol = config.get_tolerance("cell") if tol is None else tol
        return self.violation(x) <= tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pair_id": self.pair_id,
            "vertices": [[float(v) for v in p] for p in self.vertices],
            "d_group": [[int(v) for v in d] for d in self.d_group],
        }


@dataclass
class FoldResult:
    """exp(x) = P exp(x_folded) P^T diag(d) in the Cartan frame"""
    x_folded: np.ndarray
    d: np.ndarray
    permutation: np.ndarray

    @property
    def permutation_matrix(self) -> np.ndarray:
        n = len(self.permutation)
        P = np.zeros((n, n))
        P[self.permutation, np.arange(n)] = 1.0
        return P


@dataclass
class KakResult:
    """g = k1 @ a @ k2, matrices in the physical frame"""
    k1: np.ndarray
    a: np.ndarray
    k2: np.ndarray
    x_log: np.ndarray

    def reassemble(self) -> np.ndarray:
        return self.k1 @ self.a @ self.k2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k1": MatC.of(self.k1).to_dict(),
            "a": MatC.of(self.a).to_dict(),
            "k2": MatC.of(self.k2).to_dict(),
            "x_log": [float(v) for v in self.x_log],
        }


def fold_phases(theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Fold a zero-sum phase vector into the alcove.

    Returns (theta_folded sorted descending, permutation, shifts) with
    theta[j] = theta_folded[i] + pi * shifts[j] where permutation[i] = j.
    """
    theta = np.asarray(theta, dtype=float)
    r = np.mod(theta, np.pi)
    r[r > np.pi - _PI_SNAP] = 0.0
    q = int(round(r.sum() / np.pi))
    order = np.argsort(-r, kind="stable")
    folded = r.copy()
    folded[order[:q]] -= np.pi
    permutation = np.argsort(-folded, kind="stable")
    shifts = np.rint((theta - folded) / np.pi).astype(int)
    return folded[permutation], permutation, shifts


def fold_to_cell(x: np.ndarray, cell: CellSpec) -> FoldResult:
    theta_f, permutation, shifts = fold_phases(cell.roots.phases(x))
    x_folded = cell.roots.coords_from_phases(theta_f)
    if not cell.contains(x_folded):
        raise FoldFail(f"Folded point {x_folded.tolist()} misses the cell by {cell.violation(x_folded):.3e}")
    d = np.where(shifts % 2 == 0, 1.0, -1.0)
    logger.debug(f"fold {np.asarray(x).tolist()} -> {x_folded.tolist()} with shifts {shifts.tolist()}")
    return FoldResult(x_folded=x_folded, d=d, permutation=permutation)


def affine_weyl_image(x: np.ndarray, permutation: np.ndarray, translation: np.ndarray, roots: RootData) -> np.ndarray:
    """Coordinates of the phase vector theta(x)[permutation] + pi * translation"""
    theta = roots.phases(x)[np.asarray(permutation)] + np.pi * np.asarray(translation, dtype=float)
    return roots.coords_from_phases(theta)


def _require_special_unitary(g: np.ndarray) -> None:
    tol = config.get_tolerance("unitary")
    if not is_unitary(g, tol):
        raise NotUnitary(f"Input is not unitary (residual {unitarity_residual(g):.3e})")
    if not is_special_unitary(g, tol):
        raise NotSpecialUnitary(f"Input determinant {complex(np.linalg.det(g)):.6g} is not 1")


def kak(g: np.ndarray, system) -> KakResult:
    """Factor g = k1 a k2 with k1, k2 in K and log a in the closed cell"""
    g = np.asarray(g, dtype=complex)
    _require_special_unitary(g)
    tol = config.get_tolerance("reassembly")
    w = system.to_cartan_frame(g)
    O, mu = sym_unitary_diag(w @ w.T)
    theta_f, permutation, _ = fold_phases(mu / 2.0)
    O = O[:, permutation]
    if np.linalg.det(O) < 0:
        O[:, -1] = -O[:, -1]
    a_w = np.diag(np.exp(1j * theta_f))
    k2_w = np.conj(a_w) @ O.T @ w
    imaginary = float(np.max(np.abs(k2_w.imag)))
    if imaginary > tol:
        raise FactorizationFail(f"Right factor is not real in the Cartan frame (imaginary part {imaginary:.3e})")
    k2_w = k2_w.real
    k1_w = O
    x_log = system.roots.coords_from_phases(theta_f)
    result = KakResult(
        k1=system.from_cartan_frame(k1_w),
        a=system.from_cartan_frame(a_w),
        k2=system.from_cartan_frame(k2_w),
        x_log=x_log,
    )
    residual = float(np.linalg.norm(result.reassemble() - g))
    if residual > tol:
        raise FactorizationFail(f"KAK reassembly residual {residual:.3e}")
    return result


def pi_A(g: np.ndarray, system) -> np.ndarray:
    return kak(g, system).x_log


def single_spin_split_angle(g: np.ndarray) -> float:
    """Rotation angle t with g exp(-t Ix) symmetric, for g = [[a, b], [-b*, a*]]"""
    re_a, re_b = g[0, 0].real, g[0, 1].real
    if abs(re_a) < 1e-10 and abs(re_b) < 1e-10:
        raise DegenerateAngle("Re a and Re b both vanish; every rotation angle works")
    return float(np.arctan2(re_b, re_a))


def single_spin_alpha(g: np.ndarray) -> float:
    """Closed-form minimal drift angle for a single spin: arccos sqrt(Re a^2 + Re b^2)"""
    radius = np.hypot(g[0, 0].real, g[0, 1].real)
    return float(np.arccos(min(1.0, radius)))


def _rotation(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, s], [-s, c]], dtype=complex)


def split_sym(g: np.ndarray, system) -> Tuple[np.ndarray, np.ndarray]:
    """g = U1 @ k1 with U1 in Theta (symmetric in the Cartan frame) and k1 in K"""
    g = np.asarray(g, dtype=complex)
    _require_special_unitary(g)
    if system.dim == 2:
        try:
            t = single_spin_split_angle(g)
        except DegenerateAngle as e:
            logger.warning(f"{e}; using t = 0")
            t = 0.0
        k1 = _rotation(t)
        return g @ k1.T, k1
    result = kak(g, system)
    k1_w = system.to_cartan_frame(result.k1).real
    a_w = system.to_cartan_frame(result.a)
    U1 = system.from_cartan_frame(k1_w @ a_w @ k1_w.T)
    k = result.k1 @ result.k2
    return U1, k


def _theta_member_by_phases(w: np.ndarray) -> bool:
    tol = config.get_tolerance("cell")
    _, phases = sym_unitary_diag(w)
    n = len(phases)
    for lift in itertools.product([-1, 0, 1], repeat=n):
        theta = phases + 2.0 * np.pi * np.array(lift)
        if abs(theta.sum()) < 1e-9 and theta.max() - theta.min() <= np.pi + tol:
            return True
    return False


def single_spin_theta_test(U: np.ndarray) -> bool:
    """[[cos(psi) e^{i phi}, i sin(psi)], [i sin(psi), cos(psi) e^{-i phi}]], phi and psi in [-pi/2, pi/2]"""
    tol = config.get_tolerance("symmetric")
    if not is_symmetric(U, tol) or not is_unitary(U, tol):
        return False
    return bool(abs(U[1, 1] - np.conj(U[0, 0])) <= tol and U[0, 0].real >= -tol)


def theta_member(g: np.ndarray, system) -> bool:
    g = np.asarray(g, dtype=complex)
    if system.dim == 2:
        return single_spin_theta_test(g)
    w = system.to_cartan_frame(g)
    tol = config.get_tolerance("symmetric")
    if not is_symmetric(w, tol) or not is_unitary(w, tol):
        return False
    return _theta_member_by_phases(w)
