from abc import ABC, abstractmethod
from typing import Dict, List, Any, Optional
import logging

import numpy as np

from config import SYSTEM_CONFIGS, get_tolerance
from lie.cartan import (
    RootData,
    SymmetricPair,
    controllability_check,
    gamma_project,
    is_generic,
    weyl_orbit,
)
from lie.kakdec import CellSpec
from lie.kron import TensorBasisElem
from utils.errors import (
    DimMismatch,
    NonGenericSystem,
    NotInCartanSubalgebra,
    Uncontrollable,
    UnknownSystem,
)

logger = logging.getLogger(__name__)


class BaseSpinSystem(ABC):
    """
    Right-invariant control system g' = (H_d + sum_j v_j H_j) g.

    Holds the symmetric pair, the Cartan frame, the root data of h, the
    Weyl orbit of the drift and the cell used for folding.
    """

    def __init__(self, system_name: str, h_coeffs: Optional[List[float]] = None, validate: bool = True):
        if system_name not in SYSTEM_CONFIGS:
            raise UnknownSystem(f"Unknown system: {system_name}")
        self.system_name = system_name
        self.config = SYSTEM_CONFIGS[system_name]
        self.n_spins = self.config["n_spins"]
        self.dim = 2 ** self.n_spins
        self.pair = self.build_pair()
        self.frame = np.asarray(self.frame_matrix(), dtype=complex)

        L = np.asarray(self.theta_map(), dtype=float)
        h_working = [1j * np.diag(L[:, j]) for j in range(L.shape[1])]
        h_basis = np.array([self.from_cartan_frame(h) for h in h_working])
        self.roots = RootData(label=system_name, h_basis=h_basis, theta_map=L)
        self.cell = CellSpec.alcove(system_name, self.roots)

        coeffs = self.config["h_coeffs"] if h_coeffs is None else h_coeffs
        self.h_coeffs = np.asarray(coeffs, dtype=float)
        if self.h_coeffs.shape != (self.roots.rank,):
            raise DimMismatch(f"{system_name} needs {self.roots.rank} drift coefficients, got {self.h_coeffs.size}")
        self.H_d = self.roots.matrix(self.h_coeffs)
        self.control_labels = list(self.config["controls"])
        self.H_js = [TensorBasisElem.parse(label).matrix() for label in self.control_labels]
        self.orbit = weyl_orbit(self.h_coeffs, self.roots)
        if validate:
            self.validate()

    @abstractmethod
    def build_pair(self) -> SymmetricPair:
        """Return the symmetric pair (g, k) of this system"""
        pass

    @abstractmethod
    def frame_matrix(self) -> np.ndarray:
        """Unitary V with V k V^H real antisymmetric and V h V^H diagonal"""
        pass

    @abstractmethod
    def theta_map(self) -> np.ndarray:
        """Matrix L with Cartan-frame phases theta = L x for h-coordinates x"""
        pass

    @property
    def description(self) -> str:
        return self.config["description"]

    def validate(self) -> None:
        if not is_generic(self.h_coeffs, self.roots):
            raise NonGenericSystem(
                f"Drift {self.h_coeffs.tolist()} lies on a root hyperplane "
                f"(root values {self.roots.root_values(self.h_coeffs).tolist()})"
            )
        if not controllability_check(self.H_d, self.H_js):
            raise Uncontrollable(f"Drift and controls {self.control_labels} do not generate su({self.dim})")

    def to_cartan_frame(self, g: np.ndarray) -> np.ndarray:
        return self.frame @ g @ self.frame.conj().T

    def from_cartan_frame(self, w: np.ndarray) -> np.ndarray:
        return self.frame.conj().T @ w @ self.frame

    def in_k(self, g: np.ndarray, tol: Optional[float] = None) -> bool:
        """Membership in K: real special orthogonal in the Cartan frame"""
        tol = get_tolerance("unitary") if tol is None else tol
        w = self.to_cartan_frame(g)
        if float(np.max(np.abs(w.imag))) > tol:
            return False
        w = w.real
        orthogonal = float(np.max(np.abs(w.T @ w - np.eye(self.dim)))) <= tol
        return orthogonal and abs(np.linalg.det(w) - 1.0) <= tol

    def coefficients_of(self, H: np.ndarray) -> np.ndarray:
        """h-coordinates of H; raises when H is not in h"""
        coords = gamma_project(H, self.roots)
        residual = float(np.linalg.norm(H - self.roots.matrix(coords)))
        if residual > get_tolerance("reassembly") * max(1.0, float(np.linalg.norm(H))):
            raise NotInCartanSubalgebra(f"Matrix is {residual:.3e} away from the Cartan subalgebra")
        return coords

    def orbit_matrices(self) -> np.ndarray:
        return self.orbit.matrices()

    def weyl_element(self, j: int) -> np.ndarray:
        """Signed permutation n in K (physical frame) with n H_d n^-1 equal to orbit point j"""
        theta_d = self.roots.phases(self.h_coeffs)
        theta_j = self.roots.phases(self.orbit.points[j])
        sigma = [int(np.argmin(np.abs(theta_d - value))) for value in theta_j]
        n_w = np.zeros((self.dim, self.dim))
        n_w[np.arange(self.dim), sigma] = 1.0
        if np.linalg.det(n_w) < 0:
            n_w[0] = -n_w[0]
        return self.from_cartan_frame(n_w)

    def drift_index(self) -> int:
        return self.orbit.index_of(self.h_coeffs)

    def describe(self) -> Dict[str, Any]:
        return {
            "system": self.system_name,
            "description": self.description,
            "n_spins": self.n_spins,
            "hd": [float(v) for v in self.h_coeffs],
            "controls": self.control_labels,
            "pair": self.pair.to_dict(),
            "roots": self.roots.to_dict(),
            "orbit": self.orbit.to_dict(),
            "cell": self.cell.to_dict(),
        }
