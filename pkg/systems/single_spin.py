from typing import List, Optional

import numpy as np

from lie.cartan import SymmetricPair, single_spin_pair
from .base_system import BaseSpinSystem


class SingleSpinSystem(BaseSpinSystem):
    """SU(2) with drift along Iz and the Ix control; K = exp(R Ix)"""

    def __init__(self, h_coeffs: Optional[List[float]] = None, validate: bool = True):
        super().__init__("su2", h_coeffs, validate)

    def build_pair(self) -> SymmetricPair:
        return single_spin_pair()

    def frame_matrix(self) -> np.ndarray:
        # Ix is already real antisymmetric and Iz diagonal
        return np.eye(2, dtype=complex)

    def theta_map(self) -> np.ndarray:
        return np.array([[1.0], [-1.0]])
