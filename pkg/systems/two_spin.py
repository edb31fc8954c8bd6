from typing import List, Optional

import numpy as np

from lie.cartan import SymmetricPair, spin_pair
from .base_system import BaseSpinSystem

# Magic basis: rows have unit norm, so the frame is unitary
_FRAME = np.array([
    [1, 0, 0, 1],
    [0, 1, -1, 0],
    [1j, 0, 0, -1j],
    [0, 1j, 1j, 0],
], dtype=complex) / np.sqrt(2.0)


class TwoSpinSystem(BaseSpinSystem):
    """
    SU(4) with local controls on both spins and a drift in the Cartan
    subalgebra spanned by the three coupling terms. K = SU(2) x SU(2),
    which the magic basis turns into SO(4).
    """

    def __init__(self, h_coeffs: Optional[List[float]] = None, validate: bool = True):
        super().__init__("su4", h_coeffs, validate)

    def build_pair(self) -> SymmetricPair:
        return spin_pair(2)

    def frame_matrix(self) -> np.ndarray:
        return _FRAME.copy()

    def theta_map(self) -> np.ndarray:
        # theta = (x1 + x2 + x3, -x1, -x2, -x3)
        return np.array([
            [1.0, 1.0, 1.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0],
        ])
