from typing import List, Optional
import logging

import numpy as np

from .base_system import BaseSpinSystem
from .single_spin import SingleSpinSystem
from .two_spin import TwoSpinSystem
from utils.errors import UnknownSystem

logger = logging.getLogger(__name__)

SYSTEMS = {
    "su2": SingleSpinSystem,
    "su4": TwoSpinSystem,
}


def build_system(name: str, h_coeffs: Optional[List[float]] = None, validate: bool = True) -> BaseSpinSystem:
    """Instantiate a registered system by name"""
    if name not in SYSTEMS:
        raise UnknownSystem(f"Unknown system: {name} (available: {', '.join(sorted(SYSTEMS))})")
    system = SYSTEMS[name](h_coeffs, validate)
    logger.debug(f"Built {name} with drift {system.h_coeffs.tolist()}")
    return system


def build_system_from_drift(name: str, H_d: np.ndarray) -> BaseSpinSystem:
    """Build a system from a drift matrix, which must lie in the Cartan subalgebra"""
    base = build_system(name, validate=False)
    coeffs = base.coefficients_of(np.asarray(H_d, dtype=complex))
    return build_system(name, coeffs.tolist())
