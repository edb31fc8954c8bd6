import os
from typing import Dict
from dotenv import load_dotenv

load_dotenv()


def _read_seed(raw: str) -> int:
    """Accept decimal or 0x-prefixed hex seeds"""
    return int(raw, 0)


# Reproducibility
DEFAULT_SEED = _read_seed(os.getenv("SPINOPT_SEED", "0xC0FFEE"))

# Runtime
LOG_LEVEL = os.getenv("SPINOPT_LOG_LEVEL", "WARNING")
WORKERS = int(os.getenv("SPINOPT_WORKERS", "1"))
EIG_METHOD = os.getenv("SPINOPT_EIG_METHOD", "lapack")  # lapack | jacobi
OUTPUT_DIR = os.getenv("SPINOPT_OUTPUT_DIR", "output")

# Named tolerances, overridable from the CLI with --tol name=value
TOLERANCES = {
    "herm": 1e-10,          # Hermitian / anti-Hermitian input checks
    "unitary": 1e-9,        # unitary and special-unitary input checks
    "symmetric": 1e-9,      # symmetric-unitary checks
    "cluster_gap": 1e-8,    # eigenvalue clustering for degenerate spectra
    "branch": 1e-9,         # eigenphase distance to pi that makes log ambiguous
    "cell": 1e-9,           # affine inequalities of the closed cell
    "dedup": 1e-9,          # Weyl orbit deduplication
    "generic": 1e-9,        # root functional magnitude for genericity
    "reassembly": 1e-9,     # k1 a k2 and split residuals
    "identity": 1e-10,      # pulses closer than this to 1 are dropped
    "lp": 1e-12,            # cone decomposition feasibility
    "hull": 1e-8,           # Kostant hull violation contract
    "span": 1e-9,           # rank threshold for Lie closure
    "certificate": 1e-9,    # total_time <= alpha* + certificate
}


def get_tolerance(name: str) -> float:
    """Look up a named tolerance"""
    if name not in TOLERANCES:
        from utils.errors import UnknownTolerance
        raise UnknownTolerance(f"Unknown tolerance: {name}")
    return TOLERANCES[name]


def override_tolerances(overrides: Dict[str, float]) -> None:
    """Apply positive overrides to known tolerance names"""
    from utils.errors import UnknownTolerance
    for name, value in overrides.items():
        if name not in TOLERANCES:
            raise UnknownTolerance(f"Unknown tolerance: {name}")
        if not value > 0:
            raise UnknownTolerance(f"Tolerance {name} must be positive, got {value}")
        TOLERANCES[name] = float(value)


# Control systems
SYSTEM_CONFIGS = {
    "su2": {
        "description": "Single spin, drift along Iz, one control along Ix",
        "n_spins": 1,
        "h_coeffs": [1.0],
        "controls": ["Ix"],
    },
    "su4": {
        "description": "Two coupled spins, local x/y controls on both spins",
        "n_spins": 2,
        "h_coeffs": [1.0, 2.0, 4.0],
        "controls": ["Ix⊗1", "Iy⊗1", "1⊗Ix", "1⊗Iy"],
    },
}

# Sampler defaults
KOSTANT_DEFAULTS = {
    "n_samples": 10000,
    "compositions": 3,
}

BRUTEFORCE_DEFAULTS = {
    "n_dirs": 64,
    "n_mix": 32,
    "dt": 1e-3,
    "eps": 5e-3,
    "t_max": 1.8,
}

REACH_DEFAULTS = {
    "n_samples": 2000,
    "n_switches": 8,
    "v_max": 40.0,
    "n_dirs": 64,
    "dt": 1e-3,
    "eps": 1e-3,
    "t_max": 1.8,
    "include_axis": True,
    "unreduced_mode": "uniform",  # uniform | pulsed
    "ladder": [10.0, 40.0, 160.0],
}
