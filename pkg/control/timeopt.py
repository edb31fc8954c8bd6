"""
Minimal time alpha*(U_F) and pulse-drift sequences reaching U_F in that time.

A target U_F = k1 a k2 is realized as one hard pulse k1 k2 followed by drift
segments along k1 Y_j k1^-1, where the Y_j are Weyl-orbit images of the drift
and the segment durations are the optimal cone weights alpha * beta_j.
Hard pulses take zero clock time.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Any, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.linalg import schur

import config
from lie.cartan import WeylOrbitData
from lie.kakdec import kak, pi_A
from lie.kron import IX
from lie.matcore import MatC, expm_ah, logu
from utils.errors import BranchAmbiguity, DimensionCap, MalformedInput, NotReached
from utils.polytope import cone_decompose, cone_decompose_simplex

logger = logging.getLogger(__name__)


class SegmentType(Enum):
    PULSE = "pulse"
    DRIFT = "drift"


@dataclass
class HardPulse:
    """Instantaneous move by an element of K"""
    k: np.ndarray

    @property
    def type(self) -> SegmentType:
        return SegmentType.PULSE

    @property
    def duration(self) -> float:
        return 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.type.value, "k": MatC.of(self.k).to_dict()}


@dataclass
class Drift:
    """Free evolution along k Y_j k^-1 for the given duration"""
    direction_index: int
    k: np.ndarray
    duration: float

    @property
    def type(self) -> SegmentType:
        return SegmentType.DRIFT

    def generator(self, orbit_matrices: np.ndarray) -> np.ndarray:
        return self.k @ orbit_matrices[self.direction_index] @ self.k.conj().T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": self.type.value,
            "direction_index": int(self.direction_index),
            "k": MatC.of(self.k).to_dict(),
            "duration": float(self.duration),
        }


Segment = Union[HardPulse, Drift]


@dataclass
class PulseSequence:
    segments: List[Segment]
    system_id: str
    hd: List[float]

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self.segments if isinstance(s, Drift)))

    @property
    def pulse_count(self) -> int:
        return sum(1 for s in self.segments if isinstance(s, HardPulse))

    @property
    def drift_count(self) -> int:
        return sum(1 for s in self.segments if isinstance(s, Drift))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "system": self.system_id,
            "hd": [float(v) for v in self.hd],
            "segments": [s.to_dict() for s in self.segments],
            "total_time": self.total_time,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PulseSequence':
        try:
            raw_segments = data["segments"]
            system_id = data["system"]
            hd = [float(v) for v in data["hd"]]
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"Pulse sequence needs system/hd/segments fields: {e}")
        segments: List[Segment] = []
        for raw in raw_segments:
            kind = raw.get("type")
            k = MatC.from_dict(raw.get("k", {})).entries
            if kind == SegmentType.PULSE.value:
                segments.append(HardPulse(k=k))
            elif kind == SegmentType.DRIFT.value:
                duration = float(raw.get("duration", -1.0))
                if duration < 0:
                    raise MalformedInput(f"Drift duration must be non-negative, got {duration}")
                segments.append(Drift(direction_index=int(raw["direction_index"]), k=k, duration=duration))
            else:
                raise MalformedInput(f"Unknown segment type: {kind}")
        return cls(segments=segments, system_id=system_id, hd=hd)


@dataclass
class AlphaStar:
    alpha: float
    betas: np.ndarray
    orbit: WeylOrbitData

    def target(self) -> np.ndarray:
        """alpha * sum_j beta_j Y_j as h-coordinates"""
        return self.alpha * (self.betas @ self.orbit.points)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "betas": [float(b) for b in self.betas],
            "orbit": self.orbit.to_dict(),
        }


def alpha_star(x_target: np.ndarray, orbit: WeylOrbitData, method: str = "enumerate") -> AlphaStar:
    """Smallest alpha with x_target = alpha * sum beta_j Y_j, beta on the simplex"""
    if method == "enumerate":
        gamma = cone_decompose(orbit.points, x_target)
    elif method == "simplex":
        gamma = cone_decompose_simplex(orbit.points, x_target)
    else:
        raise MalformedInput(f"Unknown alpha_star method: {method}")
    gamma = np.where(gamma < 1e-12, 0.0, gamma)
    alpha = float(gamma.sum())
    if alpha <= 0.0:
        betas = np.zeros(orbit.size)
        betas[0] = 1.0
        return AlphaStar(alpha=0.0, betas=betas, orbit=orbit)
    betas = gamma / alpha
    betas = betas / betas.sum()
    return AlphaStar(alpha=alpha, betas=betas, orbit=orbit)


def permutohedron_alpha(x: np.ndarray, system) -> float:
    """Closed form: max_k of partial sums of sorted phases of x over those of H_d"""
    theta_x = np.sort(system.roots.phases(x))[::-1]
    theta_h = np.sort(system.roots.phases(system.h_coeffs))[::-1]
    ratios = np.cumsum(theta_x)[:-1] / np.cumsum(theta_h)[:-1]
    return float(max(0.0, ratios.max()))


def _is_identity(k: np.ndarray, tol: float) -> bool:
    return float(np.linalg.norm(k - np.eye(k.shape[0]))) <= tol


def merge_pulses(segments: List[Segment], tol: Optional[float] = None) -> List[Segment]:
    """Fuse adjacent hard pulses (later one on the left) and drop identities"""
    tol = config.get_tolerance("identity") if tol is None else tol
    merged: List[Segment] = []
    for seg in segments:
        if isinstance(seg, HardPulse) and merged and isinstance(merged[-1], HardPulse):
            merged[-1] = HardPulse(k=seg.k @ merged[-1].k)
        else:
            merged.append(seg)
    return [s for s in merged if not (isinstance(s, HardPulse) and _is_identity(s.k, tol))]


def synthesize(U_F: np.ndarray, system) -> PulseSequence:
    U_F = np.asarray(U_F, dtype=complex)
    result = kak(U_F, system)
    astar = alpha_star(result.x_log, system.orbit)
    segments: List[Segment] = [HardPulse(k=result.k1 @ result.k2)]
    for j, beta in enumerate(astar.betas):
        duration = astar.alpha * float(beta)
        if duration > 0.0:
            segments.append(Drift(direction_index=j, k=result.k1.copy(), duration=duration))
    seq = PulseSequence(
        segments=merge_pulses(segments),
        system_id=system.system_name,
        hd=system.h_coeffs.tolist(),
    )
    logger.info(f"Synthesized {seq.pulse_count} pulses and {seq.drift_count} drifts, total time {seq.total_time:.12g}")
    return seq


def expand_native(seq: PulseSequence, system) -> PulseSequence:
    """Rewrite every drift as pulse, free evolution under H_d itself, pulse"""
    d = system.drift_index()
    segments: List[Segment] = []
    for seg in seq.segments:
        if isinstance(seg, HardPulse):
            segments.append(seg)
            continue
        conj = seg.k @ system.weyl_element(seg.direction_index)
        segments.append(HardPulse(k=conj.conj().T))
        segments.append(Drift(direction_index=d, k=np.eye(system.dim, dtype=complex), duration=seg.duration))
        segments.append(HardPulse(k=conj))
    return PulseSequence(segments=merge_pulses(segments), system_id=seq.system_id, hd=list(seq.hd))


def pulse_generator(k: np.ndarray) -> np.ndarray:
    """log k, falling back to eigenphases in (-pi, pi] on the branch cut"""
    try:
        return logu(k)
    except BranchAmbiguity as e:
        logger.debug(f"Pulse log fallback: {e}")
        T, Z = schur(k, output="complex")
        L = (Z * (1j * np.angle(np.diag(T)))) @ Z.conj().T
        return 0.5 * (L - L.conj().T)


@dataclass
class Trajectory:
    """Sampled states of a simulated sequence"""
    endpoint: np.ndarray
    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        dim = self.endpoint.shape[0]
        columns = ["t"]
        for i in range(dim):
            for j in range(dim):
                columns += [f"re_{i}{j}", f"im_{i}{j}"]
        rows = []
        for t, U in zip(self.times, self.states):
            flat = U.reshape(-1)
            rows.append([t] + [v for z in flat for v in (z.real, z.imag)])
        return pd.DataFrame(rows, columns=columns)


def simulate(seq: PulseSequence, system, step: Optional[float] = None,
             v_max: Optional[float] = None) -> Trajectory:
    """Left-multiply the segments in order; hard pulses are geodesics of speed v_max when given"""
    orbit_matrices = system.orbit_matrices()
    U = np.eye(system.dim, dtype=complex)
    total = seq.total_time
    if step is None:
        step = total / 256.0 if total > 0 else 1.0
    t = 0.0
    times, states = [0.0], [U.copy()]

    def evolve(generator: np.ndarray, duration: float, U: np.ndarray, t: float) -> Tuple[np.ndarray, float]:
        start = U
        n_steps = max(1, int(np.ceil(duration / step - 1e-12)))
        for s in range(1, n_steps + 1):
            tau = min(duration, s * step)
            U = expm_ah(tau * generator) @ start
            times.append(t + tau)
            states.append(U.copy())
        return U, t + duration

    for seg in seq.segments:
        if isinstance(seg, HardPulse):
            if v_max is None:
                U = seg.k @ U
                times.append(t)
                states.append(U.copy())
            else:
                L = pulse_generator(seg.k)
                duration = float(np.linalg.norm(L)) / v_max
                if duration > 0:
                    U, t = evolve(L / duration, duration, U, t)
        elif seg.duration > 0:
            U, t = evolve(seg.generator(orbit_matrices), seg.duration, U, t)
    return Trajectory(endpoint=U, times=times, states=states)


@dataclass
class VerificationReport:
    endpoint_error: float
    total_time: float
    alpha_star: float
    certificate: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "endpoint_error": self.endpoint_error,
            "total_time": self.total_time,
            "alpha_star": self.alpha_star,
            "certificate": self.certificate,
        }


def verify(seq: PulseSequence, U_F: np.ndarray, system) -> VerificationReport:
    U_F = np.asarray(U_F, dtype=complex)
    endpoint = simulate(seq, system).endpoint
    error = float(np.linalg.norm(endpoint - U_F))
    alpha = alpha_star(pi_A(U_F, system), system.orbit).alpha
    total = seq.total_time
    report = VerificationReport(
        endpoint_error=error,
        total_time=total,
        alpha_star=alpha,
        certificate=bool(total <= alpha + config.get_tolerance("certificate")),
    )
    logger.info(f"Verification: error {error:.3e}, time {total:.12g}, alpha* {alpha:.12g}")
    return report


# Brute-force oracle over the adjoint system (single spin only)

@dataclass
class BruteForceGrid:
    n_dirs: int = config.BRUTEFORCE_DEFAULTS["n_dirs"]
    n_mix: int = config.BRUTEFORCE_DEFAULTS["n_mix"]
    dt: float = config.BRUTEFORCE_DEFAULTS["dt"]
    eps: float = config.BRUTEFORCE_DEFAULTS["eps"]
    t_max: float = config.BRUTEFORCE_DEFAULTS["t_max"]
    workers: int = config.WORKERS


def single_spin_coset_distance(U: np.ndarray, U_F: np.ndarray) -> np.ndarray:
    """min over t of ||U - U_F exp(t Ix)||_F for a batch U of shape (B, 2, 2)"""
    M = np.einsum("bji,jk->bik", U.conj(), U_F)
    A = np.real(np.einsum("bii->b", M))
    B = np.real(np.einsum("bij,ji->b", M, IX))
    return np.sqrt(np.clip(4.0 - 2.0 * np.hypot(A, B), 0.0, None))


def _chattering(n_steps: int, ratio: float) -> np.ndarray:
    """Bresenham pattern: step i uses the second direction when floor((i+1) r) > floor(i r)"""
    i = np.arange(n_steps)
    return (np.floor((i + 1) * ratio + 1e-12) > np.floor(i * ratio + 1e-12)).astype(int)


def _bruteforce_chunk(branches: List[Tuple[int, float]], steps: np.ndarray, U_F: np.ndarray,
                      grid: BruteForceGrid) -> Tuple[float, float]:
    n_steps = int(np.ceil(grid.t_max / grid.dt))
    B = len(branches)
    choices = np.empty((B, n_steps), dtype=int)
    for b, (m, ratio) in enumerate(branches):
        second = _chattering(n_steps, ratio)
        choices[b] = np.where(second == 1, (m + 1) % grid.n_dirs, m)
    U = np.broadcast_to(np.eye(2, dtype=complex), (B, 2, 2)).copy()
    best_d = np.full(B, np.inf)
    best_t = np.full(B, np.inf)
    locked = np.zeros(B, dtype=bool)
    for i in range(n_steps):
        U = np.einsum("bij,bjk->bik", steps[choices[:, i]], U)
        d = single_spin_coset_distance(U, U_F)
        t = (i + 1) * grid.dt
        improving = ~locked & (d <= grid.eps) & (d < best_d)
        leaving = ~locked & (best_d <= grid.eps) & (d > best_d)
        best_d = np.where(improving, d, best_d)
        best_t = np.where(improving, t, best_t)
        locked |= leaving
        if np.all(locked):
            break
    hit = best_d <= grid.eps
    return (float(best_t[hit].min()), float(best_d[hit][np.argmin(best_t[hit])])) if np.any(hit) else (np.inf, np.inf)


def t_min_adjoint_bruteforce(U_F: np.ndarray, system, grid: Optional[BruteForceGrid] = None,
                             seed: Optional[int] = None) -> float:
    """Shortest time over chattering controls in a discretized Ad_K H_d to reach the coset U_F K"""
    if system.dim != 2:
        raise DimensionCap("The brute-force oracle supports the single-spin system only")
    grid = BruteForceGrid() if grid is None else grid
    seed = config.DEFAULT_SEED if seed is None else seed
    U_F = np.asarray(U_F, dtype=complex)
    if single_spin_coset_distance(np.eye(2, dtype=complex)[None], U_F)[0] <= grid.eps:
        return 0.0

    rng = np.random.default_rng(seed)
    offset = rng.uniform(0.0, np.pi / grid.n_dirs)
    angles = np.pi * np.arange(grid.n_dirs) / grid.n_dirs + offset
    steps = []
    for s in angles:
        rot = expm_ah(s * IX)
        X = rot @ system.H_d @ rot.conj().T
        steps.append(expm_ah(grid.dt * X))
    steps = np.array(steps)

    ratios = np.linspace(0.0, 1.0, grid.n_mix + 1)
    branches = [(m, float(r)) for m in range(grid.n_dirs) for r in ratios]
    workers = max(1, grid.workers)
    chunks = [branches[w::workers] for w in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda c: _bruteforce_chunk(c, steps, U_F, grid), chunks))
    best_time, best_distance = min(results)
    if not np.isfinite(best_time):
        raise NotReached(f"No branch came within {grid.eps} of the target coset by t = {grid.t_max}")
    logger.info(f"Brute force: t = {best_time:.6f} at distance {best_distance:.3e} over {len(branches)} branches")
    return best_time
