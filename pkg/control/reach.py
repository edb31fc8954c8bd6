"""
Monte Carlo reachable sets of the unreduced, adjoint and reduced systems,
coset distances to right cosets hK, and set-gap statistics between clouds.

Right cosets are compared through the embedding g -> w w^T of the Cartan
frame matrix w, which is constant on gK because K is real orthogonal there.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Any, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree
from scipy.stats import special_ortho_group

import config
from control.timeopt import single_spin_coset_distance
from lie.kakdec import split_sym
from lie.kron import IX
from lie.matcore import expm_ah, frob_norm, geodesic_distance
from utils.errors import DimensionCap, MalformedInput, NotReached

logger = logging.getLogger(__name__)

_GRID_POINTS = 256


class SystemKind(Enum):
    UNREDUCED = "unreduced"
    ADJOINT = "adjoint"
    REDUCED = "reduced"


@dataclass
class ReachConfig:
    n_samples: int = config.REACH_DEFAULTS["n_samples"]
    n_switches: int = config.REACH_DEFAULTS["n_switches"]
    v_max: float = config.REACH_DEFAULTS["v_max"]
    n_dirs: int = config.REACH_DEFAULTS["n_dirs"]
    dt: float = config.REACH_DEFAULTS["dt"]
    eps: float = config.REACH_DEFAULTS["eps"]
    t_max: float = config.REACH_DEFAULTS["t_max"]
    include_axis: bool = config.REACH_DEFAULTS["include_axis"]
    unreduced_mode: str = config.REACH_DEFAULTS["unreduced_mode"]
    ladder: List[float] = field(default_factory=lambda: list(config.REACH_DEFAULTS["ladder"]))
    seed: int = config.DEFAULT_SEED
    workers: int = config.WORKERS

    def __post_init__(self):
        if self.n_samples < 0 or self.n_switches < 1:
            raise MalformedInput(f"Need n_samples >= 0 and n_switches >= 1, got {self.n_samples}/{self.n_switches}")
        if self.unreduced_mode not in ("uniform", "pulsed"):
            raise MalformedInput(f"Unknown unreduced mode: {self.unreduced_mode}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "n_switches": self.n_switches,
            "v_max": self.v_max,
            "n_dirs": self.n_dirs,
            "dt": self.dt,
            "eps": self.eps,
            "t_max": self.t_max,
            "include_axis": self.include_axis,
            "unreduced_mode": self.unreduced_mode,
            "ladder": list(self.ladder),
            "seed": self.seed,
        }


@dataclass
class ReachSchedule:
    """Piecewise-constant generators, shape (N, pieces, d, d), with durations (N, pieces)"""
    generators: np.ndarray
    durations: np.ndarray

    @property
    def size(self) -> int:
        return self.generators.shape[0]

    def truncated(self, t: float) -> 'ReachSchedule':
        """Prefix of every schedule up to time t"""
        starts = np.cumsum(self.durations, axis=1) - self.durations
        clipped = np.clip(t - starts, 0.0, self.durations)
        return ReachSchedule(generators=self.generators, durations=clipped)

    def conjugated(self, k: np.ndarray) -> 'ReachSchedule':
        generators = np.einsum("ij,npjk,lk->npil", k, self.generators, k.conj())
        return ReachSchedule(generators=generators, durations=self.durations.copy())


@dataclass
class ReachCloud:
    system_id: SystemKind
    t_horizon: float
    points: np.ndarray
    seed: int
    n_samples: int
    n_switches: int
    v_max: Optional[float] = None
    metric: str = "frobenius"

    def to_frame(self) -> pd.DataFrame:
        n, dim, _ = self.points.shape
        flat = self.points.reshape(n, dim * dim)
        data = {"sample": np.arange(n)}
        for idx in range(dim * dim):
            i, j = divmod(idx, dim)
            data[f"re_{i}{j}"] = flat[:, idx].real
            data[f"im_{i}{j}"] = flat[:, idx].imag
        return pd.DataFrame(data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "system_id": self.system_id.value,
            "t_horizon": self.t_horizon,
            "n_points": int(self.points.shape[0]),
            "seed": self.seed,
            "n_samples": self.n_samples,
            "n_switches": self.n_switches,
            "v_max": self.v_max,
            "metric": self.metric,
        }

    def identity_distances(self) -> np.ndarray:
        """Bi-invariant geodesic distance of every point from the identity"""
        eye = np.eye(self.points.shape[1], dtype=complex)
        return np.array([geodesic_distance(eye, g) for g in self.points])


def metric_bound(system, t: float) -> float:
    """Geodesic radius around 1 containing every adjoint endpoint at time t"""
    return frob_norm(system.H_d) * t


def batch_expm(X: np.ndarray) -> np.ndarray:
    """exp of a stack of anti-Hermitian matrices through batched eigh"""
    H = 0.5j * (X - np.conj(np.swapaxes(X, -1, -2)))
    values, vectors = np.linalg.eigh(H)
    return np.einsum("...ij,...j,...kj->...ik", vectors, np.exp(-1j * values), vectors.conj())


def propagate(schedule: ReachSchedule) -> np.ndarray:
    """Left-multiplied product of exp(duration * generator) over the pieces"""
    steps = batch_expm(schedule.durations[..., None, None] * schedule.generators)
    n, pieces, dim, _ = steps.shape
    U = np.broadcast_to(np.eye(dim, dtype=complex), (n, dim, dim)).copy()
    for p in range(pieces):
        U = np.einsum("nij,njk->nik", steps[:, p], U)
    return U


def random_k(system, rng: np.random.Generator) -> np.ndarray:
    if system.dim == 2:
        return expm_ah(rng.uniform(0.0, 2.0 * np.pi) * IX)
    return system.from_cartan_frame(special_ortho_group.rvs(system.dim, random_state=rng))


def axis_rotations(system, cfg: ReachConfig) -> List[np.ndarray]:
    """K elements turning the drift into axis-aligned constant controls"""
    if system.dim == 2:
        return [expm_ah((np.pi * m / cfg.n_dirs) * IX) for m in range(cfg.n_dirs)]
    return [system.weyl_element(j) for j in range(system.orbit.size)]


def _piece_durations(rng: np.random.Generator, horizon: float, count: int, pieces: int) -> np.ndarray:
    cuts = np.sort(rng.uniform(0.0, horizon, size=(count, pieces - 1)), axis=1)
    edges = np.concatenate([np.zeros((count, 1)), cuts, np.full((count, 1), horizon)], axis=1)
    return np.diff(edges, axis=1)


def draw_adjoint_schedule(system, horizon: float, count: int, cfg: ReachConfig,
                          rng: np.random.Generator, axis_offset: int = 0) -> ReachSchedule:
    """Random Ad_K H_d controls; the first samples are constant axis-aligned controls"""
    pieces = cfg.n_switches
    durations = _piece_durations(rng, horizon, count, pieces)
    generators = np.empty((count, pieces, system.dim, system.dim), dtype=complex)
    axis = axis_rotations(system, cfg) if cfg.include_axis else []
    for s in range(count):
        axis_idx = s + axis_offset
        for p in range(pieces):
            k = axis[axis_idx] if axis_idx < len(axis) else random_k(system, rng)
            generators[s, p] = k @ system.H_d @ k.conj().T
    return ReachSchedule(generators=generators, durations=durations)


def draw_unreduced_schedule(system, horizon: float, count: int, cfg: ReachConfig,
                            rng: np.random.Generator) -> ReachSchedule:
    """Amplitudes uniform in [-v_max, v_max] on every control"""
    pieces = cfg.n_switches
    durations = _piece_durations(rng, horizon, count, pieces)
    amplitudes = rng.uniform(-cfg.v_max, cfg.v_max, size=(count, pieces, len(system.H_js)))
    controls = np.einsum("npm,mij->npij", amplitudes, np.array(system.H_js))
    return ReachSchedule(generators=system.H_d[None, None] + controls, durations=durations)


def _split_counts(total: int, workers: int) -> List[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _sample_chunk(kind: SystemKind, system, t: float, count: int, offset: int,
                  cfg: ReachConfig, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    if count == 0:
        return np.zeros((0, system.dim, system.dim), dtype=complex)
    if kind is SystemKind.UNREDUCED:
        if cfg.unreduced_mode == "pulsed":
            return pulsed_pair(system, t, count, cfg.v_max, cfg, rng)[0]
        return propagate(draw_unreduced_schedule(system, t, count, cfg, rng))
    points = propagate(draw_adjoint_schedule(system, t, count, cfg, rng, axis_offset=offset))
    if kind is SystemKind.REDUCED:
        points = np.array([split_sym(U, system)[0] for U in points])
    return points


def sample_reach(system_id: SystemKind, system, t: float, cfg: Optional[ReachConfig] = None) -> ReachCloud:
    """Endpoints of random piecewise-constant controls at time t"""
    cfg = ReachConfig() if cfg is None else cfg
    if t < 0:
        raise MalformedInput(f"Horizon must be non-negative, got {t}")
    if system.dim > 2:
        logger.warning(f"Reach sampling on {system.system_name} is slow at {cfg.n_samples} samples")
    workers = max(1, min(cfg.workers, cfg.n_samples)) if cfg.n_samples else 1
    streams = np.random.SeedSequence(cfg.seed).spawn(workers)
    counts = _split_counts(cfg.n_samples, workers)
    offsets = np.cumsum([0] + counts[:-1])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_sample_chunk, system_id, system, t, c, int(o), cfg, s)
            for c, o, s in zip(counts, offsets, streams)
        ]
        points = np.concatenate([f.result() for f in futures])
    logger.info(f"Sampled {len(points)} {system_id.value} endpoints at t = {t}")
    return ReachCloud(
        system_id=system_id,
        t_horizon=t,
        points=points,
        seed=cfg.seed,
        n_samples=cfg.n_samples,
        n_switches=cfg.n_switches,
        v_max=cfg.v_max if system_id is SystemKind.UNREDUCED else None,
        metric="coset" if system_id is SystemKind.REDUCED else "frobenius",
    )


def nested_reach(system_id: SystemKind, system, times: List[float],
                 cfg: Optional[ReachConfig] = None) -> List[ReachCloud]:
    """Reachable-up-to-t clouds from prefixes of one set of schedules"""
    cfg = ReachConfig() if cfg is None else cfg
    if system_id is SystemKind.UNREDUCED and cfg.unreduced_mode == "pulsed":
        raise MalformedInput("Nested sampling needs piecewise-constant schedules, not pulsed ones")
    times = sorted(times)
    rng = np.random.default_rng(cfg.seed)
    horizon = times[-1] if times else 0.0
    if system_id is SystemKind.UNREDUCED:
        schedule = draw_unreduced_schedule(system, horizon, cfg.n_samples, cfg, rng)
    else:
        schedule = draw_adjoint_schedule(system, horizon, cfg.n_samples, cfg, rng)
    clouds, accumulated = [], np.zeros((0, system.dim, system.dim), dtype=complex)
    for t in times:
        points = propagate(schedule.truncated(t))
        if system_id is SystemKind.REDUCED:
            points = np.array([split_sym(U, system)[0] for U in points])
        accumulated = np.concatenate([accumulated, points])
        clouds.append(ReachCloud(system_id, t, accumulated.copy(), cfg.seed, cfg.n_samples, cfg.n_switches))
    return clouds


# Distances to cosets

def coset_distance(g: np.ndarray, h: np.ndarray, system, method: str = "procrustes") -> float:
    """min over k in K of ||g - h k||_F"""
    if method == "grid":
        return _coset_distance_grid(g, h, system)
    if method != "procrustes":
        raise MalformedInput(f"Unknown coset distance method: {method}")
    A = system.to_cartan_frame(np.asarray(g, dtype=complex))
    B = system.to_cartan_frame(np.asarray(h, dtype=complex))
    M = np.real(B.conj().T @ A)
    U, s, Vt = np.linalg.svd(M)
    if np.linalg.det(U @ Vt) < 0:
        s[-1] = -s[-1]
    squared = float(np.linalg.norm(A) ** 2 + np.linalg.norm(B) ** 2 - 2.0 * s.sum())
    return float(np.sqrt(max(0.0, squared)))


def _coset_distance_grid(g: np.ndarray, h: np.ndarray, system) -> float:
    """256-point sweep of K = exp(s Ix) refined by bounded 1-D minimization"""
    if system.dim != 2:
        raise DimensionCap("Grid coset distance is defined for the single-spin system only")

    def distance(s: float) -> float:
        return float(np.linalg.norm(g - h @ expm_ah(s * IX)))

    grid = 2.0 * np.pi * np.arange(_GRID_POINTS) / _GRID_POINTS
    values = np.array([distance(s) for s in grid])
    best = grid[int(np.argmin(values))]
    width = 2.0 * np.pi / _GRID_POINTS
    refined = minimize_scalar(distance, bounds=(best - width, best + width), method="bounded",
                              options={"xatol": 1e-12})
    return float(min(refined.fun, values.min()))


def coset_embedding(points: np.ndarray, system) -> np.ndarray:
    """Real vector of w w^T per point, constant on right K-cosets"""
    W = np.einsum("ij,njk,lk->nil", system.frame, points, system.frame.conj())
    S = np.einsum("nij,nkj->nik", W, W)
    flat = S.reshape(len(points), -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def set_gap(source: np.ndarray, target: np.ndarray, system) -> Tuple[float, float]:
    """(max, mean) over source of the embedded distance to the nearest target point"""
    if len(source) == 0 or len(target) == 0:
        return 0.0, 0.0
    tree = cKDTree(coset_embedding(target, system))
    distances, _ = tree.query(coset_embedding(source, system))
    return float(distances.max()), float(distances.mean())


# Equivalence of the unreduced and adjoint systems

def _random_pulse_direction(system, rng: np.random.Generator) -> np.ndarray:
    coeffs = rng.uniform(-1.0, 1.0, size=len(system.H_js))
    coeffs /= max(np.max(np.abs(coeffs)), 1e-12)
    return np.einsum("m,mij->ij", coeffs, np.array(system.H_js))


def pulsed_pair(system, t: float, count: int, v_max: float, cfg: ReachConfig,
                rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unreduced endpoints made of pulses exp((theta/v_max)(H_d + v_max P))
    between free drifts, and the adjoint endpoints of the same draws with
    ideal pulses exp(theta P).
    """
    pieces = cfg.n_switches
    unreduced = np.empty((count, system.dim, system.dim), dtype=complex)
    adjoint = np.empty_like(unreduced)
    for s in range(count):
        thetas = rng.uniform(-np.pi, np.pi, size=pieces + 1)
        directions = [_random_pulse_direction(system, rng) for _ in range(pieces + 1)]
        pulse_time = float(np.sum(np.abs(thetas))) / v_max
        tau = max(0.0, t - pulse_time) / pieces
        tau_ideal = t / pieces
        drift = expm_ah(tau * system.H_d)
        drift_ideal = expm_ah(tau_ideal * system.H_d)
        real = np.eye(system.dim, dtype=complex)
        ideal = np.eye(system.dim, dtype=complex)
        pulses = np.eye(system.dim, dtype=complex)
        for p in range(pieces + 1):
            theta, P = thetas[p], directions[p]
            real = expm_ah((abs(theta) / v_max) * system.H_d + theta * P) @ real
            exact = expm_ah(theta * P)
            ideal = exact @ ideal
            pulses = exact @ pulses
            if p < pieces:
                real = drift @ real
                ideal = drift_ideal @ ideal
        unreduced[s] = real
        adjoint[s] = ideal @ pulses.conj().T
    return unreduced, adjoint


@dataclass
class GapRung:
    v_max: float
    forward_max: float
    forward_mean: float
    backward_max: float
    backward_mean: float
    paired_max: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v_max": self.v_max,
            "forward_max": self.forward_max,
            "forward_mean": self.forward_mean,
            "backward_max": self.backward_max,
            "backward_mean": self.backward_mean,
            "paired_max": self.paired_max,
        }


@dataclass
class EquivalenceReport:
    t: float
    n_samples: int
    seed: int
    rungs: List[GapRung] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "rungs": [r.to_dict() for r in self.rungs],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in self.rungs])


def equivalence_gap(t: float, system, cfg: Optional[ReachConfig] = None,
                    ladder: Optional[List[float]] = None) -> EquivalenceReport:
    """Sampled one-sided gaps between unreduced endpoints and adjoint endpoints times K"""
    cfg = ReachConfig() if cfg is None else cfg
    ladder = list(cfg.ladder if ladder is None else ladder)
    report = EquivalenceReport(t=t, n_samples=cfg.n_samples, seed=cfg.seed)
    for v_max in ladder:
        rng = np.random.default_rng(cfg.seed)
        unreduced, adjoint = pulsed_pair(system, t, cfg.n_samples, v_max, cfg, rng)
        forward = set_gap(unreduced, adjoint, system)
        backward = set_gap(adjoint, unreduced, system)
        emb_u, emb_a = coset_embedding(unreduced, system), coset_embedding(adjoint, system)
        paired = float(np.max(np.linalg.norm(emb_u - emb_a, axis=1))) if len(emb_u) else 0.0
        rung = GapRung(v_max, forward[0], forward[1], backward[0], backward[1], paired)
        logger.info(f"v_max {v_max}: forward max {forward[0]:.3e}, backward max {backward[0]:.3e}")
        report.rungs.append(rung)
    return report


def t_inf_estimate(U_F: np.ndarray, system, cfg: Optional[ReachConfig] = None) -> float:
    """Bisection on the first time a sampled adjoint trajectory enters the eps-ball around U_F K"""
    if system.dim != 2:
        raise DimensionCap("t_inf_estimate supports the single-spin system only")
    cfg = ReachConfig() if cfg is None else cfg
    U_F = np.asarray(U_F, dtype=complex)
    if single_spin_coset_distance(np.eye(2, dtype=complex)[None], U_F)[0] <= cfg.eps:
        return 0.0

    rng = np.random.default_rng(cfg.seed)
    schedule = draw_adjoint_schedule(system, cfg.t_max, cfg.n_samples, cfg, rng)
    n_steps = int(np.ceil(cfg.t_max / cfg.dt))
    ends = np.cumsum(schedule.durations, axis=1)
    mids = (np.arange(n_steps) + 0.5) * cfg.dt
    piece = np.array([np.minimum(np.searchsorted(e, mids), cfg.n_switches - 1) for e in ends])
    steps = batch_expm(cfg.dt * schedule.generators)
    rows = np.arange(schedule.size)

    U = np.broadcast_to(np.eye(2, dtype=complex), (schedule.size, 2, 2)).copy()
    first_hit = np.full(schedule.size, np.inf)
    for i in range(n_steps):
        U = np.einsum("nij,njk->nik", steps[rows, piece[:, i]], U)
        d = single_spin_coset_distance(U, U_F)
        fresh = (d <= cfg.eps) & ~np.isfinite(first_hit)
        first_hit[fresh] = (i + 1) * cfg.dt

    if not np.any(np.isfinite(first_hit)):
        raise NotReached(f"No sampled trajectory entered the {cfg.eps}-ball of the target coset by t = {cfg.t_max}")

    def hit(t: float) -> bool:
        return bool(np.any(first_hit <= t))

    lo, hi = 0.0, cfg.t_max
    while hi - lo > 0.5 * cfg.dt:
        mid = 0.5 * (lo + hi)
        if hit(mid):
            hi = mid
        else:
            lo = mid
    logger.info(f"t_inf estimate {hi:.6f} from {int(np.isfinite(first_hit).sum())} hitting samples")
    return hi
