"""
Maximum-principle tools: the closed-form extremal family
g(t) = exp(-Ct) exp((C + A)t) with A in Ad_K H_d and C in k, its
extremality residuals, and the bang-bang double integrator.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Any, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from control.reach import coset_distance
from lie.cartan import SymmetricPair, cartan_split, killing_norm, killing_su
from lie.kakdec import pi_A
from lie.kron import comm
from lie.matcore import MatC, expm_ah
from utils.errors import MalformedInput, NotReached

logger = logging.getLogger(__name__)

_SMALL_STEP = 1e-3


@dataclass
class ExtremalParams:
    A: np.ndarray
    C: np.ndarray

    @classmethod
    def build(cls, A: np.ndarray, C: np.ndarray, system) -> 'ExtremalParams':
        """Check A is K-conjugate to the drift and C lies in k"""
        A = np.asarray(A, dtype=complex)
        C = np.asarray(C, dtype=complex)
        if A.shape != system.H_d.shape or C.shape != system.H_d.shape:
            raise MalformedInput(f"A and C must be {system.dim}x{system.dim}")
        c_p = float(np.linalg.norm(cartan_split(C, system.pair)[1]))
        if c_p > 1e-10:
            raise MalformedInput(f"C has a component {c_p:.3e} outside k")
        norm_a, norm_d = killing_norm(A), killing_norm(system.H_d)
        if abs(norm_a - norm_d) > 1e-8 * max(1.0, norm_d):
            raise MalformedInput(f"A has Killing norm {norm_a:.12g}, drift has {norm_d:.12g}")
        step_a = pi_A(expm_ah(_SMALL_STEP * A), system)
        step_d = pi_A(expm_ah(_SMALL_STEP * system.H_d), system)
        if float(np.max(np.abs(step_a - step_d))) > 1e-8:
            raise MalformedInput("A is not conjugate to the drift under K")
        return cls(A=A, C=C)

    def to_dict(self) -> Dict[str, Any]:
        return {"A": MatC.of(self.A).to_dict(), "C": MatC.of(self.C).to_dict()}


@dataclass
class ExtremalPoint:
    t: float
    g: np.ndarray
    X: np.ndarray
    u: np.ndarray


def extremal_traj(p: ExtremalParams, t: float) -> ExtremalPoint:
    """g = exp(-Ct) exp((C+A)t), u = Ad_{exp(-Ct)} A, X = -u + C"""
    back = expm_ah(-t * p.C)
    g = back @ expm_ah(t * (p.C + p.A))
    u = back @ p.A @ back.conj().T
    X = -u + p.C
    return ExtremalPoint(t=t, g=g, X=X, u=u)


def extremality_residual(X: np.ndarray, u: np.ndarray, pair: SymmetricPair) -> float:
    """max over k basis Z of |kappa([X,u], Z)|, normalized by Killing norms"""
    norm_x, norm_u = killing_norm(X), killing_norm(u)
    if norm_x == 0.0 or norm_u == 0.0:
        return 0.0
    bracket = comm(X, u)
    worst = 0.0
    for Z in pair.k_matrices:
        worst = max(worst, abs(killing_su(bracket, Z)) / (norm_x * norm_u * killing_norm(Z)))
    return worst


def hamiltonian(X: np.ndarray, u: np.ndarray) -> float:
    return killing_su(X, u)


def ode_residuals(p: ExtremalParams, t: float, h: float = 1e-4) -> Tuple[float, float]:
    """Central-difference residuals of g' = u g and X' = [X, u]"""
    before, here, after = extremal_traj(p, t - h), extremal_traj(p, t), extremal_traj(p, t + h)
    g_dot = (after.g - before.g) / (2 * h)
    x_dot = (after.X - before.X) / (2 * h)
    return (
        float(np.linalg.norm(g_dot - here.u @ here.g)),
        float(np.linalg.norm(x_dot - comm(here.X, here.u))),
    )


def sample_extremal(p: ExtremalParams, pair: SymmetricPair, t_max: float, samples: int) -> pd.DataFrame:
    """Rows of t, g entries, extremality residual and Hamiltonian"""
    rows = []
    for t in np.linspace(0.0, t_max, samples):
        point = extremal_traj(p, float(t))
        row = {"t": float(t)}
        dim = point.g.shape[0]
        for i in range(dim):
            for j in range(dim):
                row[f"re_{i}{j}"] = point.g[i, j].real
                row[f"im_{i}{j}"] = point.g[i, j].imag
        row["residual"] = extremality_residual(point.X, point.u, pair)
        row["hamiltonian"] = hamiltonian(point.X, point.u)
        rows.append(row)
    return pd.DataFrame(rows)


def extremal_hit_time(p: ExtremalParams, U_F: np.ndarray, system, t_max: float = 2 * np.pi,
                      samples: int = 4096, eps: float = 1e-3) -> float:
    """First time the extremal curve makes a closest approach to U_F K within eps"""

    def distance(t: float) -> float:
        return coset_distance(extremal_traj(p, t).g, U_F, system)

    times = np.linspace(0.0, t_max, samples)
    values = np.array([distance(float(t)) for t in times])
    step = times[1] - times[0]
    for i in range(samples):
        left = values[i - 1] if i > 0 else np.inf
        right = values[i + 1] if i + 1 < samples else np.inf
        if values[i] <= left and values[i] <= right and values[i] <= 10 * eps:
            lo, hi = max(0.0, times[i] - step), min(t_max, times[i] + step)
            refined = minimize_scalar(distance, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
            if refined.fun <= eps:
                return float(refined.x)
    raise NotReached(f"Extremal curve stays farther than {eps} from the target coset up to t = {t_max}")


# Double integrator x1'' = u, |u| <= 1

@dataclass
class DoubleIntState:
    x1: float
    x2: float

    def __post_init__(self):
        if not (np.isfinite(self.x1) and np.isfinite(self.x2)):
            raise MalformedInput(f"Non-finite state ({self.x1}, {self.x2})")


@dataclass
class BangBangSchedule:
    t_final: float
    switch_times: List[float]
    controls: List[int]
    durations: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t_final": self.t_final,
            "switch_times": self.switch_times,
            "controls": self.controls,
            "durations": self.durations,
        }


def double_int_optimal(x0: DoubleIntState) -> BangBangSchedule:
    """Time-optimal steering to the origin with at most one switch"""
    x1, x2 = x0.x1, x0.x2
    if x1 == 0.0 and x2 == 0.0:
        return BangBangSchedule(t_final=0.0, switch_times=[], controls=[], durations=[])
    sigma = x1 + 0.5 * x2 * abs(x2)
    if sigma > 0:
        root = np.sqrt(x1 + 0.5 * x2 ** 2)
        durations, controls = [x2 + root, root], [-1, 1]
    elif sigma < 0:
        root = np.sqrt(-x1 + 0.5 * x2 ** 2)
        durations, controls = [-x2 + root, root], [1, -1]
    else:
        durations, controls = [abs(x2)], [-int(np.sign(x2))]
    durations = [float(max(0.0, d)) for d in durations]
    switch_times = [durations[0]] if len(durations) == 2 else []
    return BangBangSchedule(
        t_final=float(sum(durations)),
        switch_times=switch_times,
        controls=controls,
        durations=durations,
    )


def integrate_double_int(x0: DoubleIntState, schedule: BangBangSchedule) -> DoubleIntState:
    """Exact piecewise-quadratic flow of the schedule"""
    x1, x2 = x0.x1, x0.x2
    for u, tau in zip(schedule.controls, schedule.durations):
        x1 += x2 * tau + 0.5 * u * tau ** 2
        x2 += u * tau
    return DoubleIntState(x1=x1, x2=x2)
