"""Capacity optimizers for wiretap channels with classical inputs.

For a degraded channel the private capacity is a single-letter quantity:
the input distribution maximizing the conditional mutual information
I(X : F | E') evaluated through the Stinespring dilation V : B -> E' (x) F
of the degrading map.  The same projected-gradient machinery also drives
the Holevo quantity of a cq ensemble and the difference-of-mutual-
informations lower bound that needs no degradedness assumption.

All optimizers run projected gradient ascent on the probability simplex
with central-difference gradients, step halving, and several random
restarts.  Results carry a first-order certificate (the norm of the
projected-gradient fixed-point residual) and the spread of the restart
values, so callers can assert convergence rather than trust it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels import CqqWiretapChannel, DegradedStructure, check_degraded
from .quantum import (DensityOperator, ValidationError, binary_entropy,
                      von_neumann_entropy)

__all__ = [
    "CapacityResult",
    "private_capacity_degraded",
    "classical_capacity_cq",
    "p1_general_lower_bound",
    "grid_search_binary",
    "holevo_of",
    "bsc_wiretap_capacity_formula",
    "two_pure_state_capacity_formula",
]

_DIFF_H = 1e-6
_CONV_TOL = 1e-10
_MAX_ITERS = 5000


@dataclass
class CapacityResult:
    """Optimized value with its convergence evidence."""

    value: float
    distribution: np.ndarray
    gradient_residual: float
    spread: float
    iterations: int

    @property
    def certified(self) -> bool:
        return self.gradient_residual <= 1e-6 and self.spread <= 1e-6


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    cond = u - css / idx > 0
    rho = int(np.max(np.nonzero(cond)[0])) if np.any(cond) else 0
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _central_gradient(f: Callable[[np.ndarray], float], p: np.ndarray,
                      h: float = _DIFF_H) -> np.ndarray:
    g = np.zeros_like(p)
    fp = None
    for i in range(len(p)):
        e = np.zeros_like(p)
        e[i] = h
        if p[i] >= h:
            g[i] = (f(p + e) - f(p - e)) / (2.0 * h)
        else:
            # boundary coordinate: one-sided difference keeps weights valid
            if fp is None:
                fp = f(p)
            g[i] = (f(p + e) - fp) / h
    return g


def _ascend(f: Callable[[np.ndarray], float], p0: np.ndarray
            ) -> tuple[float, np.ndarray, float, int]:
    p = _project_simplex(np.asarray(p0, dtype=float))
    fp = f(p)
    step = 1.0
    iters = 0
    for iters in range(1, _MAX_ITERS + 1):
        g = _central_gradient(f, p)
        residual = float(np.linalg.norm(_project_simplex(p + g) - p))
        if residual <= _CONV_TOL:
            break
        t = min(step * 2.0, 1.0)
        improved = False
        while t > 1e-14:
            cand = _project_simplex(p + t * g)
            fc = f(cand)
            if fc > fp + 1e-14:
                p, fp, step = cand, fc, t
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    g = _central_gradient(f, p)
    residual = float(np.linalg.norm(_project_simplex(p + g) - p))
    return fp, p, residual, iters


def _multistart(f: Callable[[np.ndarray], float], size: int, starts: int,
                seed: int) -> CapacityResult:
    rng = np.random.default_rng(seed)
    inits = [np.full(size, 1.0 / size)]
    inits += [rng.dirichlet(np.ones(size)) for _ in range(max(0, starts - 1))]
    best = None
    values = []
    total_iters = 0
    for p0 in inits:
        val, p, residual, iters = _ascend(f, p0)
        values.append(val)
        total_iters += iters
        if best is None or val > best[0]:
            best = (val, p, residual)
    spread = float(max(values) - min(values))
    return CapacityResult(value=float(best[0]), distribution=best[1],
                          gradient_residual=float(best[2]), spread=spread,
                          iterations=total_iters)


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------

def _entropy_mat(mat: np.ndarray) -> float:
    return von_neumann_entropy(DensityOperator(mat, (mat.shape[0],),
                                               validate=False))


def _holevo_objective(mats: Sequence[np.ndarray]) -> Callable:
    ents = [_entropy_mat(m) for m in mats]

    def f(p: np.ndarray) -> float:
        avg = sum(float(w) * m for w, m in zip(p, mats))
        return _entropy_mat(avg) - float(sum(w * e for w, e in zip(p, ents)))

    return f


def private_capacity_degraded(channel: CqqWiretapChannel,
                              structure: DegradedStructure | None = None,
                              starts: int = 5, seed: int = 0
                              ) -> CapacityResult:
    """Maximize I(X : F | E') through the degrading map's dilation.

    With classical X the objective reduces to
    ``S(mix) - S(mix^{E'}) - sum_x P(x) [S(tau_x) - S(tau_x^{E'})]``
    for tau_x the dilated receiver states on E' (x) F, which the optimizer
    evaluates directly from eigenvalues.
    """
    if structure is None:
        structure = check_degraded(channel)
        if structure is None:
            raise ValidationError(
                "channel is not degraded; the single-letter formula "
                "does not apply")
    v = structure.isometry.mat
    de, df = structure.isometry.out_dims
    taus = []
    taus_e = []
    consts = []
    for x in range(channel.size):
        tau = v @ channel.bob_marginal(x).mat @ v.conj().T
        full = DensityOperator(tau, (de, df), validate=False)
        tau_e = full.partial_trace([0]).mat
        taus.append(tau)
        taus_e.append(tau_e)
        consts.append(_entropy_mat(tau) - _entropy_mat(tau_e))

    def f(p: np.ndarray) -> float:
        joint = sum(float(w) * t for w, t in zip(p, taus))
        marg = sum(float(w) * t for w, t in zip(p, taus_e))
        lin = float(sum(w * c for w, c in zip(p, consts)))
        return _entropy_mat(joint) - _entropy_mat(marg) - lin

    return _multistart(f, channel.size, starts, seed)


def classical_capacity_cq(states: Sequence[DensityOperator],
                          starts: int = 5, seed: int = 0) -> CapacityResult:
    """Holevo quantity of a cq ensemble, maximized over the input weights."""
    if len(states) < 2:
        raise ValidationError("need at least two signal states")
    dims = {s.dims for s in states}
    if len(dims) != 1:
        raise ValidationError("signal states live on different systems")
    return _multistart(_holevo_objective([s.mat for s in states]),
                       len(states), starts, seed)


def p1_general_lower_bound(channel: CqqWiretapChannel,
                           aux_size: int | None = None,
                           starts: int = 5, seed: int = 0) -> CapacityResult:
    """Maximize I(U:B) - I(U:E) over input strategies.

    With ``aux_size`` omitted (or equal to the alphabet size) the auxiliary
    variable is the input itself and only its distribution is optimized.
    A larger auxiliary alphabet additionally optimizes the conditional
    rows; any feasible point is a valid achievability bound, so local
    optima are acceptable there.
    """
    bob = [channel.bob_marginal(x).mat for x in range(channel.size)]
    eve = [channel.eve_marginal(x).mat for x in range(channel.size)]
    f_b = _holevo_objective(bob)
    f_e = _holevo_objective(eve)

    if aux_size is None or aux_size == channel.size:
        return _multistart(lambda p: f_b(p) - f_e(p),
                           channel.size, starts, seed)

    if aux_size < 1:
        raise ValidationError("auxiliary alphabet must be nonempty")
    k, m = int(aux_size), channel.size
    rng = np.random.default_rng(seed)

    def unpack(theta: np.ndarray):
        pu = theta[:k]
        rows = theta[k:].reshape(k, m)
        return pu, rows

    def value(theta: np.ndarray) -> float:
        pu, rows = unpack(theta)
        total = 0.0
        mix_b = [sum(float(r) * b for r, b in zip(row, bob)) for row in rows]
        mix_e = [sum(float(r) * e for r, e in zip(row, eve)) for row in rows]
        avg_b = sum(float(w) * mb for w, mb in zip(pu, mix_b))
        avg_e = sum(float(w) * me for w, me in zip(pu, mix_e))
        total += _entropy_mat(avg_b) - sum(
            float(w) * _entropy_mat(mb) for w, mb in zip(pu, mix_b))
        total -= _entropy_mat(avg_e) - sum(
            float(w) * _entropy_mat(me) for w, me in zip(pu, mix_e))
        return total

    def project(theta: np.ndarray) -> np.ndarray:
        pu, rows = unpack(theta)
        out = np.concatenate([_project_simplex(pu)]
                             + [_project_simplex(r) for r in rows])
        return out

    best = None
    values = []
    total_iters = 0
    for s in range(max(1, starts)):
        if s == 0:
            pu = np.full(k, 1.0 / k)
            rows = np.vstack([np.eye(m)[i % m] for i in range(k)])
        else:
            pu = rng.dirichlet(np.ones(k))
            rows = rng.dirichlet(np.ones(m), size=k)
        theta = np.concatenate([pu, rows.reshape(-1)])
        fp = value(theta)
        step = 1.0
        for it in range(1, _MAX_ITERS + 1):
            total_iters += 1
            g = _central_gradient(value, theta)
            residual = float(np.linalg.norm(project(theta + g) - theta))
            if residual <= _CONV_TOL:
                break
            t = min(step * 2.0, 1.0)
            improved = False
            while t > 1e-14:
                cand = project(theta + t * g)
                fc = value(cand)
                if fc > fp + 1e-14:
                    theta, fp, step = cand, fc, t
                    improved = True
                    break
                t *= 0.5
            if not improved:
                break
        g = _central_gradient(value, theta)
        residual = float(np.linalg.norm(project(theta + g) - theta))
        values.append(fp)
        if best is None or fp > best[0]:
            best = (fp, theta, residual)
    return CapacityResult(value=float(best[0]), distribution=best[1],
                          gradient_residual=float(best[2]),
                          spread=float(max(values) - min(values)),
                          iterations=total_iters)


# ---------------------------------------------------------------------------
# independent cross-checks
# ---------------------------------------------------------------------------

def grid_search_binary(objective: Callable[[np.ndarray], float],
                       step: float = 1e-4) -> tuple[float, float]:
    """Exhaustive scan of a two-point distribution; returns (value, weight)."""
    if not 0.0 < step < 0.5:
        raise ValidationError("grid step must lie in (0, 0.5)")
    best_v, best_p = -math.inf, 0.0
    n = int(round(1.0 / step))
    for k in range(n + 1):
        p = k / n
        v = objective(np.array([p, 1.0 - p]))
        if v > best_v:
            best_v, best_p = v, p
    return best_v, best_p


def holevo_of(states: Sequence[DensityOperator]) -> Callable:
    """Holevo quantity of the given states as a function of the weights."""
    return _holevo_objective([s.mat for s in states])


def bsc_wiretap_capacity_formula(p: float, r: float) -> float:
    """Closed form for the binary symmetric wiretap: h2(p(1-r)+(1-p)r) - h2(p)."""
    q = p * (1.0 - r) + (1.0 - p) * r
    return binary_entropy(q) - binary_entropy(p)


def two_pure_state_capacity_formula(overlap: float) -> float:
    """Closed form for two pure signal states with the given overlap and an
    uninformative eavesdropper: h2((1+overlap)/2)."""
    return binary_entropy((1.0 + overlap) / 2.0)
