"""Shared test fixtures: constructive SDP instances and small closed forms.

The strictly feasible SDP generator builds an instance *from* a known
interior primal/dual pair, so feasibility (and strong duality) is guaranteed
by construction rather than by trusting the solver under test.
"""

import numpy as np

from secrecy.sdp import SdpProblem


def rand_herm(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


def rand_pd(d: int, rng: np.random.Generator, floor: float = 0.3) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g @ g.conj().T + floor * np.eye(d)


def strictly_feasible_sdp(rng: np.random.Generator,
                          block_dims=(3, 2), m: int = 4) -> SdpProblem:
    """Random SDP with strictly feasible primal AND dual built constructively.

    Primal witness: random PD blocks X0 with b := A(X0).
    Dual witness: random y0 and PD slack S0 with C := sum y0_i A_i + S0.
    Both problems then have interior points, so strong duality holds and the
    solver must close the gap.
    """
    block_dims = list(block_dims)
    x0 = [rand_pd(d, rng) for d in block_dims]
    s0 = [rand_pd(d, rng) for d in block_dims]
    y0 = rng.normal(size=m)
    rows = []
    for _ in range(m):
        rows.append({j: rand_herm(d, rng) for j, d in enumerate(block_dims)})
    c_blocks = []
    for j, d in enumerate(block_dims):
        acc = s0[j].copy()
        for i in range(m):
            acc += y0[i] * rows[i][j]
        c_blocks.append(acc)
    prob = SdpProblem(block_dims, c_blocks)
    for i in range(m):
        rhs = sum(float(np.real(np.trace(rows[i][j] @ x0[j])))
                  for j in range(len(block_dims)))
        prob.add_constraint(rows[i], rhs)
    return prob


def positive_part_trace(a: np.ndarray) -> float:
    """Closed form for min tr X s.t. X >= A, X >= 0: sum of positive eigenvalues."""
    vals = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return float(np.sum(vals[vals > 0]))
