"""Conditional min-/max-entropy on small bipartite states.

Walks through the named states everyone uses to sanity-check an entropy
engine: a maximally entangled pair (conditional min-entropy -1), a
maximally mixed qubit next to anything (+1), and classically correlated
bits (0).  Then smooths: allowing an epsilon-ball in purified distance
around the state can only raise H_min and lower H_max.
"""

import numpy as np

from secrecy.entropy import EntropyQuery, h_max, h_max_smooth, h_min_smooth
from secrecy.quantum import (DensityOperator, maximally_entangled,
                             random_density)


def show(label, value):
    print(f"  {label:<38s} {value:+.6f}")


def main():
    rng = np.random.default_rng(0)

    print("exact conditional entropies (A|B):")
    bell = maximally_entangled(2)
    show("H_min, maximally entangled pair", h_min_smooth(
        EntropyQuery(bell, (0,), (1,), 0.0)))
    show("H_max, maximally entangled pair", h_max(
        EntropyQuery(bell, (0,), (1,), 0.0)))

    sigma = random_density((2,), rng)
    product = DensityOperator(np.kron(np.eye(2) / 2, sigma.mat), (2, 2))
    show("H_min, I/2 (x) sigma", h_min_smooth(
        EntropyQuery(product, (0,), (1,), 0.0)))

    corr = DensityOperator(np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex),
                           (2, 2))
    show("H_min, perfectly correlated bits", h_min_smooth(
        EntropyQuery(corr, (0,), (1,), 0.0)))

    print("\nsmoothing monotonicity on a random two-qubit state:")
    rho = random_density((2, 2), rng, rank=3)
    for eps in (0.0, 0.05, 0.1, 0.2):
        lo = h_min_smooth(EntropyQuery(rho, (0,), (1,), eps))
        hi = h_max_smooth(EntropyQuery(rho, (0,), (1,), eps))
        print(f"  eps={eps:<5.2f}  H_min={lo:+.6f}  H_max={hi:+.6f}")
    print("  (H_min rises, H_max falls, and they bracket the spectrum)")


if __name__ == "__main__":
    main()
