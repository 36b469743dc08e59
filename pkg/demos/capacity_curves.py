"""Single-letter private capacity on two closed-form channel families.

For the binary symmetric wiretap pair (Bob sees BSC(p), Eve a noisier
BSC(r)) the optimizer lands on the uniform input and the value is
h2(r) - h2(p).  For the two-pure-state channel with overlap s, the
capacity interpolates between 1 bit (orthogonal states, s=0) and 0
(identical states, s=1).  Both curves compare the numerical optimizer
against the closed form at every point.
"""

import numpy as np

from secrecy.capacity import (bsc_wiretap_capacity_formula,
                              private_capacity_degraded,
                              two_pure_state_capacity_formula)
from secrecy.channels import bsc_wiretap_channel, two_pure_state_channel


def main():
    print("BSC wiretap pair, p = 0.1, sweeping Eve's flip rate r:")
    print(f"  {'r':>5s} {'numeric':>10s} {'closed form':>12s} {'diff':>10s}")
    for r in (0.15, 0.2, 0.3, 0.4):
        ch = bsc_wiretap_channel(0.1, r)
        num = private_capacity_degraded(ch).value
        ref = bsc_wiretap_capacity_formula(0.1, r)
        print(f"  {r:>5.2f} {num:>10.6f} {ref:>12.6f} {num - ref:>+10.2e}")

    print("\ntwo-pure-state channel, sweeping the overlap s:")
    print(f"  {'s':>5s} {'numeric':>10s} {'closed form':>12s} {'diff':>10s}")
    for s in (0.0, 0.25, 1.0 / np.sqrt(2.0), 0.9):
        ch = two_pure_state_channel(s)
        num = private_capacity_degraded(ch).value
        ref = two_pure_state_capacity_formula(s)
        print(f"  {s:>5.3f} {num:>10.6f} {ref:>12.6f} {num - ref:>+10.2e}")

    ch = bsc_wiretap_channel(0.1, 0.2)
    res = private_capacity_degraded(ch)
    print(f"\noptimizer diagnostics at (p, r) = (0.1, 0.2):")
    print(f"  value              {res.value:.10f}")
    print(f"  input distribution "
          f"{tuple(float(round(q, 6)) for q in res.distribution)}")
    print(f"  gradient residual  {res.gradient_residual:.2e}")
    print(f"  multistart spread  {res.spread:.2e}")


if __name__ == "__main__":
    main()
