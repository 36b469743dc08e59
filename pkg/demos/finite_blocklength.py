"""Finite-blocklength converse: B(n) = n*P + o(n) with explicit terms.

For a degraded wiretap channel and target errors inside the converse
region (eps + 2*delta < 1), the n-use bound splits into the capacity
term plus named overheads (type counting, spectrum widths, chain-rule
and hashing surcharges).  The per-use overhead decays like
sqrt(log n / n).  Outside the region the bound refuses to certify
anything: that's the no-go half of the tradeoff.
"""

import math

from secrecy.capacity import private_capacity_degraded
from secrecy.channels import bsc_wiretap_channel, check_degraded
from secrecy.converse import (OutsideConverseRegion, classify_region,
                              finite_n_converse, finite_n_terms)


def main():
    channel = bsc_wiretap_channel(0.1, 0.2)
    structure = check_degraded(channel)
    cap = private_capacity_degraded(channel, structure).value
    eps, delta = 0.1, 0.1
    print(f"channel {channel.name}, P = {cap:.6f}, "
          f"targets eps={eps}, delta={delta} "
          f"({classify_region(eps, delta).label} region)")

    print(f"\n  {'n':>6s} {'B(n)':>12s} {'B/n':>10s} {'(B-nP)/n':>10s}")
    for n in (100, 300, 1000, 3000, 10000):
        b = finite_n_converse(channel, structure, n, eps, delta, capacity=cap)
        print(f"  {n:>6d} {b:>12.3f} {b / n:>10.6f} "
              f"{(b - n * cap) / n:>10.6f}")

    terms = finite_n_terms(channel, structure, 1000, eps, delta, capacity=cap)
    print(f"\nterm breakdown at n = 1000 (general encoders):")
    for label, value in [
        ("capacity term n*P", terms.capacity_term),
        ("spectrum width (upper)", terms.aep_upper_width),
        ("spectrum width (lower)", terms.aep_lower_width),
        ("chain-rule surcharge", terms.chain_cost),
        ("type counting", terms.type_cost),
        ("hashing surcharge", terms.hashing_cost),
    ]:
        print(f"  {label:<26s} {value:>12.3f}")
    print(f"  {'total B(n)':<26s} {terms.total:>12.3f}")

    ct = finite_n_terms(channel, structure, 1000, eps, delta,
                        constant_type=True, capacity=cap)
    print(f"\nconstant-type encoders tighten the same bound: "
          f"{ct.total:.3f} < {terms.total:.3f}")

    print("\noutside the region the bound raises instead of lying:")
    try:
        finite_n_converse(channel, structure, 1000, 0.5, 0.3, capacity=cap)
    except OutsideConverseRegion as ex:
        print(f"  OutsideConverseRegion: eps + 2 delta = {ex.line:.2f} >= 1")
    v = classify_region(0.9, 0.9)
    print(f"  and (0.9, 0.9) is provably unattainable: {v.label} "
          f"(eps^2 + delta^2 = {v.circle:.2f} >= 1)")


if __name__ == "__main__":
    main()
