"""Randomized check of the one-shot entropy calculus.

Every inequality the converse machinery leans on (data processing,
chain rules with explicit smoothing surcharges, min/max conversions,
quasi-concavity, and the finite-n corridor) is checked on seeded random
states.  Each row is an independent instance; slack >= 0 means the
inequality held with room to spare.
"""

from collections import defaultdict

from secrecy.lemmas import RULES, csv_text, run_harness


def main():
    trials = 25
    rows = run_harness(rules=RULES, trials=trials, seed=2024)

    by_rule = defaultdict(list)
    for seed, report in rows:
        by_rule[report.rule].append(report.slack)

    print(f"{'rule':<20s} {'instances':>9s} {'min slack':>12s} "
          f"{'median slack':>13s}")
    for rule in RULES:
        slacks = sorted(by_rule[rule])
        med = slacks[len(slacks) // 2]
        print(f"{rule:<20s} {len(slacks):>9d} {min(slacks):>+12.3e} "
              f"{med:>+13.3e}")

    bad = [(s, r) for s, r in rows if not r.holds]
    print(f"\n{len(rows)} instances, {len(bad)} violations")
    print("\nfirst CSV lines (the harness's exchange format):")
    for line in csv_text(rows).splitlines()[:4]:
        print(" ", line)


if __name__ == "__main__":
    main()
