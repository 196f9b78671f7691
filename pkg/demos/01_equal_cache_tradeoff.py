#!/usr/bin/env python3
"""The equal-cache rate-memory trade-off, and the plans behind its corners.

Sweeps the cache size M from 0 to N for a small system and prints the exact
worst-case rate next to its decimal value.  At the integer points t = K*M/N
the scheme is a single placement; in between, memory sharing mixes the two
neighbouring integer schemes, which is why the curve is piecewise linear.
"""

from fractions import Fraction

from cachecast import equal_scheme, rate_eq

N, K = 10, 4

print(f"rate-memory trade-off for N={N} files, K={K} equal caches")
print(f"{'M':>8} {'t=KM/N':>8} {'rate':>10} {'decimal':>10}")
M = Fraction(0)
while M <= N:
    r = rate_eq(N, K, M)
    print(f"{str(M):>8} {str(Fraction(K, N) * M):>8} {str(r):>10} {float(r):>10.4f}")
    M += Fraction(5, 4)

# The corner at t = 1: every file is split into C(4,1) = 4 subfiles and each
# transmission serves t + 1 = 2 users at once.
M = Fraction(N, K)
placement, plan = equal_scheme(N, K, M, d=(1, 2, 3, 4))
print(f"\nat M = {M} (t = 1): {len(placement.subfiles)} placed subfiles,")
print(f"{len(plan.transmissions)} transmissions of length "
      f"{plan.transmissions[0].length} each, total load {plan.total_load}")

print("\nfirst three transmissions (file, [start, stop), for user):")
for tx in plan.transmissions[:3]:
    desc = " XOR ".join(
        f"W{p.segment.file}[{p.segment.start},{p.segment.stop})->{p.target}"
        for p in tx.parts
    )
    print("  " + desc)
