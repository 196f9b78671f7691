#!/usr/bin/env python3
"""Inside the simulator: files as bits, XOR payloads, decoding, and a fault.

Files are materialized as seeded random bit arrays whose width is the LCM of
every segment denominator, so rational offsets land on integer bits and the
measured load can be compared to the formula rate with exact equality.  The
decoder is honest: a user reads only what its cache covers, cancels it from
each received XOR, and the reassembled file must match the server's copy
bit for bit - so flipping a single transmitted bit must be caught.
"""

from fractions import Fraction

from cachecast import UnequalConfig
from cachecast.simulator import (
    TransmissionLog,
    decode_all,
    execute_delivery,
    materialize,
    required_bits,
)
from cachecast.unequal import build_two_stage

ctx = build_two_stage(UnequalConfig(N=4, K=4, L=3, Mhat=2, M=1))
demands = (1, 2, 3, 4)
plan = ctx.plan(demands)

F = required_bits(ctx.placement, plan)
print(f"smallest exact realization: F = {F} bits per file")

store, caches = materialize(ctx.placement, plan, seed=2024)
for file in range(1, 5):
    print(f"  W{file} = {''.join(map(str, store.bits[file - 1]))}")

print("\ncache coverage (1 = cached bit), user x file:")
for user in range(1, 5):
    rows = [
        "".join("1" if b else "." for b in caches.masks[user - 1, f])
        for f in range(4)
    ]
    print(f"  user {user}: " + "  ".join(rows))

log = execute_delivery(store, plan)
print(f"\ntransmitted payloads ({log.total_bits} bits total, rate "
      f"{Fraction(log.total_bits, F)}):")
for tx, payload in zip(plan.transmissions, log.payloads):
    desc = " XOR ".join(f"W{p.segment.file}[{p.segment.start},{p.segment.stop})"
                        for p in tx.parts)
    print(f"  {''.join(map(str, payload))}  = {desc}")

report = decode_all(caches, log, demands, plan, store)
print("\ndecode:", report.line())

# flip one transmitted bit; the affected user must fail, loudly
payloads = list(log.payloads)
corrupted = payloads[0].copy()
corrupted[0] ^= 1
payloads[0] = corrupted
bad = decode_all(caches, TransmissionLog(tuple(payloads)), demands, plan, store)
print("after flipping one bit:", bad.line())
assert not bad.passed, "the verifier must catch a corrupted transmission"
print("fault caught, as required")
