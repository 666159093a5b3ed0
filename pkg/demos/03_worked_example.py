"""Replay of the F_11 walk-through with three holders.

The printed polynomial is fed in and every value is recomputed; the ones
that disagree with direct evaluation are listed.

Run: python demos/03_worked_example.py
"""

from vmqkd.worked_example import replay

r = replay()
for name, value in r.values.items():
    print(f"{name:18s} {value}")

print("\nprinted values that do not survive evaluation:")
for name, printed, computed in r.discrepancies:
    print(f"  {name:18s} printed {printed}, evaluates to {computed}")

print("\ntriple counts (S1, S2, S3):", r.counts, "->", r.decision)
print("pending two-of-three cells:", r.T)
print("harvest grew from", len(r.initial_S), "to", len(r.final_S))
print("key indices left for the next round:", r.residual)
print("\nall checks:", "ok" if r.ok else "FAILED")
