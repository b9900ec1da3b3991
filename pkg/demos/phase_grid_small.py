"""Map the success region of the completion solver over (rank, rate).

Runs a small seeded phase grid: for each (tubal rank, sampling rate) cell,
generate a few ground truths, hide entries, solve, and count recoveries
with relative error below 1e-3. High rank plus low rate should fail, low
rank plus high rate should succeed, with a transition in between.

Takes about a minute; the failing cells run the solver to its iteration cap.
"""

from tubal.analysis import phase_experiment
from tubal.transforms import dft_transform

dims = (16, 16, 8)
ranks = [2, 4, 6]
rates = [0.35, 0.6, 0.85]
trials = 3

cells = phase_experiment(dims, dft_transform(dims[2]), ranks, rates,
                         trials=trials, seed=0)

by_cell = {(c.r, c.p): c for c in cells}
print(f"successes out of {trials} trials at dims {dims}")
corner = "r \\ p"
print(f"{corner:>6} " + " ".join(f"{p:>6.2f}" for p in rates))
for r in ranks:
    row = " ".join(f"{by_cell[(r, p)].successes:>6d}" for p in rates)
    print(f"{r:>6d} {row}")

failures = sum(c.gen_failures for c in cells)
if failures:
    print(f"note: {failures} ground-truth generations failed and were skipped")
