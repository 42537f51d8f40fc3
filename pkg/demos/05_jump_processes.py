"""Compound Poisson building blocks, subordination and the
Levy-Khinchine multiplier with a fractional-gradient compensator.
"""

import numpy as np

import fracflow as ff
from fracflow.validation import ProbeSet, cf_comparison

# compound Poisson with heavy-tailed folded Gaussian jumps
law = ff.JumpLaw("folded-gaussian-rademacher", dim=2, beta=0.8, r=0.5, p=0.7)
cp = ff.simulate_compound_poisson(2.0, law, 1.0, 10 ** 5, seed=1)
print(f"compound Poisson: n = {cp.n}, fraction at the origin {np.mean(np.all(cp.points == 0, axis=1)):.4f}"
      f" (exp(-2) = {np.exp(-2):.4f})")

# subordinated compound Poisson and compensated Levy: ECF vs quadrature exponent
frame = ff.frame_from_angles([0.5])
sub = ff.simulate_subordinated_cp(frame, 0.7, 2.0, law, "abs-first", 0.8, 10 ** 6, seed=2)
print(f"subordinated CP max |z| = {cf_comparison(sub)[1]:.2f}")
comp = ff.simulate_compensated_levy(frame, 0.6, 2.0, law, 1.0, 10 ** 6, seed=3)
print(f"compensated Levy max |z| = "
      f"{cf_comparison(comp, ProbeSet.default(frame, 0.1, 2.0))[1]:.2f}")

# small-jump limit of the multiplier: proportional to -|k|^(2 beta)
beta = 0.4
fr1 = ff.Frame.canonical(1)
for k in (0.5, 1.0, 2.0):
    phi = ff.levy_khinchine_multiplier([k], fr1, 0.5, beta, None, 0.5, limit=True).real
    print(f"  k = {k}: Phi(k) / -|k|^(2 beta) = {phi / -(k ** (2 * beta)):.10f}")
for r in (1e-1, 1e-2, 1e-3):
    val = ff.levy_khinchine_multiplier([1.0], fr1, 0.5, beta, r, 0.5, scaled=True).real
    print(f"  r = {r:g}: r^-beta Phi_r(1) = {val:.8f}")
