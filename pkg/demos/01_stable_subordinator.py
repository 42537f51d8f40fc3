"""One-sided alpha-stable subordinator: density, CDF, sampling.

The subordinator H_t has Laplace transform E exp(-s H_t) = exp(-t s^alpha).
At alpha = 1/2 the density is the Levy law, which gives a closed-form check.
"""

import numpy as np
from scipy.stats import kstest

import fracflow as ff

# closed form at alpha = 1/2, t = 1: h(x) = x^(-3/2) exp(-1/(4x)) / (2 sqrt(pi))
h = ff.stable_density(0.5, 1.0, 1.0)
print(f"h_1/2(1, 1) = {h:.12f}   closed form = {np.exp(-0.25) / (2 * np.sqrt(np.pi)):.12f}")

# density and CDF across the bulk
law = ff.StableLaw(0.7)
xs = np.array([0.05, 0.2, 1.0, 5.0, 50.0])
print("\nalpha = 0.7")
for x, d, c in zip(xs, ff.stable_density(law, xs), ff.stable_cdf(law, xs)):
    print(f"  x = {x:6.2f}   h = {d:.6e}   P(H <= x) = {c:.6f}")

# sampler vs density through a KS statistic
for a in (0.3, 0.5, 0.9):
    lw = ff.StableLaw(a)
    draws = ff.sample_subordinator(lw, 1.0, 10 ** 5, seed=1)
    ks = kstest(draws, lambda x: ff.stable_cdf(lw, x)).statistic
    print(f"KS(sampler, CDF) at alpha = {a}: {ks:.4f}")

# Monte Carlo Laplace transform against exp(-t s^alpha)
chk = ff.laplace_check(ff.StableLaw(0.6), s=1.5, t=2.0, n=10 ** 6, seed=7)
print(f"\nLaplace check: {chk}")
