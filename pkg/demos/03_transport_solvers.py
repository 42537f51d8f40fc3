"""Spectral solvers for fractional advection, FADE and directional heat flow.

Every solver multiplies the Fourier transform of the datum by an exact
symbol on a periodic box, so mass is conserved to rounding and the
semigroup property holds exactly.
"""

from dataclasses import replace

import numpy as np

import fracflow as ff

# Green function of fractional advection: one-sided, supported in a cone.
# The tail is heavy, so the box is large and the wrapped mass is small.
g = ff.Grid((512, 512), 160.0, origin=(-20.0, -20.0))
frame = ff.Frame.canonical(2)
u = np.array([1.0, 1.0])
rho = ff.greens_function(frame, u, 0.7, 4.0, g)
x, y = g.mesh(sparse=False)
outside = rho.values[(x < -2 * g.dx[0]) | (y < -2 * g.dx[1])].sum() * g.cell_volume
print(f"advection Green function: mass {rho.mass():.12f}, mass outside the cone {outside:.2e}")
# what the periodic box folds back into the strip: P(H in a wrapped copy of it)
law = ff.StableLaw(0.7)
lo, hi = -20.0 - 2 * g.dx[0] + 160 * np.arange(1, 3000), -2 * g.dx[0] + 160 * np.arange(1, 3000)
strip = (ff.stable_cdf(law, hi, 4.0) - ff.stable_cdf(law, lo, 4.0)).sum()
print(f"expected from wrap-around alone: {1 - (1 - strip) ** 2:.2e}")

# semigroup: two half steps equal one full step
frame = ff.frame_from_angles([np.pi / 6])
u = frame.matrix.T @ np.array([1.0, 0.6])
spec = ff.SolveSpec("advection", ff.Grid((256, 256), 40.0), 0.7, 0.5, frame=frame, u=u, initial="gaussian")
half = ff.solve_advection(spec)
two = ff.solve_advection(replace(spec, initial=half))
one = ff.solve_advection(spec.with_time(1.0))
print(f"semigroup defect: {np.abs(two.values - one.values).max():.2e}")

# FADE: advection then dispersion equals the combined solve
fade = ff.SolveSpec("fade", ff.Grid((128, 128), 40.0), 0.6, 0.8, frame=frame, u=u, beta=1.4,
                    initial={"name": "gaussian", "width": 1.0})
split = ff.solve_dispersion(replace(fade, initial=ff.solve_advection(fade)))
print(f"FADE factorisation defect: {np.abs(ff.solve_fade(fade).values - split.values).max():.2e}")

# directional heat flow at alpha = 1/2 gives the Cauchy kernel
g1 = ff.Grid(4096, 200.0)
x = g1.axes()[0]
free = ff.solve_heat_directional("delta", [1.0], 0.5, 1.0, g1, method="free-space")
cauchy = 1 / (np.pi * (x * x + 1))
print(f"alpha = 1/2 heat kernel vs Cauchy, L1: {np.abs(free.values - cauchy).sum() * g1.dx[0]:.2e}")
