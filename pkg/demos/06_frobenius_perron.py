"""Fractional advection composed with the Frobenius-Perron operator of
the unit shift, solved spectrally and simulated as a process.
"""

import numpy as np

import fracflow as ff
from fracflow.core import fourier_forward

g = ff.Grid(512, 64.0, origin=-16.0)
spec = ff.SolveSpec("fp-transport", g, 0.5, 1.0, u=[1.0], lam=1.0)
v = ff.solve_fp_transport(spec)
rho = ff.solve_advection(spec)

# in Fourier space the Poisson shift contributes exp(-lam t (1 - e^{ik}))
k = g.wavenumbers()[0]
want = np.exp(-(1 - np.exp(1j * k))) * fourier_forward(rho).values
print(f"spectral identity defect: {np.abs(fourier_forward(v).values - want).max():.2e}")
print(f"mass: {v.mass():.12f}")

ens = ff.simulate_fp_process(ff.Frame.canonical(1), [1.0], 0.5, 1.0, 1.0, 10 ** 6, seed=4)
print(f"L1(solver, histogram): {ff.field_ensemble_distance(v, ens, wrap=True):.4f}")
