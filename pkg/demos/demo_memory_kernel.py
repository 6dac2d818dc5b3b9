"""Tour of the environment model: Lorentzian spectral density and its
exponential correlation kernel.

The environment is characterized by three numbers: an overall strength, a
line width gamma (inverse memory time), and a central frequency.  Narrow
lines remember for a long time (tau = 1/gamma); wide lines forget almost
instantly, which is the memoryless limit.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nmchaos import EnvParams, ou_correlation, spectral_density

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

nu = np.linspace(-6, 10, 1000)
lags = np.linspace(0.0, 6.0, 400)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
for gamma, style in ((0.25, "-"), (1.0, "--"), (4.0, ":")):
    env = EnvParams(gamma=gamma, big_omega=2.0)
    ax1.plot(nu, [spectral_density(env, v) for v in nu], style,
             label=f"gamma={gamma} (tau={env.tau():g})")
    corr = np.array([ou_correlation(env, u) for u in lags])
    ax2.plot(lags, corr.real, style, label=f"gamma={gamma}")
ax1.set(xlabel="frequency", ylabel="spectral density",
        title="Lorentzian line at central frequency 2")
ax2.set(xlabel="time difference", ylabel="Re correlation",
        title="matching memory kernel")
ax1.legend()
ax2.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "memory_kernel.png"), dpi=120)

# numbers worth knowing: peak height and total weight
env = EnvParams(gamma=1.0, big_omega=50.0)
peak = spectral_density(env, env.big_omega)
print(f"peak density = {peak:.6f}  (Gamma/2pi = {1/(2*np.pi):.6f})")
print(f"zero-lag kernel = {ou_correlation(env, 0.0).real:.6f}  "
      f"(Gamma*gamma/2 = 0.5)")
print(f"wrote {OUT}/memory_kernel.png")
