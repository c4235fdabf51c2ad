"""
Steady states, coherence and power of the two engines.

Both engines share the same qutrit and the same baths.  The coherent engine
exchanges a hot and a cold photon in a single two-photon jump, the incoherent
one talks to each bath separately.  Here we solve both for their steady
states and look at the energetic coherence, which sets the power.
"""
import numpy as np

from qengine import EngineKind, EngineParams, liouvillian, observables, steady_closed, steady_numeric
from qengine.steady import coherence_l1, critical_alpha

# Operating point of the first figure: cold bath at beta_c = 0.8, hot at 0.01
base = dict(gamma0=0.01, omega_h=10.0, omega_c=5.0, beta_h=0.01, beta_c=0.8, alpha=0.05)

for kind in EngineKind:
    p = EngineParams(kind=kind, **base)
    L = liouvillian(p)            # 4x4 (coherent) or 9x9 (incoherent)
    rho = steady_numeric(L)
    print(kind.value, "generator", L.shape)
    print(np.round(rho, 6))
    # the closed form is an independent check
    print("max |numeric - closed| =", np.abs(rho - steady_closed(p)).max())
    obs = observables(p, rho)
    print("coherence %.6f  power %.3e  efficiency %.2f" % (coherence_l1(rho), obs.power, obs.efficiency))
    print()

# Power is -alpha (omega_h - omega_c) C, so the power ratio is the coherence ratio.
# Below the critical drive the incoherent engine holds more coherence.
p = EngineParams(kind="coherent", **base)
a_cr = critical_alpha(p)
print("alpha_cr = %.4g" % a_cr)
for a in (0.3 * a_cr, a_cr, 30 * a_cr):
    c = [observables(p.with_(alpha=a, kind=k)).coherence for k in EngineKind]
    print("alpha = %.3g  C_C/C_I = %.4f" % (a, c[0] / c[1]))
