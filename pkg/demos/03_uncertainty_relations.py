"""
Classical and quantum uncertainty relations.

The classical bound asks q = (entropy rate) x NSR >= 2.  Coherence lowers the
Fano factor below its population value, and strong enough coherence pushes q
under 2.  The quantum bound NSR >= 1/(upsilon + psi) always holds; psi needs
the Drazin inverse of the generator.
"""
import numpy as np

from qengine import EngineKind, EngineParams, drazin, fano, liouvillian, steady_numeric, tur_report
from qengine.bounds import drazin_closed

fig4b = dict(gamma0=0.01, omega_h=10.0, omega_c=5.0, beta_h=0.003, beta_c=0.7)

print("%-11s %-8s %-8s %-8s %-10s %-10s %s" % ("kind", "alpha", "F", "q", "nsr", "f", "violated"))
for kind in EngineKind:
    for a in (0.003, 0.02, 0.12, 0.5):
        p = EngineParams(alpha=a, kind=kind, **fig4b)
        rep = tur_report(p)
        print("%-11s %-8.3g %-8.4f %-8.4f %-10.4g %-10.4g %s"
              % (kind.value, a, fano(p).f_total, rep.q_value, rep.nsr, rep.f_bound, rep.ctur_violated))

# The Drazin inverse from a projected linear solve, against the closed form
p = EngineParams(alpha=0.12, kind="incoherent", **fig4b)
L = liouvillian(p)
lp = drazin(L, steady_numeric(L))
print("\nmax |L+ - closed form| =", np.abs(lp - drazin_closed(p)).max())
