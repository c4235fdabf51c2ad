"""
Full counting statistics of power and heat.

Dressing the jump terms with counting phases turns the generator into L(chi).
Mean and variance of a current follow from the lowest coefficients of the
characteristic polynomial of L(chi) and their chi-derivatives.  Three routes
are compared: derivative jets of the polynomial, finite differences, and
differences of the eigenvalue branch lambda(chi) through 0.
"""
from qengine import CountedObservable, EngineParams, cumulants, cumulants_closed
from qengine.fcs import lambda_branch, lambda_cumulants

p = EngineParams(gamma0=0.01, omega_h=10.0, omega_c=5.0, beta_h=0.01, beta_c=0.8, alpha=0.02,
                 kind="incoherent")

print("%-13s %-8s %-22s %-22s %s" % ("observable", "route", "mean", "variance", "nsr"))
for obs in CountedObservable:
    rows = [("closed", cumulants_closed(p, obs)),
            ("jet", cumulants(p, obs)),
            ("fd", cumulants(p, obs, method="fd")),
            ("branch", lambda_cumulants(p, obs))]
    for route, r in rows:
        print("%-13s %-8s %-22.15e %-22.15e %.12g" % (obs.value, route, r.mean, r.variance, r.nsr))

# The NSR is the same whichever current is counted: every jump moves the
# same quanta through both baths.
# Near chi = 0 the branch is smooth and conjugate symmetric
for chi in (0.0, 0.01, -0.01):
    print("lambda(%+.2f) = %s" % (chi, lambda_branch(p, CountedObservable.POWER, chi)))
