"""
Full counting statistics of power, heat currents and photon flux.

The dressed generator L(chi) has a characteristic polynomial
``sum a_k(chi) lambda^k``.  With derivatives taken in ``i chi`` at chi = 0,
the first two cumulants of the counted quantity are

    mean = -a0' / a1
    var  = (a0'' / a0' - 2 a1' / a1) mean - 2 (a2 / a1) mean**2

The coefficient derivatives come either from an exactly differentiated
Faddeev-LeVerrier recursion or from Richardson-extrapolated central
differences.  An independent path tracks the eigenvalue branch lambda(chi)
that vanishes at chi = 0 and differentiates it directly.

Counting fields per observable (jump weights are signed multiples of omega):

    Power        chi_h = chi_c = -chi      (work extracted counts negative)
    HotCurrent   (chi, 0)
    ColdCurrent  (0, chi)
    PhotonFlux   chi_h = chi_c = chi / (omega_h - omega_c)
"""

import enum
from dataclasses import dataclass

import numpy as np

from .engine import (CountingField, EngineKind, jump_operators, liouvillian, liouvillian_derivatives, occupations,
                     rates)
from .linalg import NoConvergence, char_poly, char_poly_jet, char_poly_low, root_near
from .steady import coherence_formula

__all__ = [
    "CountedObservable",
    "CumulantReport",
    "CoeffDerivs",
    "NumericalInstability",
    "ZeroMean",
    "counting_field",
    "coeff_derivs",
    "cumulants",
    "cumulants_closed",
    "lambda_branch",
    "lambda_cumulants",
    "population_fano",
    "k_factor",
    "fano_formula",
    "nsr_formula",
]

RICHARDSON_RTOL = 1e-7
# (step multiple, Richardson levels) tried in order by cumulants(method="fd")
FD_LADDER = ((1, 1), (4, 1), (16, 1), (16, 2))


class NumericalInstability(ArithmeticError):
    """Finite-difference derivatives disagree between step sizes."""


class ZeroMean(ZeroDivisionError):
    """The counted current has zero mean (alpha = 0); NSR is undefined."""


class CountedObservable(enum.Enum):
    POWER = "power"
    HOT_CURRENT = "hot_current"
    COLD_CURRENT = "cold_current"
    PHOTON_FLUX = "photon_flux"


@dataclass(frozen=True)
class CumulantReport:
    mean: float
    variance: float
    nsr: float


@dataclass(frozen=True)
class CoeffDerivs:
    """Polynomial data at chi = 0; primes are d/d(i chi)."""
    a1: complex
    a2: complex
    a0p: complex
    a0pp: complex
    a1p: complex
    step: float


def counting_field(params, obs, chi):
    obs = CountedObservable(obs)
    if obs is CountedObservable.POWER:
        return CountingField(-chi, -chi)
    if obs is CountedObservable.HOT_CURRENT:
        return CountingField(chi, 0.0)
    if obs is CountedObservable.COLD_CURRENT:
        return CountingField(0.0, chi)
    x = chi / (params.omega_h - params.omega_c)
    return CountingField(x, x)


def phase_rate(params, obs):
    """Largest |d phase / d chi| over the jump channels for this observable."""
    f = counting_field(params, obs, 1.0)
    return max(abs(j.weight_h * params.omega_h * f.chi_h + j.weight_c * params.omega_c * f.chi_c)
               for j in jump_operators(params))


def default_step(params, obs=CountedObservable.HOT_CURRENT):
    """Finite-difference step giving a largest phase increment of 1e-3."""
    return 1e-3 / phase_rate(params, obs)


def _richardson(f, h, levels=1):
    """
    Richardson-extrapolated first/second derivatives of `f` at 0.

    Central differences at +-h, +-2h (and +-4h for ``levels=2``) are combined
    into fourth- (sixth-) order estimates.  The same combination on a
    disjoint stencil of larger steps (4h, 8h for one level) is returned as
    well; its rounding error is far smaller, so the gap between the two
    measures the error of the narrow estimate.
    """
    n = levels + 1
    scales = [2 ** k for k in range(2 * n)]
    fs = {0: f(0.0)}
    for m in scales:
        fs[m] = f(m * h)
        fs[-m] = f(-m * h)

    def d1(m):
        return (fs[m] - fs[-m]) / (2 * m * h)

    def d2(m):
        return (fs[m] - 2 * fs[0] + fs[-m]) / (m * h) ** 2

    def extrapolate(d, ms):
        est = [d(m) for m in ms]
        for k in range(1, levels + 1):
            w = 4.0 ** k
            est = [(w * a - b) / (w - 1) for a, b in zip(est, est[1:])]
        return est[0]

    narrow = (extrapolate(d1, scales[:n]), extrapolate(d2, scales[:n]))
    wide = (extrapolate(d1, scales[n:]), extrapolate(d2, scales[n:]))
    return fs[0], narrow, wide


def _derivs(c0, r1, r2, h):
    # d/d(i chi) = -i d/dchi
    return CoeffDerivs(a1=c0[1], a2=c0[2], a0p=-1j * r1[0], a0pp=-r2[0], a1p=-1j * r1[1],
                       step=h)


def _moments(cd):
    mean = -cd.a0p / cd.a1
    var = (cd.a0pp / cd.a0p - 2 * cd.a1p / cd.a1) * mean - 2 * (cd.a2 / cd.a1) * mean ** 2
    return mean, var


def coeff_derivs(params, obs, method="jet", h=None, levels=1):
    """
    Characteristic-polynomial coefficients and their counting-field derivatives.

    Parameters
    ----------
    method : {"jet", "fd"}
        ``"jet"`` differentiates the Faddeev-LeVerrier recursion exactly.
        ``"fd"`` uses central differences at +-h, +-2h with one Richardson
        level.  The default h makes the largest jump phase move by 1e-3
        (``1e-3 / omega_h`` for the hot current).  The differenced
        coefficients ``a0(chi)``, ``a1(chi)`` come from pivoted
        determinants in extended precision (see `char_poly_low`).  The mean
        and variance implied by the extrapolation are compared with the ones
        from the same extrapolation at +-4h, +-8h, and the latter are
        returned.
    h : float, optional
        Finite-difference step (``"fd"`` only).
    levels : {1, 2}
        Richardson levels (``"fd"`` only).

    Raises
    ------
    NumericalInstability
        ``"fd"`` only: the two extrapolations give cumulants that differ by
        more than 1e-7 (relative).
    """
    if method == "jet":
        direction = counting_field(params, obs, 1.0)
        m1, m2 = liouvillian_derivatives(params, direction, extended=True)
        l0 = liouvillian(params).astype(np.clongdouble)
        c0, c1, c2 = char_poly_jet(l0, m1, m2, extended=True)
        return _derivs(c0, c1, c2, 0.0)
    if method != "fd":
        raise ValueError("unknown method %r" % (method,))
    if h is None:
        h = default_step(params, obs)

    def coeffs(chi):
        field = counting_field(params, obs, chi)
        return char_poly_low(liouvillian(params, field, extended=True), extended=True)

    _, narrow, wide = _richardson(coeffs, h, levels)
    narrow = tuple(np.asarray(r, dtype=complex) for r in narrow)
    wide = tuple(np.asarray(r, dtype=complex) for r in wide)
    c0 = char_poly(liouvillian(params))
    m_n, v_n = _moments(_derivs(c0, *narrow, h))
    cd = _derivs(c0, *wide, 2 ** (levels + 1) * h)
    m_w, v_w = _moments(cd)
    gap = max(abs(m_n - m_w) / abs(m_n), abs(v_n - v_w) / abs(v_n))
    if not gap <= RICHARDSON_RTOL:
        raise NumericalInstability("Richardson disagreement %.3g at h=%g" % (gap, h))
    return cd


def _report(mean, var):
    mean = float(np.real(mean))
    var = abs(float(np.real(var)))
    return CumulantReport(mean=mean, variance=var, nsr=var / mean ** 2)


def cumulants(params, obs, method="jet"):
    """
    Mean, variance and noise-to-signal ratio from the polynomial route.

    With ``method="fd"`` an unstable step is retried on a ladder of larger
    steps (4h, 16h, then two Richardson levels at 16h).  Rounding, which
    grows like 1/h**2, is what trips the check in practice, so smaller
    steps never help.
    """
    params.require_engine()
    if params.alpha == 0:
        raise ZeroMean("alpha = 0: no current, NSR undefined")
    if method == "jet":
        cd = coeff_derivs(params, obs, "jet")
    else:
        h = default_step(params, obs)
        err = None
        for step, levels in FD_LADDER:
            try:
                cd = coeff_derivs(params, obs, method, step * h, levels)
                break
            except NumericalInstability as e:
                err = e
        else:
            raise err
    return _report(*_moments(cd))


def lambda_branch(params, obs, chi, start=(0.0, 0.0j)):
    """
    Eigenvalue of L(chi) on the branch through lambda(0) = 0.

    The branch is followed from `start` = (chi0, lambda(chi0)) with Newton
    steps on the characteristic polynomial, halving the chi increment when
    refinement fails.
    """
    chi0, lam = start
    if chi == chi0:
        return complex(lam)
    w = phase_rate(params, obs)
    n = max(1, int(np.ceil(abs(chi - chi0) * w / 0.05)))
    step = (chi - chi0) / n
    x = chi0
    while x != chi:
        target = chi if abs(chi - x) <= abs(step) * (1 + 1e-12) else x + step
        field = counting_field(params, obs, target)
        c = char_poly(liouvillian(params, field, extended=True), extended=True)
        try:
            lam = root_near(c, lam)
        except NoConvergence:
            step /= 2
            if abs(step) * w < 1e-12:
                raise
            continue
        x = target
    return complex(lam)


def lambda_cumulants(params, obs, h=None):
    """Cumulants from Richardson differences of the eigenvalue branch."""
    params.require_engine()
    if params.alpha == 0:
        raise ZeroMean("alpha = 0: no current, NSR undefined")
    if h is None:
        h = 1e-2 / phase_rate(params, obs)
    known = {0.0: 0j}

    def branch(chi):
        # continue from the nearest point already on the branch
        if chi not in known:
            start = min(known, key=lambda x: abs(x - chi))
            known[chi] = lambda_branch(params, obs, chi, start=(start, known[start]))
        return np.array([known[chi]])

    _, (r1, r2), _ = _richardson(branch, h)
    return _report(-1j * r1[0], -r2[0])


def population_fano(n_h, n_c):
    """Population part of the Fano factor, ``(2 n_h n_c + n_h + n_c)/(n_h - n_c)``."""
    return (2 * n_h * n_c + n_h + n_c) / (n_h - n_c)


def k_factor(g0, n_h, n_c, a):
    """Coefficient of the coherence-squared correction for the incoherent engine."""
    s = n_h + n_c
    return (4 * a * a + g0 ** 2 * (s * s + 2 * s + 3 * n_h * n_c)) / (g0 ** 2 * (n_h - n_c))


def fano_formula(kind, g0, n_h, n_c, a):
    """Photon-flux Fano factor of either engine; broadcasts over arrays."""
    fp = population_fano(n_h, n_c)
    coh = coherence_formula(kind, g0, n_h, n_c, a)
    if EngineKind(kind) is EngineKind.COHERENT:
        return fp * (1 - 1.5 * coh ** 2)
    return fp - k_factor(g0, n_h, n_c, a) * coh ** 2


def nsr_formula(kind, g0, n_h, n_c, a):
    """Noise-to-signal ratio of power, ``F / (alpha C)``; broadcasts over arrays."""
    return fano_formula(kind, g0, n_h, n_c, a) / (a * coherence_formula(kind, g0, n_h, n_c, a))


def cumulants_closed(params, obs):
    """Closed-form cumulants; oracle for `cumulants`."""
    params.require_engine()
    obs = CountedObservable(obs)
    a = params.alpha
    if a == 0:
        raise ZeroMean("alpha = 0: no current, NSR undefined")
    w_h, w_c = params.omega_h, params.omega_c
    dw = w_h - w_c
    n_h, n_c = occupations(params)
    fp = population_fano(n_h, n_c)
    if params.kind is EngineKind.COHERENT:
        r = rates(params)
        g1, g2 = r.gamma1, r.gamma2
        s = g1 + g2
        den = 8 * a * a + s * s
        p = 4 * a * a * (g1 - g2) / den * dw
        var_p = fp * (abs(p) - 1.5 / (a * dw) ** 2 * abs(p) ** 3) * dw
        heat_var = (4 * a * a * s * (64 * a ** 4 - 8 * a * a * (g1 * g1 - 10 * g1 * g2 + g2 * g2)
                                     + s ** 4) / den ** 3)
        if obs is CountedObservable.HOT_CURRENT:
            return _report(4 * a * a * (g2 - g1) / den * w_h, heat_var * w_h ** 2)
        if obs is CountedObservable.COLD_CURRENT:
            return _report(4 * a * a * (g1 - g2) / den * w_c, heat_var * w_c ** 2)
    else:
        g0 = params.gamma0
        den = (4 * a * a * (g0 * (3 * n_c + 2) + g0 * (3 * n_h + 2))
               + g0 * g0 * (3 * n_c * n_h + n_c + n_h) * (g0 * n_c + g0 * n_h))
        p = -4 * a * a * g0 * g0 * (n_h - n_c) / den * dw
        k = k_factor(g0, n_h, n_c, a)
        var_p = (fp * abs(p) - k / (a * dw) ** 2 * abs(p) ** 3) * dw
        nsr = var_p / p ** 2
        if obs is CountedObservable.HOT_CURRENT:
            j = -p * w_h / dw
            return _report(j, nsr * j * j)
        if obs is CountedObservable.COLD_CURRENT:
            j = p * w_c / dw
            return _report(j, nsr * j * j)
    if obs is CountedObservable.POWER:
        return _report(p, var_p)
    return _report(abs(p) / dw, var_p / dw ** 2)
