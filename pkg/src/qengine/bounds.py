"""
Uncertainty-relation diagnostics: Fano factors, the classical TUR value and
the quantum TUR bound built from the dynamical activity and the Drazin
inverse of the generator.

Numerical routes take an `EngineParams`; the ``*_formula`` helpers are the
closed forms and broadcast over arrays of (gamma0, n_h, n_c, alpha).
"""

from dataclasses import dataclass

import numpy as np

from .engine import EngineKind, dimension, jump_operators, liouvillian, lr_ll_split, occupations, rates, vec
from .fcs import CountedObservable, NumericalInstability, cumulants, k_factor, population_fano
from .linalg import SingularMatrix, lu_factor, lu_solve
from .steady import (DegenerateSteadyState, _sigma_c, _sigma_i, coherence_formula, log_bias, observables,
                     steady_numeric)

__all__ = [
    "FanoReport",
    "TURReport",
    "fano",
    "ctur",
    "drazin",
    "drazin_closed",
    "level_reversal",
    "qtur_bound",
    "qtur_bound_closed",
    "inv_f_formula",
    "upsilon_formula",
    "tur_report",
]


@dataclass(frozen=True)
class FanoReport:
    f_total: float
    f_pop: float
    coherent_correction: float


@dataclass(frozen=True)
class TURReport:
    """
    ``q_value = entropy_rate * nsr``; the classical bound asks for q >= 2.
    ``f_bound = 1/(upsilon + psi)`` is the quantum lower bound on nsr.
    With a zero-temperature cold bath the entropy rate is infinite and
    ``infinite_entropy`` is set; the quantum fields stay meaningful.
    """

    q_value: float
    nsr: float
    entropy_rate: float
    upsilon: float
    psi: float
    f_bound: float
    slack: float
    ctur_violated: bool
    qtur_ok: bool
    infinite_entropy: bool = False


def fano(params):
    """Photon-flux Fano factor split into its population part and the coherence correction."""
    params.require_engine()
    n_h, n_c = occupations(params)
    g0, a = params.gamma0, params.alpha
    fp = float(population_fano(n_h, n_c))
    coh = float(coherence_formula(params.kind, g0, n_h, n_c, a))
    if params.kind is EngineKind.COHERENT:
        corr = 1.5 * fp * coh ** 2
    else:
        corr = float(k_factor(g0, n_h, n_c, a)) * coh ** 2
    return FanoReport(f_total=fp - corr, f_pop=fp, coherent_correction=corr)


def ctur(params):
    """
    Classical TUR value q and the power-efficiency-constancy value d.

    ``q = ln[n_h (n_c+1) / (n_c (n_h+1))] F`` and
    ``d = (eta_Carnot - eta) (Var P / |P|) beta_c omega_h / (omega_h - omega_c)``
    are the same number.  q uses the closed-form Fano factor, d the
    counting-statistics cumulants of power; they are checked against each
    other.  Both are ``inf`` for a zero-temperature cold bath.

    Raises
    ------
    NumericalInstability
        If q and d differ by more than 1e-6 (relative).  The mean power is
        O(alpha**2) while the individual jump fluxes are O(1), so the numeric
        cumulants lose about two digits per decade of alpha below ~1e-4 gamma0.
    """
    params.require_engine()
    n_h, n_c = occupations(params)
    if n_c == 0:
        return np.inf, np.inf
    q = float(log_bias(n_h, n_c)) * fano(params).f_total
    w_h, w_c = params.omega_h, params.omega_c
    power = cumulants(params, CountedObservable.POWER)
    eta_car = 1.0 - params.beta_h / params.beta_c
    eta = 1.0 - w_c / w_h
    d = (eta_car - eta) * power.variance / abs(power.mean) * params.beta_c * w_h / (w_h - w_c)
    if not abs(q - d) <= 1e-6 * abs(q):
        raise NumericalInstability("q = %r and d = %r disagree" % (q, d))
    return q, d


def drazin(L, rho):
    """
    Drazin inverse ``(I - P)(L + P)^-1 (I - P)`` with ``P = vec(rho) vec(I)^T``.

    Parameters
    ----------
    L : (d*d, d*d) array_like
        Generator with a single zero mode.
    rho : (d, d) array_like
        Its steady state.
    """
    L = np.asarray(L, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    n = L.shape[0]
    proj = np.outer(vec(rho), vec(np.eye(rho.shape[0])))
    q = np.eye(n) - proj
    try:
        x = lu_solve(lu_factor(L + proj), q)
    except SingularMatrix as e:
        raise DegenerateSteadyState("L + P is singular: %s" % e) from None
    return q @ x


def level_reversal(d):
    """
    Index map between our column-stacked basis and the reversed-level basis.

    The printed closed forms label levels in the opposite order (|d-1> first).
    ``L_ours[np.ix_(p, p)]`` is the matrix in that basis.
    """
    p = np.zeros(d * d, dtype=int)
    for i in range(d):
        for j in range(d):
            p[(d - 1 - i) + d * (d - 1 - j)] = i + d * j
    return p


def _drazin_c_printed(g1, g2, a):
    g = g1 + g2
    den = 8 * a * a + g * g
    d2 = den * den
    a2 = a * a
    u = 4j * a * (4 * a2 + (2 * g1 - g2) * g) / d2
    v = 4j * a * (4 * a2 - (g1 - 2 * g2) * g) / d2
    w = 2j * a / den
    diag = -2 * (4 * a2 + g * g) / (g * den)
    off = -8 * a2 / (g * den)
    return np.array([
        [(4 * a2 * (g1 - 3 * g2) - g1 * g * g) / d2, w, -w, (4 * a2 * (3 * g1 - g2) + g2 * g * g) / d2],
        [u, diag, off, -v],
        [-u, off, diag, v],
        [(g1 * g * g - 4 * a2 * (g1 - 3 * g2)) / d2, -w, w, (4 * a2 * (g2 - 3 * g1) - g2 * g * g) / d2],
    ])


def _drazin_i_printed(g0, nh, nc, a):
    a2 = a * a
    a4 = a2 * a2
    q2 = g0 * g0
    q4 = q2 * q2
    s = nh + nc
    big_q = 3 * nc * nh + nc + nh
    den = 4 * a2 * (3 * nc + 3 * nh + 4) + q2 * s * big_q
    e = 4 * a2 + q2 * (2 * nc + nh + 2) * (nc + 2 * nh + 2)
    dd = g0 * den * den
    # 1-based entries a_ij
    m = np.zeros((10, 10), dtype=complex)
    m[1, 1] = -(4 * a2 * q2 * (nc + nh + 2) * (nc ** 2 + 6 * nc * nh + nh ** 2)
                + q4 * s ** 2 * (nc ** 2 * (nh + 1) + nc * nh ** 2 + nh ** 2)
                + 64 * a4 * (nc + nh + 2)) / dd
    m[6, 1] = (2j * a * (nc - nh) * (q2 * (3 * nc ** 2 * (nh + 1) + nc * (3 * nh * (nh + 4) + 4)
                                          + nh * (3 * nh + 4)) + 12 * a2 * (nc + nh + 2)) / den ** 2)
    m[8, 1] = -m[6, 1]
    x = 4j * a / e
    m[2, 3] = m[3, 2] = x
    m[7, 4] = m[4, 7] = -x
    m[2, 2] = m[4, 4] = -2 * g0 * (nc + 2 * nh + 2) / e
    m[3, 3] = m[7, 7] = -2 * g0 * (2 * nc + nh + 2) / e
    m[1, 6] = 2j * a * (nc - nh) / den
    m[1, 8] = -m[1, 6]
    m[5, 6] = 2j * a * (nc + 2 * nh + 2) / den
    m[5, 8] = -m[5, 6]
    m[9, 6] = -2j * a * (2 * nc + nh + 2) / den
    m[9, 8] = -m[9, 6]
    m[8, 6] = m[6, 8] = -4 * a2 * (3 * nc + 3 * nh + 4) / (g0 * s * den)
    m[6, 6] = m[8, 8] = (-4 * a2 * (3 * nc + 3 * nh + 4) - 2 * q2 * s * big_q) / (g0 * s * den)
    m[1, 5] = (4 * a2 * q2 * (-nc ** 3 + (5 * nc + 4) * nh ** 2 + 2 * (nc - 2) * nc * nh + 2 * nh ** 3)
               - q4 * nc * s ** 2 * ((nc - 1) * nh + nc - 2 * nh ** 2) + 32 * a4 * s) / dd
    m[1, 9] = (4 * a2 * q2 * (2 * nc ** 3 + nc ** 2 * (5 * nh + 4) + 2 * nc * (nh - 2) * nh - nh ** 3)
               + 32 * a4 * s + q4 * nh * s ** 2 * (nc * (2 * nc + 1) - (nc + 1) * nh)) / dd
    m[6, 5] = 2j * a * (4 * a2 * (3 * nc ** 2 + 3 * nc * (3 * nh + 4) + 6 * nh * (nh + 2) + 8)
                        + q2 * (3 * nc ** 3 * (nh + 1) + 3 * nc ** 2 * (3 * nh * (nh + 2) + 2)
                                + nc * nh * (6 * nh ** 2 + 3 * nh + 4) - 2 * nh ** 2)) / den ** 2
    m[8, 5] = -m[6, 5]
    m[9, 5] = (4 * a2 * q2 * (nc ** 2 * (2 * nc + 3) + (5 * nc + 7) * nh ** 2 + (nc + 2) * (5 * nc + 4) * nh
                              + 2 * nh ** 3)
               - 16 * a4 * s + 2 * q4 * nc * (nh + 1) * s ** 2 * (s + 1)) / dd
    m[5, 9] = (4 * a2 * q2 * (2 * nc ** 3 + nc ** 2 * (5 * nh + 7) + nc * (nh + 2) * (5 * nh + 4)
                              + nh ** 2 * (2 * nh + 3))
               - 16 * a4 * s + 2 * q4 * (nc + 1) * nh * s ** 2 * (s + 1)) / dd
    m[8, 9] = 2j * a * (4 * a2 * (6 * nc ** 2 + 3 * nc * (3 * nh + 4) + 3 * nh * (nh + 4) + 8)
                        + q2 * (6 * nc ** 3 * nh + nc ** 2 * (9 * nh ** 2 + 3 * nh - 2)
                                + nc * nh * (3 * nh * (nh + 6) + 4) + 3 * nh ** 2 * (nh + 2))) / den ** 2
    m[6, 9] = -m[8, 9]
    m[9, 9] = -(4 * a2 * q2 * ((7 * nc + 3) * nh ** 2 + 10 * nc * (nc + 1) * nh + nc * (nc * (4 * nc + 11) + 8)
                               + nh ** 3)
                + 16 * a4 * s + q4 * nh * s ** 2 * (nc * (4 * nc + nh + 5) + nh + 2)) / dd
    m[5, 5] = -(4 * a2 * q2 * (nc ** 3 + nc ** 2 * (7 * nh + 3) + 10 * nc * nh * (nh + 1)
                               + nh * (nh * (4 * nh + 11) + 8))
                + q4 * nc * s ** 2 * ((nc + 5) * nh + nc + 4 * nh ** 2 + 2) + 16 * a4 * s) / dd
    m[5, 1] = (4 * a2 * q2 * (nc * (nc - nc ** 2 + 4) + (5 * nc + 1) * nh ** 2 + 2 * nc * (nc + 3) * nh
                              + 2 * nh ** 3 - 4 * nh)
               - q4 * (nc + 1) * s ** 2 * ((nc - 1) * nh + nc - 2 * nh ** 2) + 32 * a4 * (s + 2)) / dd
    m[9, 1] = (4 * a2 * q2 * (2 * nc ** 3 + nc ** 2 * (5 * nh + 1) + 2 * nc * (nh * (nh + 3) - 2)
                              + nh * (nh - nh ** 2 + 4))
               + 32 * a4 * (s + 2) + q4 * (nh + 1) * s ** 2 * (nc * (2 * nc + 1) - (nc + 1) * nh)) / dd
    return m[1:, 1:]


def drazin_closed(params):
    """
    Closed-form Drazin inverse of the undressed generator, in our basis.

    Transcribed in the reversed-level basis and mapped back with
    `level_reversal`.  The incoherent ``a_98`` entry is ``-a_96``.
    """
    r = rates(params)
    if params.kind is EngineKind.COHERENT:
        m = _drazin_c_printed(r.gamma1, r.gamma2, params.alpha)
    else:
        m = _drazin_i_printed(params.gamma0, r.n_h, r.n_c, params.alpha)
    p = level_reversal(dimension(params.kind))
    out = np.empty_like(m)
    out[np.ix_(p, p)] = m
    return out


def qtur_bound(params):
    """
    Dynamical activity, coherent contribution and the bound ``f = 1/(upsilon + psi)``.

    ``upsilon = sum_k Tr(L_k^dag L_k rho)`` and
    ``psi = -4 (<<I| L_L L+ L_R |rho>> + <<I| L_R L+ L_L |rho>>)``.
    """
    params.require_engine()
    L = liouvillian(params)
    rho = steady_numeric(L)
    ups = sum(float(np.trace(j.matrix.conj().T @ j.matrix @ rho).real) for j in jump_operators(params))
    lp = drazin(L, rho)
    l_r, l_l = lr_ll_split(params)
    v_i = vec(np.eye(rho.shape[0]))
    v_rho = vec(rho)
    psi = -4 * (v_i @ l_l @ lp @ l_r @ v_rho + v_i @ l_r @ lp @ l_l @ v_rho)
    if abs(psi.imag) > 1e-10 * max(1.0, abs(psi.real)):
        raise ArithmeticError("psi has imaginary part %.3g" % psi.imag)
    psi = float(psi.real)
    return ups, psi, 1.0 / (ups + psi)


def inv_f_formula(kind, g0, n_h, n_c, a):
    """Closed form of ``upsilon + psi``; broadcasts over arrays."""
    if EngineKind(kind) is EngineKind.COHERENT:
        big_a = n_h + n_c + 2 * n_h * n_c
        return (2 * (2 * a * a + g0 ** 2 * n_h * n_c * (n_c + 1) * (n_h + 1)) * (32 * a * a + g0 ** 2 * big_a ** 2)
                / (g0 * big_a * (8 * a * a + g0 ** 2 * big_a ** 2)))
    s = n_h + n_c
    return (2 * (s + 2) * (4 * a * a + g0 ** 2 * n_h * n_c) * (16 * a * a + g0 ** 2 * s * s)
            / (g0 * s * (4 * a * a * (4 + 3 * s) + g0 ** 2 * s * (s + 3 * n_h * n_c))))


def upsilon_formula(kind, g0, n_h, n_c, a):
    """Closed-form dynamical activity; broadcasts over arrays."""
    if EngineKind(kind) is EngineKind.COHERENT:
        g1 = g0 * n_c * (n_h + 1)
        g2 = g0 * n_h * (n_c + 1)
        rho = _sigma_c(g1, g2, a).real
        return g1 * rho[..., 1, 1] + g2 * rho[..., 0, 0]
    rho = _sigma_i(g0, n_h, n_c, a).real
    return (g0 * (n_h + 1) + g0 * (n_c + 1)) * rho[..., 2, 2] + g0 * n_h * rho[..., 0, 0] + g0 * n_c * rho[..., 1, 1]


def qtur_bound_closed(params):
    """Closed-form ``f``; oracle for `qtur_bound`."""
    params.require_engine()
    n_h, n_c = occupations(params)
    return float(1.0 / inv_f_formula(params.kind, params.gamma0, n_h, n_c, params.alpha))


def tur_report(params):
    """Classical and quantum TUR diagnostics for power at one operating point."""
    obs = observables(params)
    nsr = cumulants(params, CountedObservable.POWER).nsr
    ups, psi, f = qtur_bound(params)
    n_c = occupations(params).n_c
    if n_c == 0:
        q, entropy = np.inf, np.inf
    else:
        entropy = obs.entropy_rate
        q = entropy * nsr
    slack = nsr - f
    return TURReport(q_value=q, nsr=nsr, entropy_rate=entropy, upsilon=ups, psi=psi, f_bound=f,
                     slack=slack, ctur_violated=bool(q < 2), qtur_ok=bool(slack >= -1e-9),
                     infinite_entropy=bool(n_c == 0))
