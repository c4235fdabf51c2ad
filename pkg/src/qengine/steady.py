"""
Steady states, energetic coherence and first-order observables.

The closed forms assume equal hot and cold decay constants (gamma0).  The
``*_formula`` helpers broadcast over numpy arrays so that whole parameter
grids can be evaluated at once; the remaining functions take an
`EngineParams`.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .engine import EngineKind, NotAnEngine, dimension, hamiltonians, liouvillian, occupations, rates, unvec, vec
from .linalg import SingularMatrix, char_poly, solve

__all__ = [
    "DegenerateSteadyState",
    "ZeroDenominator",
    "Observables",
    "steady_numeric",
    "steady_closed",
    "state_violations",
    "coherence_l1",
    "coherence_formula",
    "coherence_closed",
    "observables",
    "log_bias",
    "critical_alpha",
    "critical_alpha_formula",
    "critical_alpha_numeric",
]


class DegenerateSteadyState(ArithmeticError):
    """The generator's kernel is not one-dimensional (or the solve failed)."""


class ZeroDenominator(ZeroDivisionError):
    pass


def steady_numeric(L):
    """
    Unit-trace kernel vector of a trace-preserving generator.

    One equation of ``L vec(rho) = 0`` is redundant.  Because ``vec(I)^T L = 0``
    the redundancy lives in the population rows, so each of those is tried in
    turn as the slot for the trace condition and the candidate with the
    smallest residual is kept.  The solve runs in extended precision: the
    coherences are tiny next to the populations when the drive is weak, and
    they carry the power.

    Parameters
    ----------
    L : (d*d, d*d) array_like
        Undressed generator.

    Returns
    -------
    rho : (d, d) complex ndarray
    """
    L = np.asarray(L, dtype=complex)
    n = L.shape[0]
    d = int(round(np.sqrt(n)))
    trace_row = vec(np.eye(d))
    norm = np.abs(L).sum(axis=1).max()
    best, best_res = None, np.inf
    for i in range(d):
        k = i + d * i
        a = L.copy()
        a[k] = trace_row
        b = np.zeros(n, dtype=complex)
        b[k] = 1.0
        try:
            x = solve(a, b, extended=True).astype(complex)
        except SingularMatrix:
            continue
        res = np.abs(L @ x).max()
        if res < best_res:
            best, best_res = x, res
    if best is None or not best_res <= 1e-11 * norm:
        raise DegenerateSteadyState("no unique steady state (residual %.3g)" % best_res)
    rho = unvec(best, d)
    return 0.5 * (rho + rho.conj().T)


def _sigma_c(gamma1, gamma2, a):
    s = gamma1 + gamma2
    den = 8 * a * a + s * s
    rho = np.empty(np.broadcast(gamma1, gamma2, a).shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = (4 * a * a + gamma1 * s) / den
    rho[..., 1, 1] = (4 * a * a + gamma2 * s) / den
    rho[..., 0, 1] = 2j * a * (gamma1 - gamma2) / den
    rho[..., 1, 0] = -2j * a * (gamma1 - gamma2) / den
    return rho


def _sigma_i(g0, n_h, n_c, a):
    g_h = g_c = g0
    a2 = a * a
    den = (4 * a2 * (g_c * (3 * n_c + 2) + g_h * (3 * n_h + 2))
           + g_c * g_h * (3 * n_c * n_h + n_c + n_h) * (g_c * n_c + g_h * n_h))
    rho = np.zeros(np.broadcast(g0, n_h, n_c, a).shape + (3, 3), dtype=complex)
    common = 4 * a2 * (g_c + g_h + g_c * n_c + g_h * n_h)
    flow = g_c * n_c + g_h * n_h
    rho[..., 0, 0] = (common + g_c * g_h * n_c * (n_h + 1) * flow) / den
    rho[..., 1, 1] = (common + g_c * g_h * n_h * (n_c + 1) * flow) / den
    rho[..., 2, 2] = (4 * a2 + g_c * g_h * n_c * n_h) * flow / den
    rho[..., 0, 1] = -2j * a * g_c * g_h * (n_h - n_c) / den
    rho[..., 1, 0] = 2j * a * g_c * g_h * (n_h - n_c) / den
    return rho


def steady_closed(params):
    """Closed-form steady state at working dimension."""
    r = rates(params)
    if params.alpha == 0 and r.n_h == 0 and r.n_c == 0:
        raise ZeroDenominator("alpha, n_h and n_c all vanish")
    if params.kind is EngineKind.COHERENT:
        return _sigma_c(r.gamma1, r.gamma2, params.alpha)
    return _sigma_i(params.gamma0, r.n_h, r.n_c, params.alpha)


def _psd_with_margin(rho, margin):
    # A hermitian matrix is PSD iff its characteristic polynomial
    # det(x I - M) has alternating-sign coefficients.
    d = rho.shape[0]
    c = char_poly(rho + margin * np.eye(d)).real
    signs = (-1.0) ** (d - np.arange(d + 1))
    return bool(np.all(signs * c >= 0))


def state_violations(rho, tol=1e-12, eig_tol=1e-10):
    """List the density-matrix invariants that `rho` breaks (empty if valid)."""
    rho = np.asarray(rho, dtype=complex)
    out = []
    herm = np.abs(rho - rho.conj().T).max()
    if herm > tol:
        out.append("not hermitian (%.3g)" % herm)
    tr = abs(np.trace(rho) - 1)
    if tr > tol:
        out.append("trace off by %.3g" % tr)
    if not _psd_with_margin(0.5 * (rho + rho.conj().T), eig_tol):
        out.append("eigenvalue below -%g" % eig_tol)
    return out


def coherence_l1(rho):
    """l1 norm of coherence: sum of off-diagonal magnitudes."""
    rho = np.asarray(rho)
    off = ~np.eye(rho.shape[0], dtype=bool)
    return float(np.abs(rho[off]).sum())


def coherence_formula(kind, g0, n_h, n_c, a):
    """Steady-state coherence of either engine; broadcasts over arrays."""
    if EngineKind(kind) is EngineKind.COHERENT:
        A = n_h + n_c + 2 * n_h * n_c
        return 4 * a * g0 * (n_h - n_c) / (8 * a * a + g0 ** 2 * A * A)
    s = n_h + n_c
    return 4 * a * g0 * (n_h - n_c) / (4 * a * a * (3 * s + 4) + g0 ** 2 * s * (s + 3 * n_h * n_c))


def coherence_closed(params):
    n_h, n_c = occupations(params)
    return float(coherence_formula(params.kind, params.gamma0, n_h, n_c, params.alpha))


def log_bias(n_h, n_c):
    """``ln[n_h (n_c + 1) / (n_c (n_h + 1))]``, +inf for a zero-temperature cold bath."""
    n_h = np.asarray(n_h, dtype=float)
    n_c = np.asarray(n_c, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log1p(1.0 / n_c) - np.log1p(1.0 / n_h)


@dataclass(frozen=True)
class Observables:
    """
    Mean currents at steady state.  ``power <= 0`` means work is extracted.
    """

    power: float
    j_hot: float
    j_cold: float
    efficiency: float
    photon_flux: float
    entropy_rate: float
    coherence: float
    degenerate_bath: bool = False


def observables(params, rho=None):
    """
    Power, heat currents, efficiency, photon flux and entropy production.

    `rho` defaults to the numerically computed steady state.  Power is
    obtained both from the coherence and from ``-i Tr([H_S, H_dR] rho)``;
    the two must agree.
    """
    params.require_engine()
    if rho is None:
        rho = steady_numeric(liouvillian(params))
    coh = coherence_l1(rho)
    a, w_h, w_c = params.alpha, params.omega_h, params.omega_c
    power = -a * (w_h - w_c) * coh
    h_s, h_dr = hamiltonians(params)
    d = dimension(params.kind)
    h_s = h_s[:d, :d]
    power_tr = float((-1j * np.trace((h_s @ h_dr - h_dr @ h_s) @ rho)).real)
    if abs(power_tr - power) > 1e-11 * max(abs(power), 1e-300):
        raise ArithmeticError("power paths disagree: %r vs %r" % (power, power_tr))
    n_h, n_c = occupations(params)
    flux = abs(power) / (w_h - w_c)
    with np.errstate(invalid="ignore"):
        entropy = float(log_bias(n_h, n_c) * flux) if flux else 0.0
    return Observables(power=power, j_hot=a * w_h * coh, j_cold=-a * w_c * coh,
                       efficiency=1.0 - w_c / w_h, photon_flux=flux,
                       entropy_rate=entropy, coherence=coh,
                       degenerate_bath=bool(n_c == 0 or n_h == 0))


def critical_alpha_formula(g0, n_h, n_c):
    """Drive strength at which both engines hold the same coherence."""
    return g0 * np.sqrt((n_h * n_c * (n_h + n_c) + 4 * n_h ** 2 * n_c ** 2)
                        / (8 + 12 * (n_h + n_c)))


def critical_alpha(params):
    params.require_engine()
    n_h, n_c = occupations(params)
    return float(critical_alpha_formula(params.gamma0, n_h, n_c))


def critical_alpha_numeric(params):
    """Root of ``C_C(alpha)/C_I(alpha) - 1`` by bisection (oracle for `critical_alpha`)."""
    params.require_engine()
    n_h, n_c = occupations(params)
    g0 = params.gamma0
    if n_c == 0:
        return 0.0

    def gap(a):
        return (coherence_formula(EngineKind.COHERENT, g0, n_h, n_c, a)
                / coherence_formula(EngineKind.INCOHERENT, g0, n_h, n_c, a) - 1.0)

    lo, hi = g0 * 1e-6, g0
    while gap(lo) > 0:
        lo *= 1e-3
    while gap(hi) < 0:
        hi *= 4.0
    return float(optimize.bisect(gap, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                 maxiter=2000))
