import mpmath
import numpy as np
import pytest

from qengine.bounds import (ctur, drazin, drazin_closed, fano, inv_f_formula, qtur_bound, qtur_bound_closed,
                            tur_report, upsilon_formula)
from qengine.engine import EngineKind, EngineParams, NotAnEngine, liouvillian, occupations, vec
from qengine.fcs import fano_formula, nsr_formula, population_fano
from qengine.steady import DegenerateSteadyState, log_bias, steady_numeric

from conftest import rel, seeded_points, worked_point

FIG = dict(gamma0=0.01, omega_h=10.0, omega_c=5.0)
ALPHA = np.geomspace(1e-3, 1, 400)


def closed_q(kind, beta_h, beta_c, alpha=ALPHA):
    n_h = 1 / np.expm1(beta_h * FIG["omega_h"])
    n_c = 1 / np.expm1(beta_c * FIG["omega_c"])
    return log_bias(n_h, n_c) * fano_formula(kind, FIG["gamma0"], n_h, n_c, alpha)


# -- Fano factors ----------------------------------------------------------

def test_worked_fano():
    fr = fano(worked_point())
    assert fr.f_pop == pytest.approx(1.0, rel=1e-15)
    assert fr.f_total == pytest.approx(1 / 3, rel=1e-14)
    assert fr.coherent_correction == pytest.approx(1.5 * (2 / 3) ** 2, rel=1e-14)


def test_fano_zero_drive():
    for kind in EngineKind:
        fr = fano(EngineParams(0.1, 10, 5, 0.01, 0.8, 0.0, kind))
        assert fr.coherent_correction == 0 and fr.f_total == fr.f_pop


def test_population_fano_hand_value():
    assert population_fano(2.0, 1.0) == 7.0
    assert fano(EngineParams.from_occupations(0.1, 2.0, 1.0, 0.1)).f_pop == pytest.approx(7.0, rel=1e-13)


def test_fano_positive_and_decomposed():
    for p in seeded_points(50, 100):
        fr = fano(p)
        assert fr.f_total > 0
        assert fr.f_total == pytest.approx(fr.f_pop - fr.coherent_correction, rel=1e-14)


def test_fano_requires_engine():
    with pytest.raises(NotAnEngine):
        fano(EngineParams(0.01, 10, 5, 0.5, 0.8, 0.8))


# -- classical TUR ---------------------------------------------------------

def test_ctur_classical_limit():
    p = EngineParams.from_occupations(0.1, 2.0, 1.0, 1e-3)
    q, d = ctur(p)
    assert q == pytest.approx(float(7 * mpmath.log(mpmath.mpf(4) / 3)), rel=1e-4)
    assert q > 2
    assert q == pytest.approx(d, rel=1e-6)


def test_ctur_equals_constancy_value():
    for p in seeded_points(51, 50):
        q, d = ctur(p)
        assert q == pytest.approx(d, rel=1e-6)


def test_ctur_zero_temperature_cold_bath():
    assert ctur(worked_point()) == (np.inf, np.inf)


def test_ctur_fig4b_coherent_minimum():
    q = closed_q(EngineKind.COHERENT, 0.003, 0.7)
    assert q.min() == pytest.approx(1.24, abs=0.02)
    j = int(q.argmin())
    p = EngineParams(beta_h=0.003, beta_c=0.7, alpha=ALPHA[j], **FIG)
    assert ctur(p)[0] == pytest.approx(q[j], rel=1e-10)


def test_ctur_fig4a_windows():
    q_c = closed_q(EngineKind.COHERENT, 0.01, 0.1)
    q_i = closed_q(EngineKind.INCOHERENT, 0.01, 0.1)
    win_c = ALPHA[q_c < 2]
    win_i = ALPHA[q_i < 2]
    assert win_c.size and win_i.size
    assert win_i.max() - win_i.min() < win_c.max() - win_c.min()
    assert np.log(win_i.max() / win_i.min()) < np.log(win_c.max() / win_c.min())


def test_classical_baseline_and_recovery():
    for p in seeded_points(52, 100):
        n_h, n_c = occupations(p)
        base = log_bias(n_h, n_c) * population_fano(n_h, n_c)
        assert base >= 2
        weak = fano_formula(p.kind, p.gamma0, n_h, n_c, 1e-8 * p.gamma0)
        assert log_bias(n_h, n_c) * weak == pytest.approx(base, rel=1e-12)


def test_ctur_decomposition():
    for p in seeded_points(53, 50):
        n_h, n_c = occupations(p)
        fr = fano(p)
        q = ctur(p)[0]
        want = log_bias(n_h, n_c) * fr.f_pop * (1 - fr.coherent_correction / fr.f_pop)
        assert q == pytest.approx(want, rel=1e-10)


# -- Drazin inverse --------------------------------------------------------

def test_drazin_axioms():
    for p in seeded_points(54, 50):
        L = liouvillian(p)
        rho = steady_numeric(L)
        lp = drazin(L, rho)
        proj = np.outer(vec(rho), vec(np.eye(rho.shape[0])))
        eye = np.eye(L.shape[0])
        for m in (L @ lp - (eye - proj), lp @ L - (eye - proj), lp @ proj, proj @ lp):
            assert np.abs(m).max() <= 1e-10


def test_drazin_worked_entry():
    p = worked_point()
    lp = drazin(liouvillian(p), steady_numeric(liouvillian(p)))
    a, gam = 0.5, 1.0
    entry = 2j * a / (8 * a * a + gam ** 2)
    assert entry == pytest.approx(1j / 3)
    np.testing.assert_allclose(lp, drazin_closed(p), rtol=0, atol=1e-14)
    assert np.isclose(lp, 1j / 3, atol=1e-14).any()


def test_drazin_matches_printed_matrices():
    for p in seeded_points(55, 100):
        L = liouvillian(p)
        lp = drazin(L, steady_numeric(L))
        assert np.abs(lp - drazin_closed(p)).max() <= 1e-9


def test_drazin_degenerate():
    with pytest.raises(DegenerateSteadyState):
        drazin(np.zeros((4, 4)), np.zeros((2, 2)))


# -- quantum TUR -----------------------------------------------------------

def test_worked_qtur():
    ups, psi, f = qtur_bound(worked_point())
    assert ups == pytest.approx(1 / 3, rel=1e-14)
    assert psi == pytest.approx(8 / 3, rel=1e-13)
    assert f == pytest.approx(1 / 3, rel=1e-13)
    assert qtur_bound_closed(worked_point()) == pytest.approx(1 / 3, rel=1e-15)


def test_incoherent_worked_bound():
    assert qtur_bound_closed(worked_point(EngineKind.INCOHERENT)) == pytest.approx(4 / 15, rel=1e-15)
    assert qtur_bound(worked_point(EngineKind.INCOHERENT))[2] == pytest.approx(4 / 15, rel=1e-13)


def test_zero_drive_bound_is_activity():
    for kind in EngineKind:
        ups, psi, f = qtur_bound(EngineParams(0.1, 10, 5, 0.01, 0.8, 0.0, kind))
        assert psi == 0
        assert f == 1 / ups


def test_bound_matches_closed_form():
    for p in seeded_points(56, 100):
        ups, psi, f = qtur_bound(p)
        n_h, n_c = occupations(p)
        assert ups > 0 and f > 0
        assert ups + psi == pytest.approx(inv_f_formula(p.kind, p.gamma0, n_h, n_c, p.alpha), rel=1e-8)
        assert ups == pytest.approx(upsilon_formula(p.kind, p.gamma0, n_h, n_c, p.alpha), rel=1e-10)
        assert f == pytest.approx(qtur_bound_closed(p), rel=1e-8)


def test_bound_scaling():
    for p in seeded_points(57, 10):
        for c in (0.1, 7.0):
            q = p.with_(gamma0=c * p.gamma0, alpha=c * p.alpha)
            assert qtur_bound_closed(q) == pytest.approx(qtur_bound_closed(p) / c, rel=1e-12)
            assert qtur_bound(q)[2] == pytest.approx(qtur_bound(p)[2] / c, rel=1e-9)


def test_qtur_theorem_on_samples():
    for p in seeded_points(58, 100):
        rep = tur_report(p)
        assert rep.qtur_ok and rep.nsr >= rep.f_bound - 1e-9
        assert rep.q_value == rep.entropy_rate * rep.nsr
        assert rep.ctur_violated == (rep.q_value < 2)


def test_worked_report():
    rep = tur_report(worked_point())
    assert rep.nsr == pytest.approx(1.0, rel=1e-10)
    assert rep.f_bound == pytest.approx(1 / 3, rel=1e-12)
    assert rep.slack == pytest.approx(2 / 3, rel=1e-10)
    assert rep.qtur_ok
    assert rep.infinite_entropy and rep.q_value == np.inf and not rep.ctur_violated


def test_fig3c_near_saturation():
    n_h = 1 / np.expm1(0.01 * 10)
    n_c = 1 / np.expm1(3.0 * 5)
    g0 = FIG["gamma0"]
    nsr = nsr_formula(EngineKind.COHERENT, g0, n_h, n_c, ALPHA)
    f = 1 / inv_f_formula(EngineKind.COHERENT, g0, n_h, n_c, ALPHA)
    rel_slack = (nsr - f) / f
    assert rel_slack.min() < 0.05
    j = int(rel_slack.argmin())
    rep = tur_report(EngineParams(beta_h=0.01, beta_c=3.0, alpha=ALPHA[j], **FIG))
    assert rep.slack / rep.f_bound == pytest.approx(rel_slack[j], abs=1e-6)
    assert rep.qtur_ok


def test_fig_parameters_bound_holds():
    for b_c in (0.1, 0.7, 0.8, 3.0):
        for kind in EngineKind:
            n_h = 1 / np.expm1(0.01 * 10)
            n_c = 1 / np.expm1(b_c * 5)
            nsr = nsr_formula(kind, FIG["gamma0"], n_h, n_c, ALPHA)
            f = 1 / inv_f_formula(kind, FIG["gamma0"], n_h, n_c, ALPHA)
            assert rel(np.minimum(nsr, f), f) <= 1e-12
