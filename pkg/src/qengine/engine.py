"""
Coherent and incoherent three-level heat engines in the rotating frame.

Levels are |0>, |1>, |2> with bare energies 0, omega_h - omega_c, omega_h.
The hot bath drives |0> <-> |2>, the cold bath |1> <-> |2>, and a classical
field of amplitude alpha couples |0> <-> |1>.

* Incoherent engine: independent one-photon exchanges with each bath, on
  the full qutrit (9x9 superoperator).
* Coherent engine: two-photon exchange |0> <-> |1> that absorbs a hot photon
  and emits a cold one in a single jump.  Level |2> never gets populated, so
  the model lives on the {|0>, |1>} block (4x4 superoperator).

Superoperators use column stacking, ``vec(A X B) = (B.T kron A) vec(X)``;
entry ``(i, j)`` of a d x d matrix sits at ``i + d*j`` of its vector.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import kron

__all__ = [
    "EngineKind",
    "EngineParams",
    "InvalidParameters",
    "NotAnEngine",
    "Occupations",
    "Rates",
    "CountingField",
    "JumpOperator",
    "dimension",
    "occupations",
    "rates",
    "hamiltonians",
    "jump_operators",
    "liouvillian",
    "liouvillian_derivatives",
    "lr_ll_split",
    "vec",
    "unvec",
    "random_params",
]

# beyond this beta*omega the Bose factor is below 1e-304; treat it as zero
_OVERFLOW_X = 700.0


class InvalidParameters(ValueError):
    """Parameters violate a basic physical invariant."""


class NotAnEngine(ValueError):
    """beta_h*omega_h >= beta_c*omega_c: no population inversion, no engine."""


class EngineKind(enum.Enum):
    COHERENT = "coherent"
    INCOHERENT = "incoherent"


@dataclass(frozen=True)
class EngineParams:
    """
    Physical inputs of one operating point (hbar = k_B = 1).

    ``beta_c`` (or ``beta_h``) may be ``inf`` for a zero-temperature bath.
    """

    gamma0: float
    omega_h: float
    omega_c: float
    beta_h: float
    beta_c: float
    alpha: float
    kind: EngineKind = EngineKind.COHERENT

    def __post_init__(self):
        kind = self.kind
        if not isinstance(kind, EngineKind):
            try:
                object.__setattr__(self, "kind", EngineKind(str(kind).lower()))
            except ValueError:
                raise InvalidParameters("unknown engine kind %r" % (kind,)) from None
        for name in ("gamma0", "omega_h", "omega_c", "beta_h", "beta_c", "alpha"):
            v = float(getattr(self, name))
            if np.isnan(v):
                raise InvalidParameters("%s is NaN" % name)
            object.__setattr__(self, name, v)
        for name in ("gamma0", "omega_h", "omega_c", "alpha"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameters("%s must be finite" % name)
        if not self.omega_h > self.omega_c > 0:
            raise InvalidParameters("need omega_h > omega_c > 0")
        if not self.gamma0 > 0:
            raise InvalidParameters("need gamma0 > 0")
        if not self.alpha >= 0:
            raise InvalidParameters("need alpha >= 0")
        if not self.beta_c > self.beta_h > 0:
            raise InvalidParameters("need beta_c > beta_h > 0")

    @classmethod
    def from_occupations(cls, gamma0, n_h, n_c, alpha, omega_h=10.0, omega_c=5.0,
                         kind=EngineKind.COHERENT):
        """Build parameters that reproduce given mean photon numbers (n = 0 gives beta = inf)."""
        def beta(n, w):
            return np.inf if n == 0 else float(np.log1p(1.0 / n) / w)
        return cls(gamma0, omega_h, omega_c, beta(n_h, omega_h), beta(n_c, omega_c),
                   alpha, kind)

    def with_(self, **changes):
        d = {k: getattr(self, k) for k in
             ("gamma0", "omega_h", "omega_c", "beta_h", "beta_c", "alpha", "kind")}
        d.update(changes)
        return EngineParams(**d)

    @property
    def is_engine(self):
        return self.beta_h * self.omega_h < self.beta_c * self.omega_c

    def require_engine(self):
        if not self.is_engine:
            raise NotAnEngine(
                "beta_h*omega_h = %g >= beta_c*omega_c = %g"
                % (self.beta_h * self.omega_h, self.beta_c * self.omega_c))


def dimension(kind):
    return 2 if EngineKind(kind) is EngineKind.COHERENT else 3


def _bose(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        n = np.where(x > _OVERFLOW_X, 0.0, 1.0 / np.expm1(np.minimum(x, _OVERFLOW_X)))
    return n


class Occupations(NamedTuple):
    n_h: float
    n_c: float

    @property
    def degenerate(self):
        """True when a bath is at (numerically) zero temperature."""
        return self.n_h == 0 or self.n_c == 0


def occupations(params):
    """Mean photon numbers ``n_x = 1/(exp(beta_x omega_x) - 1)``."""
    return Occupations(float(_bose(params.beta_h * params.omega_h)),
                       float(_bose(params.beta_c * params.omega_c)))


@dataclass(frozen=True)
class Rates:
    """
    Transition rates of both models.

    ``gamma1``/``gamma2`` are the two-photon rates of the coherent engine,
    ``g1..g4`` the one-photon rates of the incoherent one.
    """

    n_h: float
    n_c: float
    gamma1: float
    gamma2: float
    g1: float
    g2: float
    g3: float
    g4: float


def rates(params):
    n_h, n_c = occupations(params)
    g0 = params.gamma0
    return Rates(n_h, n_c,
                 gamma1=g0 * n_c * (n_h + 1), gamma2=g0 * n_h * (n_c + 1),
                 g1=g0 * (n_h + 1), g2=g0 * n_h, g3=g0 * (n_c + 1), g4=g0 * n_c)


class CountingField(NamedTuple):
    chi_h: float = 0.0
    chi_c: float = 0.0


class JumpOperator(NamedTuple):
    """Jump matrix (rate already folded in) and the signed quanta it exchanges."""
    matrix: np.ndarray
    weight_h: int
    weight_c: int


def _ketbra(i, j, d):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return m


def hamiltonians(params):
    """
    Bare Hamiltonian (3x3) and the rotating-frame drive at working dimension.

    Returns
    -------
    h_s : (3, 3) ndarray
        ``diag(0, omega_h - omega_c, omega_h)``.
    h_dr : (d, d) ndarray
        ``alpha (|1><0| + |0><1|)``.
    """
    h_s = np.diag([0.0, params.omega_h - params.omega_c, params.omega_h]).astype(complex)
    d = dimension(params.kind)
    h_dr = params.alpha * (_ketbra(1, 0, d) + _ketbra(0, 1, d))
    return h_s, h_dr


def jump_operators(params):
    r = rates(params)
    if params.kind is EngineKind.COHERENT:
        b_hc = _ketbra(0, 1, 2)
        return [JumpOperator(np.sqrt(r.gamma1) * b_hc, -1, +1),
                JumpOperator(np.sqrt(r.gamma2) * b_hc.conj().T, +1, -1)]
    b_h = _ketbra(0, 2, 3)
    b_c = _ketbra(1, 2, 3)
    return [JumpOperator(np.sqrt(r.g1) * b_h, -1, 0),
            JumpOperator(np.sqrt(r.g2) * b_h.conj().T, +1, 0),
            JumpOperator(np.sqrt(r.g3) * b_c, 0, -1),
            JumpOperator(np.sqrt(r.g4) * b_c.conj().T, 0, +1)]


def _phase(jump, params, chi):
    return np.exp(1j * (jump.weight_h * params.omega_h * chi.chi_h
                        + jump.weight_c * params.omega_c * chi.chi_c))


def liouvillian(params, chi=CountingField(), extended=False):
    """
    Counting-field dressed generator acting on column-stacked states.

    The jump term ``L rho L^dag`` of each channel picks up the phase
    ``exp(i (w_h omega_h chi_h + w_c omega_c chi_c))``.

    With ``extended=True`` the result is ``numpy.clongdouble``: the undressed
    generator plus ``(exp(i theta) - 1)`` times each jump term, the phase
    factor formed in extended precision.  Finite differences in chi then see
    smooth entries instead of float64 rounding noise.
    """
    chi = CountingField(*chi)
    if extended:
        gen = liouvillian(params).astype(np.clongdouble)
        for jump in jump_operators(params):
            theta = np.longdouble(jump.weight_h * params.omega_h) * np.longdouble(chi.chi_h) \
                + np.longdouble(jump.weight_c * params.omega_c) * np.longdouble(chi.chi_c)
            s = np.sin(theta)
            z = -2 * np.sin(theta / 2) ** 2 + np.clongdouble(1j) * s
            gen += z * kron(jump.matrix.conj(), jump.matrix).astype(np.clongdouble)
        return gen
    _, h = hamiltonians(params)
    eye = np.eye(h.shape[0])
    gen = -1j * kron(eye, h) + 1j * kron(h.T, eye)
    for jump in jump_operators(params):
        lk = jump.matrix
        ldl = lk.conj().T @ lk
        gen += _phase(jump, params, chi) * kron(lk.conj(), lk)
        gen -= 0.5 * (kron(eye, ldl) + kron(ldl.T, eye))
    return gen


def liouvillian_derivatives(params, direction, extended=False):
    """
    First and second derivatives of ``liouvillian(params, t * direction)`` at t = 0.

    Only the jump terms depend on the counting field, each through a single
    phase ``exp(i phi t)``.  Mean currents come out of near cancellations
    between these terms, so ``extended=True`` forms the products
    ``phi * term`` in ``numpy.clongdouble``.
    """
    direction = CountingField(*direction)
    d = dimension(params.kind)
    dtype = np.clongdouble if extended else complex
    real = np.longdouble if extended else float
    d1 = np.zeros((d * d, d * d), dtype=dtype)
    d2 = np.zeros_like(d1)
    for jump in jump_operators(params):
        phi = (real(jump.weight_h * params.omega_h) * real(direction.chi_h)
               + real(jump.weight_c * params.omega_c) * real(direction.chi_c))
        term = kron(jump.matrix.conj(), jump.matrix).astype(dtype)
        d1 += 1j * phi * term
        d2 -= phi * phi * term
    return d1, d2


def lr_ll_split(params):
    """
    Right/left acting parts ``(L_R, L_L)`` of the undressed generator.

    Each carries half of every jump term; their sum is ``liouvillian(params)``.
    """
    _, h = hamiltonians(params)
    eye = np.eye(h.shape[0])
    l_r = -1j * kron(eye, h)
    l_l = 1j * kron(h.T, eye)
    for jump in jump_operators(params):
        lk = jump.matrix
        ldl = lk.conj().T @ lk
        jump_term = kron(lk.conj(), lk)
        l_r += 0.5 * (jump_term - kron(eye, ldl))
        l_l += 0.5 * (jump_term - kron(ldl.T, eye))
    return l_r, l_l


def vec(m):
    """Column-stack a matrix."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v, d=None):
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F")


def random_params(rng, kind, engine=True):
    """
    Draw a parameter point on moderate scales.

    Frequencies in [2, 20] with omega_c/omega_h in [0.2, 0.8], beta*omega
    in roughly [0.05, 4], gamma0 in [0.05, 2], alpha in [0.02, 2].  With
    ``engine=False`` about a third of the draws violate the engine condition.
    """
    while True:
        omega_h = rng.uniform(2.0, 20.0)
        omega_c = omega_h * rng.uniform(0.2, 0.8)
        x_h = rng.uniform(0.05, 1.5)
        x_c = x_h * (rng.uniform(1.05, 3.0) if engine else rng.uniform(0.6, 3.0))
        beta_h = x_h / omega_h
        beta_c = x_c / omega_c
        if not beta_c > beta_h:
            continue
        p = EngineParams(gamma0=rng.uniform(0.05, 2.0), omega_h=omega_h, omega_c=omega_c,
                         beta_h=beta_h, beta_c=beta_c, alpha=rng.uniform(0.02, 2.0),
                         kind=EngineKind(kind))
        if engine and not p.is_engine:
            continue
        return p
