"""
Dense complex kernels for small superoperators.

Everything here is sized for n <= 16 (in practice 4x4 and 9x9 Liouvillians).
Matrices are plain ``numpy`` complex arrays; the routines below add the
pivoting, characteristic-polynomial and root-refinement logic the rest of
the package relies on.
"""

import numpy as np

__all__ = [
    "SingularMatrix",
    "NoConvergence",
    "as_matrix",
    "kron",
    "lu_factor",
    "lu_solve",
    "solve",
    "det",
    "char_poly",
    "char_poly_low",
    "char_poly_jet",
    "polyval",
    "root_near",
]

PIVOT_RTOL = 1e-14


class SingularMatrix(np.linalg.LinAlgError):
    """Raised when LU elimination meets a pivot below the relative threshold."""


class NoConvergence(ArithmeticError):
    """Raised when Newton refinement of a polynomial root fails."""


def as_matrix(a):
    """Return `a` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError("expected a non-empty 2-D matrix, got shape %s" % (m.shape,))
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(m, extended):
    if extended and np.asarray(m).dtype == np.clongdouble:
        m = np.asarray(m)
        if m.ndim != 2 or not np.all(np.isfinite(m)):
            raise ValueError("expected a finite 2-D matrix")
    else:
        m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix, got %s" % (m.shape,))
    return m.astype(np.clongdouble if extended else complex)


def kron(a, b):
    """
    Kronecker product ``K[i*p + k, j*q + l] = A[i, j] * B[k, l]``.

    Parameters
    ----------
    a : (m, n) array_like
    b : (p, q) array_like

    Returns
    -------
    (m*p, n*q) complex ndarray
    """
    return np.kron(as_matrix(a), as_matrix(b))


def lu_factor(a, extended=False):
    """
    LU factorization with partial (row) pivoting.

    Parameters
    ----------
    a : (n, n) array_like
    extended : bool, optional
        Factor in ``numpy.clongdouble``.

    Returns
    -------
    lu : (n, n) complex ndarray
        Unit lower factor below the diagonal, upper factor on and above.
    piv : (n,) int ndarray
        Row permutation: ``a[piv] == L @ U``.

    Raises
    ------
    SingularMatrix
        If some pivot magnitude is below ``1e-14 * max|a_ij|``.
    """
    lu = _square(a, extended).copy()
    n = lu.shape[0]
    scale = np.abs(lu).max()
    tol = PIVOT_RTOL * scale
    piv = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if scale == 0.0 or abs(lu[p, k]) <= tol:
            raise SingularMatrix("pivot %d below %.1e relative threshold" % (k, PIVOT_RTOL))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve(factors, b):
    """Solve ``A x = b`` from the output of `lu_factor`; `b` may be 1-D or 2-D."""
    lu, piv = factors
    n = lu.shape[0]
    x = np.array(b, dtype=lu.dtype)[piv]
    if x.shape[0] != n:
        raise ValueError("right-hand side has %d rows, expected %d" % (x.shape[0], n))
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def solve(a, b, extended=False):
    """
    Solve the square system ``a @ x = b`` by pivoted LU (in clongdouble if `extended`).

    >>> solve([[2, 0], [0, 4]], [2, 2]).real
    array([1. , 0.5])
    """
    return lu_solve(lu_factor(a, extended), b)


def det(m, extended=False):
    """
    Determinant by partially pivoted elimination.

    Unlike `lu_factor` there is no singularity threshold: a (nearly) singular
    matrix returns its small determinant, which is what the counting-field
    derivatives need.  With ``extended=True`` the elimination runs in
    ``numpy.clongdouble`` (and a clongdouble input is used as is).
    """
    a = _square(m, extended).copy()
    n = a.shape[0]
    d = a.dtype.type(1)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0:
            return a.dtype.type(0)
        if p != k:
            a[[k, p]] = a[[p, k]]
            d = -d
        d *= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k] / a[k, k], a[k, k + 1:])
    return d


def char_poly_low(m, extended=False):
    """
    Two lowest coefficients of ``det(lambda I - M)``.

    ``c0 = det(-M)`` and ``c1`` is the sum of the principal (n-1)-minors of
    ``-M``, both from pivoted elimination.  For a nearly singular M this is
    far more accurate than the Faddeev-LeVerrier recursion, whose constant
    term comes out of heavy cancellation.

    Returns
    -------
    (2,) ndarray, complex (clongdouble if `extended`)
    """
    a = -_square(m, extended)
    idx = np.arange(a.shape[0])
    c1 = sum(det(a[np.ix_(idx != i, idx != i)], extended) for i in idx)
    return np.array([det(a, extended), c1])


def char_poly(m, extended=False):
    """
    Monic characteristic polynomial ``det(lambda I - M)`` by Faddeev-LeVerrier.

    Parameters
    ----------
    m : (n, n) array_like
    extended : bool, optional
        Run the recursion in ``numpy.clongdouble`` and round the result.

    Returns
    -------
    c : (n+1,) complex ndarray
        Ascending coefficients, ``p(lambda) = sum(c[k] * lambda**k)``, ``c[n] == 1``.

    Examples
    --------
    >>> char_poly(np.diag([1.0, 2.0])).real
    array([ 2., -3.,  1.])
    """
    m = _square(m, extended)
    n = m.shape[0]
    c = np.zeros(n + 1, dtype=m.dtype)
    c[n] = 1.0
    eye = np.eye(n, dtype=m.dtype)
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + c[n - k + 1] * eye
        c[n - k] = -np.trace(m @ mk) / k
    return c.astype(complex)


def char_poly_jet(m0, m1, m2, extended=False):
    """
    Characteristic polynomial of ``M(t)`` and its first two t-derivatives at 0.

    ``M(t) = m0 + m1 t + m2 t**2 / 2 + ...``; the Faddeev-LeVerrier recursion
    is differentiated term by term, so the derivatives are exact up to
    rounding.

    With ``extended=True`` the recursion runs in ``numpy.clongdouble``.

    Returns
    -------
    c, dc, ddc : (n+1,) complex ndarrays
        Ascending coefficients of ``det(lambda I - M(t))`` and their first and
        second derivatives.
    """
    m0, m1, m2 = (_square(x, extended) for x in (m0, m1, m2))
    n = m0.shape[0]
    c = np.zeros(n + 1, dtype=m0.dtype)
    dc = np.zeros(n + 1, dtype=m0.dtype)
    ddc = np.zeros(n + 1, dtype=m0.dtype)
    c[n] = 1.0
    eye = np.eye(n, dtype=m0.dtype)
    k0 = np.zeros_like(m0)
    k1 = np.zeros_like(m0)
    k2 = np.zeros_like(m0)
    for k in range(1, n + 1):
        j = n - k + 1
        k0, k1, k2 = (m0 @ k0 + c[j] * eye,
                      m1 @ k0 + m0 @ k1 + dc[j] * eye,
                      m2 @ k0 + 2 * m1 @ k1 + m0 @ k2 + ddc[j] * eye)
        c[n - k] = -np.trace(m0 @ k0) / k
        dc[n - k] = -np.trace(m1 @ k0 + m0 @ k1) / k
        ddc[n - k] = -np.trace(m2 @ k0 + 2 * m1 @ k1 + m0 @ k2) / k
    return c.astype(complex), dc.astype(complex), ddc.astype(complex)


def polyval(c, x):
    """Evaluate ascending coefficients `c` and the derivative at `x` (Horner)."""
    p = 0.0j
    dp = 0.0j
    for ck in c[::-1]:
        dp = dp * x + p
        p = p * x + ck
    return p, dp


def root_near(c, seed, maxiter=50):
    """
    Newton-refine the root of ``sum(c[k] x**k)`` closest in basin to `seed`.

    A step that increases ``|p|`` is halved, at most three times.  After the
    residual test ``|p(r)| <= 1e-12 * max|c_k|`` is met the iteration keeps
    polishing while the step size still shrinks, so that tiny roots of badly
    scaled polynomials are resolved to full precision.

    Raises
    ------
    NoConvergence
        If the residual test is not met within `maxiter` iterations or the
        derivative vanishes.
    """
    c = np.asarray(c, dtype=complex)
    tol = 1e-12 * np.abs(c).max()
    x = complex(seed)
    p, dp = polyval(c, x)
    converged = abs(p) <= tol
    last = np.inf
    for _ in range(maxiter):
        if p == 0:
            return x
        if dp == 0:
            raise NoConvergence("zero derivative at %r" % x)
        step = p / dp
        xn = x - step
        pn, dpn = polyval(c, xn)
        if not converged:
            for _ in range(3):
                if abs(pn) <= abs(p):
                    break
                step *= 0.5
                xn = x - step
                pn, dpn = polyval(c, xn)
        if converged and abs(step) >= last:
            # stagnated at the rounding floor; keep the better of the two
            return xn if abs(pn) < abs(p) else x
        last = abs(step)
        x, p, dp = xn, pn, dpn
        if abs(p) <= tol:
            if converged and abs(step) <= 4 * np.finfo(float).eps * abs(x):
                return x
            converged = True
    if converged:
        return x
    raise NoConvergence("no root within %d iterations from seed %r" % (maxiter, seed))
