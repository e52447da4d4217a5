"""Fundamental solution K = dS/dt, the step response S and Cauchy-problem solutions.

Two independent representations of K are implemented:

* a real integral along the negative real axis (``kernel_hankel``),
  ``K = -(1/2pi) int_0^inf Im[Psi_+(q) exp(|x| q Psi_+(q))] exp(-q t) dq`` with
  ``Psi_+(q) = Psi(q e^{i pi})``, valid strictly inside the cone ``|x| < c t``;
* the Bromwich line ``Re s = a`` (``kernel_bromwich``),
  ``K = (1/2pi) Re int_0^inf Psi(s) exp(-|x| s Psi(s) + t s) dy``, ``s = a + iy``.

The first one is cheap and accurate unless ``|x| Re Psi_+(q) > t`` for a range
of ``q``, where the integrand grows like ``exp(q (|x| Re Psi_+ - t))`` and the
result comes out of heavy cancellation.  ``kernel_values`` measures that
growth and falls back to the Bromwich line when it is large.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .analysis import MaterialConstants, constants
from .errors import (ClassicalModelBranch, ExceptionalModel, NotAdmissible, OutsideCone,
                     TruncationFailure)
from .measures import Measure
from .symbol import SymbolPair, psi_log, psi_values
from .thermo import (HOOKE, MAXWELL, NEWTON, VOIGT, ZENER, ModelClass, RestrictionReport,
                     check_restriction, classical_weights, classify)
from .quadrature import integrate

MARGIN = 1e-6
HANKEL_REL_TOL = 1e-10
BROMWICH_REL_TOL = 1e-10
COND_LIMIT = 4.0
ENV_DROP = 40.0
Y_MAX = 1e10
MAX_PANELS = 2_000_000

HANKEL = "Hankel"
BROMWICH = "Bromwich"
ZERO = "Zero"

_Q_GRID = np.geomspace(1e-6, 1e30, 577)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Model:
    """A constitutive pair together with its validation and constants."""

    pair: SymbolPair
    clazz: ModelClass
    consts: MaterialConstants
    restriction: RestrictionReport
    forced: bool = False

    @classmethod
    def build(cls, mu_sigma: Measure, mu_eps: Measure, force: bool = False) -> "Model":
        pair = SymbolPair(mu_sigma, mu_eps)
        report = check_restriction(pair)
        if not report.satisfied and not force:
            raise NotAdmissible("the pair violates the thermodynamic restriction")
        return cls(pair, classify(pair, report), constants(pair), report, forced=not report.satisfied)

    @property
    def tau(self) -> float:
        return self.consts.tau

    @property
    def c(self) -> float:
        return self.consts.c

    @property
    def exceptional(self) -> bool:
        return self.clazz.exceptional

    def psi_cut(self, q) -> np.ndarray:
        """``Psi(q e^{i pi})`` on the upper side of the negative real axis."""
        q = np.asarray(q, dtype=float)
        if self.clazz.classical:
            a0, a1, b0, b1 = classical_weights(self.pair)
            ratio = (a0 - a1 * q) / (b0 - b1 * q)
            root = np.sqrt(np.abs(ratio))
            return np.where(ratio >= 0, root + 0j, -1j * root)
        return psi_log(self.pair, np.log(q) + 1j * math.pi)

    def psi(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        return psi_values(self.pair, np.abs(s), np.angle(s))


def _check_admissible(model: Model):
    if not model.restriction.satisfied and not model.forced:
        raise NotAdmissible("the pair violates the thermodynamic restriction")


def _in_cone(model: Model, x, t, margin: float = 0.0):
    c = model.c
    if c == math.inf:
        return np.ones(np.broadcast(x, t).shape, dtype=bool)
    return np.abs(x) < (1.0 - margin) * c * np.asarray(t)


# --- Hankel representation, proper fractional models --------------------------


def _hankel_envelope(model: Model, x: np.ndarray, t: np.ndarray):
    """Growth exponent and truncation point for each ``(x, t)`` pair."""
    q = _Q_GRID
    psi = model.psi_cut(q)
    expo = q[:, None] * (np.abs(x)[None, :] * psi.real[:, None] - t[None, :])
    cond = np.maximum(expo.max(axis=0), 0.0)
    logenv = np.log(np.abs(psi) + 1e-300)[:, None] + expo + np.log(q)[:, None]
    top = logenv.max(axis=0)
    above = logenv >= (top - ENV_DROP)[None, :]
    last = len(q) - 1 - np.argmax(above[::-1], axis=0)
    if np.any(last >= len(q) - 1):
        raise TruncationFailure("Hankel integrand does not decay on the sampled range")
    qmax = np.maximum(q[last + 1], 2.0)
    return cond, qmax, np.exp(top)


def _hankel_pairs(model: Model, x: np.ndarray, t: np.ndarray, rel_tol: float = HANKEL_REL_TOL,
                  abs_tol: float = 0.0, limit: int = 8000):
    """Hankel integral for arrays of ``(x, t)`` pairs sharing one ``q`` partition."""
    x = np.abs(np.asarray(x, dtype=float))
    t = np.asarray(t, dtype=float)
    _, qmax, scale = _hankel_envelope(model, x, t)

    def h(q):
        psi = model.psi_cut(q)
        return (psi[:, None] * np.exp(q[:, None] * (x[None, :] * psi[:, None] - t[None, :]))).imag

    abs_tol = np.maximum(1e-15 * scale, abs_tol)
    # q = u**2 on [0, 1] absorbs the q**(-1/2) behaviour of Psi near 0
    near = integrate(lambda u: h(u * u) * (2.0 * u)[:, None], [0.0, 0.5, 1.0], rel_tol=rel_tol,
                     abs_tol=abs_tol, limit=limit)
    top = float(qmax.max())
    edges = np.concatenate([[1.0], 2.0 ** np.arange(1, math.ceil(math.log2(top)) + 1)])
    far = integrate(h, edges, rel_tol=rel_tol, abs_tol=abs_tol, limit=limit)
    val = -(np.atleast_1d(near.value) + np.atleast_1d(far.value)) / (2.0 * math.pi)
    absint = np.atleast_1d(near.abs_integral) + np.atleast_1d(far.abs_integral)
    err = (np.atleast_1d(near.error) + np.atleast_1d(far.error) + 10 * _EPS * absint) / (2.0 * math.pi)
    return val, err


def _require_proper(model: Model):
    _check_admissible(model)
    if model.clazz.classical:
        raise ClassicalModelBranch(f"{model.clazz.tag} model: use kernel_hankel_classical")
    if model.exceptional:
        raise ExceptionalModel("kernel evaluation is refused for exceptional models")


def kernel_hankel(model: Model, x: float, t: float) -> tuple[float, float]:
    """K(x, t) from the integral along the negative real axis."""
    _require_proper(model)
    if t <= 0:
        raise ValueError("t must be positive")
    if x == 0:
        raise ValueError("x must be non-zero")
    if not _in_cone(model, x, t, MARGIN):
        raise OutsideCone(f"|x| = {abs(x)} is not inside (1 - {MARGIN}) c t = {(1 - MARGIN) * model.c * t}")
    v, e = _hankel_pairs(model, np.array([x]), np.array([t]))
    return float(v[0]), float(e[0])


def hankel_two_sided(model: Model, x: float, t: float) -> float:
    """Same integral written with both sides of the cut (no conjugate shortcut)."""
    X = abs(x)

    def h(q):
        up = model.psi_cut(q)
        down = psi_log(model.pair, np.log(q) - 1j * math.pi)
        val = (down * np.exp(X * q * down) - up * np.exp(X * q * up)) * np.exp(-q * t)
        return (val / (4j * math.pi)).real

    _, qmax, _ = _hankel_envelope(model, np.array([X]), np.array([t]))
    near = integrate(lambda u: h(u * u) * 2.0 * u, [0.0, 0.5, 1.0], rel_tol=1e-12)
    edges = np.concatenate([[1.0], 2.0 ** np.arange(1, math.ceil(math.log2(qmax[0])) + 1)])
    far = integrate(h, edges, rel_tol=1e-12)
    return near.value + far.value


# --- classical models --------------------------------------------------------


def _classical_segment(model: Model):
    a0, a1, b0, b1 = classical_weights(model.pair)
    tag = model.clazz.tag
    if tag == NEWTON:
        return 0.0, math.inf
    if tag == VOIGT:
        return b0 / b1, math.inf
    if tag == MAXWELL:
        return 0.0, a0 / a1
    if tag == ZENER:
        return tuple(sorted((a0 / a1, b0 / b1)))
    return None


def kernel_hankel_classical(model: Model, x: float, t: float) -> tuple[float, float]:
    """K(x, t) for models supported on {0, 1}, integrating between the branch points.

    On the segment ``Psi_+ = -i w`` with ``w = sqrt|ratio|`` real, so the
    integrand is ``w cos(|x| q w) exp(-q t) / 2pi``.  Square-root
    substitutions at the segment ends remove the endpoint singularities.  A
    pole of ``Psi`` at a non-zero end is enclosed by a circle, because
    ``exp(-|x| s Psi)`` is essentially singular there.  For the Hooke model the kernel is a travelling delta and vanishes inside
    the cone.
    """
    _check_admissible(model)
    if not model.clazz.classical:
        raise ValueError("kernel_hankel_classical needs a classical model")
    if t <= 0:
        raise ValueError("t must be positive")
    if not _in_cone(model, x, t, MARGIN):
        raise OutsideCone(f"|x| = {abs(x)} is outside the cone")
    seg = _classical_segment(model)
    if seg is None:
        return 0.0, 0.0
    X = abs(x)
    a0, a1, b0, b1 = classical_weights(model.pair)

    lo, hi = seg
    roots = [(a0 / a1 if a1 > 0 else None), (b0 / b1 if b1 > 0 else None)]

    def linear(c0, c1, root, q, dlo, dhi):
        # c0 - c1 q, taken from the exact offset when q sits next to its root
        if root is not None and root == lo:
            return -c1 * dlo
        if root is not None and root == hi:
            return c1 * dhi
        return c0 - c1 * q

    def g(q, dlo, dhi):
        num = linear(a0, a1, roots[0], q, dlo, dhi)
        den = linear(b0, b1, roots[1], q, dlo, dhi)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.sqrt(np.abs(num / den))
        return w * np.cos(X * q * w) * np.exp(-q * t)

    def from_lo(u):
        u2 = u * u
        return g(lo + u2, u2, hi - lo - u2) * 2.0 * u

    def from_hi(u):
        u2 = u * u
        return g(hi - u2, hi - lo - u2, u2) * 2.0 * u

    def direct(q):
        return g(q, q - lo, hi - q)

    # A pole of Psi at a segment end away from 0 makes exp(-|x| s Psi) essentially
    # singular there, so that end is enclosed by a circle instead.
    pole_lo = roots[1] is not None and roots[1] == lo and lo > 0
    pole_hi = roots[1] is not None and roots[1] == hi
    r = 0.0
    if pole_lo:
        r = lo if hi == math.inf else min(lo, 0.5 * (hi - lo))
    elif pole_hi:
        r = 0.5 * (hi - lo)
    pieces = []
    if hi == math.inf:
        start = lo + r
        if pole_lo:
            pieces.append(integrate(direct, [start, start + 1.0], rel_tol=1e-12, limit=4000))
        else:
            pieces.append(integrate(from_lo, [0.0, 0.5, 1.0], rel_tol=1e-12, limit=4000))
        qmax = start + 1.0 + 45.0 / t
        n = max(1, math.ceil(math.log2(qmax - start)))
        edges = start + np.concatenate([[1.0], 2.0 ** np.arange(1, n + 1)])
        pieces.append(integrate(direct, edges, rel_tol=1e-12, abs_tol=1e-16, limit=8000))
    else:
        e_lo = lo + r if pole_lo else lo
        e_hi = hi - r if pole_hi else hi
        mid = 0.5 * (e_lo + e_hi)
        if pole_lo:
            pieces.append(integrate(direct, [e_lo, mid], rel_tol=1e-12, limit=4000))
        else:
            h = math.sqrt(mid - lo)
            pieces.append(integrate(from_lo, [0.0, 0.5 * h, h], rel_tol=1e-12, limit=4000))
        if pole_hi:
            pieces.append(integrate(direct, [mid, e_hi], rel_tol=1e-12, limit=4000))
        else:
            h = math.sqrt(hi - mid)
            pieces.append(integrate(from_hi, [0.0, 0.5 * h, h], rel_tol=1e-12, limit=4000))
    total = sum(p.value for p in pieces) / (2.0 * math.pi)
    err = sum(p.error + 10 * _EPS * p.abs_integral for p in pieces) / (2.0 * math.pi)
    if r > 0:
        centre = -(lo if pole_lo else hi)
        phis = (-math.pi, 0.0, math.pi) if pole_lo else (0.0, math.pi, 2.0 * math.pi)

        def around(phi):
            z = r * np.exp(1j * phi)
            s = centre + z
            psi = np.sqrt((a0 + a1 * s) / (b0 + b1 * s))
            return (psi * np.exp(t * s - X * s * psi) * z).real

        circ = integrate(around, list(phis), rel_tol=1e-12, limit=4000)
        total += circ.value / (4.0 * math.pi)
        err += (circ.error + 10 * _EPS * circ.abs_integral) / (4.0 * math.pi)
    return total, err


# --- Bromwich line -----------------------------------------------------------


def _bromwich_setup(model: Model, X: float, t: float, a: float):
    y = np.concatenate([[0.0], np.geomspace(1e-4, Y_MAX, 337)])
    s = a + 1j * y
    psi = model.psi(s)
    logenv = np.log(np.abs(psi) + 1e-300) + (-X * s * psi + t * s).real
    top = logenv.max()
    above = np.flatnonzero(logenv >= top - ENV_DROP)
    last = above[-1]
    if last >= len(y) - 1:
        raise TruncationFailure(f"Bromwich integrand has not decayed by Y = {Y_MAX:g}")
    Y = y[last + 1]
    rate = t + X * float(np.abs(psi[: last + 2]).max())
    return Y, rate, math.exp(top)


def kernel_bromwich(model: Model, x: float, t: float, a: float | None = None, rel_tol: float = BROMWICH_REL_TOL,
                    abs_tol: float = 0.0, limit: int = 20_000) -> tuple[float, float]:
    """K(x, t) by integrating along ``Re s = a`` (default ``a = 1/t``)."""
    _check_admissible(model)
    if model.exceptional:
        raise ExceptionalModel("Bromwich inversion does not converge for exceptional models")
    if x == 0:
        raise ValueError("x must be non-zero")
    if t <= 0:
        raise ValueError("t must be positive")
    a = 1.0 / t if a is None else float(a)
    if a <= 0:
        raise ValueError("a must be positive")
    X = abs(x)
    Y, rate, scale = _bromwich_setup(model, X, t, a)
    # panels of about two oscillation periods
    n = max(4, math.ceil(Y * rate / (4.0 * math.pi)))
    if n > MAX_PANELS:
        raise TruncationFailure(f"Bromwich integral needs {n} oscillation panels")

    def f(y):
        s = a + 1j * y
        psi = model.psi(s)
        return psi * np.exp(-X * s * psi + t * s)

    res = integrate(f, np.linspace(0.0, Y, n + 1), rel_tol=rel_tol, abs_tol=max(1e-14 * scale * Y, abs_tol),
                    limit=n + limit)
    # The integrand is conjugate-symmetric in y, so the two half-lines combine
    # into a real part; no separate imaginary part is left to check.
    value = res.value.real / (2.0 * math.pi)
    err = (res.error + math.exp(-ENV_DROP) * scale * Y + 10 * _EPS * res.abs_integral) / (2.0 * math.pi)
    return value, err


# --- dispatch ----------------------------------------------------------------


def kernel_values(model: Model, x, t, method: str = "auto", quad: dict | None = None):
    """K at arrays of ``(x, t)`` pairs.

    Returns ``(values, errors, methods)``.  ``quad`` may override ``rel_tol``,
    ``abs_tol`` and ``limit`` (extra subdivisions) of the integrals.  Points on or outside the cone are
    exactly zero; points in the thin band below the cone and points where
    the Hankel integral would be ill-conditioned use the Bromwich line.
    ``x = 0`` is accepted here (the Hankel integral converges there).
    """
    _check_admissible(model)
    quad = dict(quad or {})
    hq = {"rel_tol": quad.get("rel_tol", HANKEL_REL_TOL), "abs_tol": quad.get("abs_tol", 0.0),
          "limit": quad.get("limit", 8000)}
    bq = {"rel_tol": quad.get("rel_tol", BROMWICH_REL_TOL), "abs_tol": quad.get("abs_tol", 0.0),
          "limit": quad.get("limit", 20_000)}
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    x, t = x.ravel(), t.ravel()
    n = len(x)
    vals = np.zeros(n)
    errs = np.zeros(n)
    methods = np.full(n, ZERO, dtype=object)
    inside = _in_cone(model, x, t)
    if model.clazz.classical:
        if model.clazz.tag != HOOKE and model.exceptional and method == BROMWICH:
            raise ExceptionalModel("Bromwich inversion does not converge for exceptional models")
        for i in np.flatnonzero(inside):
            if method == BROMWICH:
                vals[i], errs[i] = kernel_bromwich(model, x[i], t[i], **bq)
                methods[i] = BROMWICH
            else:
                vals[i], errs[i] = kernel_hankel_classical(model, x[i], t[i])
                methods[i] = HANKEL
        return vals, errs, methods
    if model.exceptional:
        raise ExceptionalModel("kernel evaluation is refused for exceptional models")
    band = inside & ~_in_cone(model, x, t, MARGIN)
    idx = np.flatnonzero(inside & ~band)
    use_b = list(np.flatnonzero(band))
    if method == BROMWICH:
        use_b += list(idx)
        idx = idx[:0]
    elif len(idx):
        cond, _, _ = _hankel_envelope(model, np.abs(x[idx]), t[idx])
        if method != HANKEL:
            bad = (cond > COND_LIMIT) & (x[idx] != 0)
            use_b += list(idx[bad])
            idx = idx[~bad]
    # points whose integrands decay at similar rates share one q partition
    if len(idx):
        _, qmax, _ = _hankel_envelope(model, np.abs(x[idx]), t[idx])
        band_of = np.floor(np.log2(qmax) / 2.0)
        for b in np.unique(band_of):
            group = idx[band_of == b]
            for chunk in np.array_split(group, max(1, len(group) // 64)):
                v, e = _hankel_pairs(model, x[chunk], t[chunk], **hq)
                vals[chunk], errs[chunk] = v, e
                methods[chunk] = HANKEL
    for i in use_b:
        try:
            vals[i], errs[i] = kernel_bromwich(model, x[i], t[i], **bq)
            methods[i] = BROMWICH
        except TruncationFailure:
            # very short times: the line integral cannot be truncated, the
            # Hankel integral still can (its error estimate tells how well)
            if x[i] == 0 or method == BROMWICH:
                raise
            v, e = _hankel_pairs(model, x[i:i + 1], t[i:i + 1], **hq)
            vals[i], errs[i] = v[0], e[0]
            methods[i] = HANKEL
    return vals, errs, methods


def kernel(model: Model, x: float, t: float, method: str = "auto") -> tuple[float, float, str]:
    """Single-point K with the method actually used."""
    v, e, m = kernel_values(model, np.array([x]), np.array([t]), method)
    return float(v[0]), float(e[0]), str(m[0])


# --- closed forms for the Newton model ---------------------------------------


def newton_diffusivity(model: Model) -> float:
    a0, _, _, b1 = classical_weights(model.pair)
    return b1 / a0


def heat_kernel(x, t, D: float):
    x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
    return np.exp(-x * x / (4.0 * D * t)) / np.sqrt(4.0 * math.pi * D * t)


def heat_step(x, t, D: float):
    """Time integral of the heat kernel from 0 to t."""
    x, t = np.abs(np.asarray(x, dtype=float)), np.asarray(t, dtype=float)
    return np.sqrt(t / (math.pi * D)) * np.exp(-x * x / (4.0 * D * t)) - x / (2.0 * D) * erfc(x / np.sqrt(4.0 * D * t))


# --- step response -----------------------------------------------------------


def step_response_S(model: Model, x: float, t: float, rel_tol: float = 1e-11) -> float:
    """S(x, t) = int_0^t K(x, u) du for x != 0."""
    return float(step_response_values(model, x, [t], rel_tol)[0])


def step_response_values(model: Model, x: float, ts, rel_tol: float = 1e-11) -> np.ndarray:
    """S(x, t) for several times from a single integration in ``u``.

    The times are breakpoints of the partition, so ``S(x, t_j)`` is the
    integral of ``K(x, u) [u < t_j]`` with a piecewise constant indicator.
    """
    _check_admissible(model)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if x == 0:
        raise ValueError("x must be non-zero")
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    X = abs(x)
    if model.clazz.tag == HOOKE:
        k = model.consts.k
        return np.where(ts > k * X, 0.5 * k, 0.0)
    if model.exceptional:
        raise ExceptionalModel("step response is refused for exceptional models")
    t0 = 0.0 if model.c == math.inf else X / model.c
    lo = t0 / (1.0 - MARGIN)
    live = ts > lo
    out = np.zeros(len(ts))
    if not np.any(live):
        return out
    ends = np.unique(ts[live])
    edges = np.unique(np.concatenate([[lo, lo + 0.5 * (ends[0] - lo)], ends]))

    def f(u):
        v, _, _ = kernel_values(model, np.full(len(u), X), u)
        return v[:, None] * (u[:, None] < ends[None, :])

    res = integrate(f, edges, rel_tol=rel_tol, abs_tol=1e-16, limit=400 + 40 * len(ends))
    vals = np.atleast_1d(res.value)
    out[live] = vals[np.searchsorted(ends, ts[live])]
    return out


# --- grids and the Cauchy problem -------------------------------------------


@dataclass
class KernelGrid:
    xs: np.ndarray
    ts: np.ndarray
    K: np.ndarray
    method: np.ndarray
    est_error: np.ndarray
    u: np.ndarray | None = None
    warnings: list = field(default_factory=list)

    def rows(self):
        """Rows ``(x, t, K, err[, u])`` in x-major order."""
        for i, xv in enumerate(self.xs):
            for j, tv in enumerate(self.ts):
                row = [float(xv), float(tv), float(self.K[i, j]), float(self.est_error[i, j])]
                if self.u is not None:
                    row.append(float(self.u[i, j]))
                yield row


@dataclass
class CauchyData:
    u0: np.ndarray | None = None
    v0: np.ndarray | None = None
    delta_at: float | None = None


def kernel_grid(model: Model, xs, ts, method: str = "auto", quad: dict | None = None) -> KernelGrid:
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise ValueError("times must be positive")
    X, T = np.meshgrid(np.abs(xs), ts, indexing="ij")
    v, e, m = kernel_values(model, X.ravel(), T.ravel(), method, quad)
    shape = (len(xs), len(ts))
    return KernelGrid(xs, ts, v.reshape(shape), m.reshape(shape), e.reshape(shape))


def _trapezoid_weights(n: int, dx: float) -> np.ndarray:
    w = np.full(n, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


def cauchy_solve(model: Model, data: CauchyData, xs, ts, quad: dict | None = None) -> KernelGrid:
    """u(x,t) = int K(x-y,t) u0(y) dy + int S(x-y,t) v0(y) dy on a uniform x grid.

    The returned grid carries K sampled at the grid points (kernel centred at
    0, or at ``delta_at``) together with the solution ``u``.
    """
    _check_admissible(model)
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if len(xs) < 2 or len(ts) < 1:
        raise ValueError("grid too small")
    dx = xs[1] - xs[0]
    if dx <= 0 or not np.allclose(np.diff(xs), dx, rtol=1e-9, atol=0.0):
        raise ValueError("x grid must be uniform and ascending")
    n = len(xs)
    notes: list[str] = []
    v0 = None if data.v0 is None else np.asarray(data.v0, dtype=float)
    if v0 is not None and v0.shape != (n,):
        raise ValueError("initial velocity must be sampled on the x grid")

    if data.delta_at is not None:
        grid = kernel_grid(model, xs - data.delta_at, ts, quad=quad)
        grid.xs = xs
        u = grid.K.copy()
        if model.clazz.tag == HOOKE:
            notes.append("Hooke kernel is a travelling delta; only its regular part (zero) is sampled")
        support = [data.delta_at]
        if v0 is not None and np.any(v0):
            u = u + _convolve_s(model, v0, ts, dx)
            support += list(xs[v0 != 0])
        _warn_cone(model, xs, ts, support, notes)
        grid.u = u
        grid.warnings = notes
        return grid

    u0 = np.zeros(n) if data.u0 is None else np.asarray(data.u0, dtype=float)
    if v0 is None:
        v0 = np.zeros(n)
    if u0.shape != (n,):
        raise ValueError("initial displacement must be sampled on the x grid")
    _warn_cone(model, xs, ts, xs[(u0 != 0) | (v0 != 0)], notes)

    if model.clazz.tag == HOOKE:
        u = _dalembert(u0, v0, xs, ts, model.c)
        zeros = np.zeros((n, len(ts)))
        return KernelGrid(xs, ts, zeros, np.full(zeros.shape, ZERO, dtype=object), zeros, u, notes)

    # K depends on |x - y| only: tabulate the n distinct distances once
    d = dx * np.arange(n)
    D, T = np.meshgrid(d, ts, indexing="ij")
    kv, _, _ = kernel_values(model, D.ravel(), T.ravel(), quad=quad)
    Kd = kv.reshape(D.shape)
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    u = np.einsum("ijt,j->it", Kd[idx], _trapezoid_weights(n, dx) * u0)
    if np.any(v0):
        u = u + _convolve_s(model, v0, ts, dx)
    grid = kernel_grid(model, xs, ts, quad=quad)
    grid.u = u
    grid.warnings = notes
    return grid


def _convolve_s(model: Model, v0, ts, dx):
    n = len(v0)
    d = dx * np.arange(n)
    # S is continuous in x, so the x = 0 entry uses a tiny offset
    d[0] = 1e-9 * dx
    S = np.array([step_response_values(model, di, ts) for di in d])
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    return np.einsum("ijt,j->it", S[idx], _trapezoid_weights(n, dx) * v0)


def _dalembert(u0, v0, xs, ts, c):
    u = np.zeros((len(xs), len(ts)))
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (v0[1:] + v0[:-1]) * np.diff(xs))])
    for j, t in enumerate(ts):
        ct = c * t
        left = np.interp(xs - ct, xs, u0, left=0.0, right=0.0)
        right = np.interp(xs + ct, xs, u0, left=0.0, right=0.0)
        V = np.interp(xs + ct, xs, cum) - np.interp(xs - ct, xs, cum)
        u[:, j] = 0.5 * (left + right) + V / (2.0 * c)
    return u


def _warn_cone(model: Model, xs, ts, support, notes):
    support = np.atleast_1d(np.asarray(support, dtype=float))
    if len(support) == 0:
        return
    reach = model.c * float(np.max(ts))
    if reach == math.inf or support.min() - reach < xs[0] or support.max() + reach > xs[-1]:
        msg = "support cone leaves the x grid; the convolution is truncated"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)


# --- weak velocities ---------------------------------------------------------


def bump(r):
    """Smooth bump ``exp(1 - 1/(1 - r**4))`` on ``|r| < 1`` with value 1 at 0."""
    r = np.asarray(r, dtype=float)
    inside = np.abs(r) < 1.0
    r4 = np.where(inside, r ** 4, 0.0)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - r4)), 0.0)


def _lambda_edges(model: Model, lo: float, hi: float):
    """Breakpoints on [lo, hi], refined geometrically towards the front speed."""
    c = model.c
    pts = {lo, hi}
    if c != math.inf:
        for j in range(1, 21):
            p = c * (1.0 - 2.0 ** (-j))
            if lo < p < hi:
                pts.add(p)
    return sorted(pts)


def _rescaled(model: Model, t: float, lam):
    v, _, _ = kernel_values(model, lam * t, np.full(len(lam), t))
    return t * v


def weak_velocity_probe(model: Model, t: float, probe_center: float, probe_width: float,
                        rel_tol: float = 1e-6) -> float:
    """``int t K(lambda t, t) phi(lambda) d lambda`` for a bump ``phi`` on ``lambda > 0``.

    The integral stops at the cone margin ``(1 - MARGIN) c``.
    """
    _check_admissible(model)
    if model.exceptional:
        raise ExceptionalModel("weak velocity probes need a non-exceptional model")
    lo = max(probe_center - probe_width, 0.0)
    hi = probe_center + probe_width
    if model.c != math.inf:
        hi = min(hi, (1.0 - MARGIN) * model.c)
    if hi <= lo:
        return 0.0

    def f(lam):
        return _rescaled(model, t, lam) * bump((lam - probe_center) / probe_width)

    return float(integrate(f, _lambda_edges(model, lo, hi), rel_tol=rel_tol, abs_tol=1e-12, limit=600).value)


def velocity_centroid(model: Model, t: float, lam_max: float | None = None, rel_tol: float = 1e-6):
    """Centroid and mass of ``lambda -> t K(lambda t, t)`` over ``0 < lambda < c``.

    ``lam_max`` bounds the range when the front speed is infinite.  The
    integrals stop at the cone margin ``(1 - MARGIN) c``.
    """
    _check_admissible(model)
    if model.exceptional:
        raise ExceptionalModel("weak velocity probes need a non-exceptional model")
    hi = (1.0 - MARGIN) * model.c if model.c != math.inf else lam_max
    if hi is None:
        raise ValueError("lam_max is needed when the front speed is infinite")
    lo = 1e-9 * hi

    def f(lam):
        k = _rescaled(model, t, lam)
        return np.stack([k, lam * k], axis=1)

    res = integrate(f, _lambda_edges(model, lo, hi), rel_tol=rel_tol, abs_tol=1e-12, limit=800)
    mass, first = res.value
    return float(first / mass), float(mass)
