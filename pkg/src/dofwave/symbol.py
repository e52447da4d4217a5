"""The symbols Phi(s) = int s**alpha dmu(alpha) and Psi(s) = sqrt(Phi_sigma / Phi_eps).

Points of the slit plane are carried in polar form ``(R, theta)`` with
``theta`` in ``[-pi, pi]`` so the two sides of the negative real axis stay
distinct.  Powers are taken as ``s**alpha = exp(alpha * (log R + i theta))``.
Array versions (``phi_values``/``psi_values``) broadcast over ``R`` and
``theta`` and are what the kernel routines use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gamma

from .errors import DivisionByZero, MeasureError
from .measures import Exponential, Measure, Power, Table, support_bounds, total_mass
from .quadrature import integrate

PHI_REL_TOL = 1e-10
PHI_LIMIT = 2000


@dataclass(frozen=True)
class PolarComplex:
    R: float
    theta: float

    def __post_init__(self):
        if not (self.R > 0) or not math.isfinite(self.R):
            raise ValueError(f"modulus must be positive and finite, got {self.R!r}")
        if not (-math.pi <= self.theta <= math.pi):
            raise ValueError(f"argument {self.theta!r} outside [-pi, pi]")

    @classmethod
    def from_complex(cls, z: complex) -> "PolarComplex":
        return cls(abs(z), math.atan2(z.imag, z.real))

    @property
    def log(self) -> complex:
        return complex(math.log(self.R), self.theta)

    def to_complex(self) -> complex:
        return self.R * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class SymbolPair:
    mu_sigma: Measure
    mu_eps: Measure

    def __post_init__(self):
        for mu in (self.mu_sigma, self.mu_eps):
            if not isinstance(mu, Measure):
                raise MeasureError("symbol pair needs two Measure objects")

    def reflected(self) -> "SymbolPair":
        """Pair ``(mu_eps(1 - .), mu_sigma(1 - .))`` whose tau-limit is 1/rho."""
        from .measures import reflect

        return SymbolPair(reflect(self.mu_eps), reflect(self.mu_sigma))


# --- Phi ---------------------------------------------------------------------


def _exp_density(d: Exponential, L: np.ndarray) -> np.ndarray:
    w = L + math.log(d.base)
    small = np.abs(w) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.expm1(w) / np.where(small, 1.0, w)
    series = 1.0 + w / 2.0 + w * w / 6.0 + w ** 3 / 24.0
    return d.scale * np.where(small, series, direct)


def _power_density(d: Power, L: np.ndarray) -> np.ndarray:
    # alpha = anchor -/+ v with v in (0, end); weight scale * v**kappa
    sign = 1.0 if d.reflected else -1.0
    p = d.kappa + 1.0
    anchor = d.anchor
    flat = L.ravel()
    if d.kappa < 0:
        # w = v**p removes the endpoint singularity: v**kappa dv = dw / p
        upper = d.end ** p

        def f(w):
            v = w ** (1.0 / p)
            return np.exp(np.outer(anchor + sign * v, flat)) / p
    else:
        upper = d.end

        def f(v):
            return (v ** d.kappa)[:, None] * np.exp(np.outer(anchor + sign * v, flat))

    res = integrate(f, [0.0, upper], rel_tol=PHI_REL_TOL, limit=PHI_LIMIT)
    return d.scale * np.asarray(res.value).reshape(L.shape)


def _table_density(d: Table, L: np.ndarray) -> np.ndarray:
    flat = L.ravel()

    def f(a):
        return d(a)[:, None] * np.exp(np.outer(a, flat))

    res = integrate(f, list(d.breakpoints), rel_tol=PHI_REL_TOL, limit=PHI_LIMIT)
    return np.asarray(res.value).reshape(L.shape)


def phi_log(mu: Measure, L) -> np.ndarray:
    """Phi as a function of ``L = log s`` (any complex array)."""
    L = np.asarray(L, dtype=complex)
    out = np.zeros(L.shape, dtype=complex)
    for atom in mu.atoms:
        out += atom.weight * np.exp(atom.alpha * L)
    for d in mu.densities:
        if isinstance(d, Exponential):
            out += _exp_density(d, L)
        elif isinstance(d, Power):
            out += _power_density(d, L)
        else:
            out += _table_density(d, L)
    return out


def phi_values(mu: Measure, R, theta) -> np.ndarray:
    """Vectorised ``Phi(R e^{i theta})``; inputs broadcast."""
    R = np.asarray(R, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(R <= 0):
        raise ValueError("modulus must be positive")
    return phi_log(mu, np.log(R) + 1j * theta)


def phi_eval(mu: Measure, s: PolarComplex) -> complex:
    if s.R <= 0:
        raise ValueError("modulus must be positive")
    return complex(phi_log(mu, np.array([s.log]))[0])


class BoundsCheck(NamedTuple):
    lower: float
    value: float
    upper: float
    ok: bool


def phi_bounds_check(mu: Measure, s: PolarComplex, slack: float = 1e-12) -> BoundsCheck:
    """Two-sided modulus bounds ``cos(|theta|/2) min(1,R) m <= |Phi| <= max(1,R) m``."""
    if abs(s.theta) >= math.pi:
        raise ValueError("bounds need |theta| < pi")
    m = total_mass(mu)
    lower = math.cos(abs(s.theta) / 2.0) * min(1.0, s.R) * m
    upper = max(1.0, s.R) * m
    value = abs(phi_eval(mu, s))
    ok = lower * (1.0 - slack) <= value <= upper * (1.0 + slack)
    return BoundsCheck(lower, value, upper, ok)


# --- large-|s| behaviour -------------------------------------------------------


@dataclass(frozen=True)
class Asymptotic:
    """Leading behaviour of Phi as |s| -> infinity.

    ``kind`` is one of ``AtomLead``, ``PowerLead``, ``ExpLead`` or
    ``GenericSubpolynomial``; ``kappa`` is set for ``PowerLead``.
    """

    M: float
    atom_mass: float
    kind: str
    kappa: float | None = None
    coefficient: float | None = None

    def leading(self, L):
        """Leading term as a function of ``L = log s``; ``None`` if unknown."""
        L = np.asarray(L, dtype=complex)
        if self.kind == "AtomLead":
            return self.atom_mass * np.exp(self.M * L)
        if self.kind == "PowerLead":
            return self.coefficient * gamma(self.kappa + 1.0) * np.exp(self.M * L) / L ** (self.kappa + 1.0)
        if self.kind == "ExpLead":
            return self.coefficient * np.exp(L) / L
        return None


def phi_asymptotic(mu: Measure) -> Asymptotic:
    _, M = support_bounds(mu)
    w = 0.0
    for a in mu.atoms:
        if a.alpha == M:
            w = a.weight
    if w > 0:
        return Asymptotic(M, w, "AtomLead")
    # Densities reaching M, with the effective power of their vanishing there.
    leads = []
    for d in mu.densities:
        if d.support()[1] != M:
            continue
        if isinstance(d, Exponential):
            leads.append((0.0, "ExpLead", d.scale * d.base))
        elif isinstance(d, Power) and not d.reflected:
            leads.append((d.kappa, "PowerLead", d.scale))
        else:
            leads.append((None, "GenericSubpolynomial", None))
    if any(k is None for k, _, _ in leads):
        return Asymptotic(M, 0.0, "GenericSubpolynomial")
    kmin = min(k for k, _, _ in leads)
    top = [lead for lead in leads if lead[0] == kmin]
    if len(top) == 1:
        kappa, kind, coef = top[0]
        if kind == "ExpLead":
            return Asymptotic(M, 0.0, "ExpLead", coefficient=coef)
        return Asymptotic(M, 0.0, "PowerLead", kappa=kappa, coefficient=coef)
    # Ties of the same order add up; an exponential behaves like kappa = 0.
    return Asymptotic(M, 0.0, "PowerLead", kappa=kmin, coefficient=sum(c for _, _, c in top))


# --- Psi ---------------------------------------------------------------------


def psi_from_ratio(ratio: np.ndarray, theta) -> np.ndarray:
    """Principal square root, flipped on the cut so that sgn Im Psi = -sgn theta."""
    psi = np.sqrt(np.asarray(ratio, dtype=complex))
    theta = np.broadcast_to(np.asarray(theta, dtype=float), psi.shape)
    on_cut = np.abs(theta) >= math.pi
    wrong = on_cut & (psi.imag * np.sign(theta) > 0)
    return np.where(wrong, np.conj(psi), psi)


def psi_values(pair: SymbolPair, R, theta) -> np.ndarray:
    R, theta = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(theta, dtype=float))
    ps = phi_values(pair.mu_sigma, R, theta)
    pe = phi_values(pair.mu_eps, R, theta)
    if np.any(np.abs(pe) < 1e-300):
        raise DivisionByZero("Phi_eps vanishes at a requested point")
    return psi_from_ratio(ps / pe, theta)


def psi_eval(pair: SymbolPair, s: PolarComplex) -> complex:
    return complex(psi_values(pair, np.array([s.R]), np.array([s.theta]))[0])


def psi_log(pair: SymbolPair, L) -> np.ndarray:
    """Psi as a function of complex ``L = log R + i theta``."""
    L = np.asarray(L, dtype=complex)
    ps = phi_log(pair.mu_sigma, L)
    pe = phi_log(pair.mu_eps, L)
    if np.any(np.abs(pe) < 1e-300):
        raise DivisionByZero("Phi_eps vanishes at a requested point")
    return psi_from_ratio(ps / pe, L.imag)
