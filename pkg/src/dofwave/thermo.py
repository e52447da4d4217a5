"""Thermodynamic admissibility, storage/loss moduli and model classification.

The restriction asks that the signed product measure

    nu(A x B) = mu_eps(A) mu_sigma(B) - mu_sigma(A) mu_eps(B)

be non-negative on the half ``{alpha > beta}``.  For a finite family of
disjoint cells ordered left to right, non-negativity on every pair of cells
is the same as the extended ratio ``mu_sigma(cell) / mu_eps(cell)`` (with
``a/0 = inf`` and empty cells skipped) being non-increasing.  That turns every
check below into one linear scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import Exponential, Measure, cell_masses, interval_mass, support_bounds
from .symbol import SymbolPair, phi_values

REL_TOL = 1e-12
DYADIC_LEVELS = 12
DENSITY_SAMPLES = 10_000

EXACT_ATOMS = "ExactAtoms"
EXACT_DENSITY = "ExactDensityRatio"
SAMPLED = "SampledRectangles"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def mass(self, mu: Measure) -> float:
        return interval_mass(mu, self.lo, self.hi, self.lo_closed, self.hi_closed)

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


@dataclass(frozen=True)
class Rectangle:
    """``alpha``-interval times ``beta``-interval, with alpha lying to the right."""

    alpha: Interval
    beta: Interval

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "beta": self.beta.to_json()}


def nu_rectangle(pair: SymbolPair, rect: Rectangle) -> float:
    s, e = pair.mu_sigma, pair.mu_eps
    return rect.alpha.mass(e) * rect.beta.mass(s) - rect.alpha.mass(s) * rect.beta.mass(e)


@dataclass(frozen=True)
class RestrictionReport:
    satisfied: bool
    mode: str
    witness: Rectangle | None = None
    witness_nu: float | None = None
    rectangles_checked: int = 0

    def to_json(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "mode": self.mode,
            "witness": None if self.witness is None else self.witness.to_json(),
            "witness_nu": self.witness_nu,
            "rectangles_checked": self.rectangles_checked,
        }


def _first_ratio_increase(s: np.ndarray, e: np.ndarray, rel_tol: float = REL_TOL):
    """Scan cell masses left to right for an increase of the extended ratio s/e.

    Returns ``(left, right)`` indices of a violating pair or ``None``.  The
    right cell is compared against the smallest ratio seen so far.
    """
    best = -1
    for j in range(len(s)):
        if s[j] == 0 and e[j] == 0:
            continue
        if best >= 0:
            # ratio_j > ratio_best  <=>  s_j e_best > s_best e_j
            lhs = s[j] * e[best]
            rhs = s[best] * e[j]
            if lhs - rhs > rel_tol * (lhs + rhs):
                return best, j
            if lhs < rhs:
                best = j
        else:
            best = j
    return None


def _check_atoms(pair: SymbolPair) -> RestrictionReport:
    pts = sorted({a.alpha for a in pair.mu_sigma.atoms} | {a.alpha for a in pair.mu_eps.atoms})
    sw = {a.alpha: a.weight for a in pair.mu_sigma.atoms}
    ew = {a.alpha: a.weight for a in pair.mu_eps.atoms}
    worst, worst_val, count = None, 0.0, 0
    for i, al in enumerate(pts):
        for be in pts[:i]:
            count += 1
            p = ew.get(al, 0.0) * sw.get(be, 0.0)
            q = sw.get(al, 0.0) * ew.get(be, 0.0)
            if p - q < -REL_TOL * (p + q) and p - q < worst_val:
                worst, worst_val = (al, be), p - q
    if worst is None:
        return RestrictionReport(True, EXACT_ATOMS, rectangles_checked=count)
    rect = Rectangle(Interval(worst[0], worst[0]), Interval(worst[1], worst[1]))
    return RestrictionReport(False, EXACT_ATOMS, rect, nu_rectangle(pair, rect), count)


def _witness_around(pair: SymbolPair, left: float, right: float, gap: float):
    """Shrink small intervals around two sample points until nu < 0 is confirmed."""
    h = 0.5 * gap
    for _ in range(30):
        a = Interval(max(right - h, 0.0), min(right + h, 1.0))
        b = Interval(max(left - h, 0.0), min(left + h, 1.0))
        if b.hi < a.lo:
            rect = Rectangle(a, b)
            val = nu_rectangle(pair, rect)
            if val < 0:
                return rect, val
        h *= 0.5
    return None, None


def _check_densities(pair: SymbolPair) -> RestrictionReport:
    ds, de = pair.mu_sigma.densities, pair.mu_eps.densities
    if len(ds) == 1 and len(de) == 1 and isinstance(ds[0], Exponential) and isinstance(de[0], Exponential):
        # scale_s a^alpha / (scale_e b^alpha) is non-increasing iff a <= b
        ok = ds[0].base <= de[0].base
        if ok:
            return RestrictionReport(True, EXACT_DENSITY, rectangles_checked=0)
        rect = Rectangle(Interval(0.5, 1.0), Interval(0.0, 0.5, hi_closed=False))
        return RestrictionReport(False, EXACT_DENSITY, rect, nu_rectangle(pair, rect), 1)

    knots = {0.0, 1.0}
    for d in ds + de:
        knots.update(d.support())
        if hasattr(d, "breakpoints"):
            knots.update(d.breakpoints)
    grid = np.union1d(np.linspace(0.0, 1.0, DENSITY_SAMPLES + 1), sorted(knots))
    mid = 0.5 * (grid[:-1] + grid[1:])
    f = pair.mu_sigma.density(mid)
    g = pair.mu_eps.density(mid)
    found = _first_ratio_increase(f, g, rel_tol=1e-9)
    if found is None:
        return RestrictionReport(True, EXACT_DENSITY, rectangles_checked=len(mid) - 1)
    i, j = found
    gap = float(np.min(np.diff(grid)))
    rect, val = _witness_around(pair, float(mid[i]), float(mid[j]), gap)
    if rect is None:
        # the sampled increase could not be confirmed on a rectangle
        return RestrictionReport(True, EXACT_DENSITY, rectangles_checked=len(mid) - 1)
    return RestrictionReport(False, EXACT_DENSITY, rect, val, len(mid) - 1)


def _check_dyadic(pair: SymbolPair, levels: int = DYADIC_LEVELS) -> RestrictionReport:
    checked = 0
    for level in range(1, levels + 1):
        n = 2 ** level
        edges = np.linspace(0.0, 1.0, n + 1)
        s = cell_masses(pair.mu_sigma, edges)
        e = cell_masses(pair.mu_eps, edges)
        nonempty = int(np.count_nonzero((s > 0) | (e > 0)))
        checked += nonempty * (nonempty - 1) // 2
        found = _first_ratio_increase(s, e)
        if found is not None:
            i, j = found
            rect = Rectangle(
                Interval(float(edges[j]), float(edges[j + 1]), True, j == n - 1),
                Interval(float(edges[i]), float(edges[i + 1]), True, i == n - 1),
            )
            return RestrictionReport(False, SAMPLED, rect, nu_rectangle(pair, rect), checked)
    return RestrictionReport(True, SAMPLED, rectangles_checked=checked)


def check_restriction(pair: SymbolPair, mode: str | None = None) -> RestrictionReport:
    """Decide (or, for mixtures, test) non-negativity of ``nu`` above the diagonal.

    ``mode`` forces a strategy; by default it follows the measure types.
    """
    atomic = pair.mu_sigma.is_atomic and pair.mu_eps.is_atomic
    diffuse = not pair.mu_sigma.atoms and not pair.mu_eps.atoms
    if mode is None:
        mode = EXACT_ATOMS if atomic else EXACT_DENSITY if diffuse else SAMPLED
    if mode == EXACT_ATOMS:
        if not atomic:
            raise ValueError("exact atom check needs purely atomic measures")
        return _check_atoms(pair)
    if mode == EXACT_DENSITY:
        if not diffuse:
            raise ValueError("density ratio check needs purely continuous measures")
        return _check_densities(pair)
    if mode == SAMPLED:
        return _check_dyadic(pair)
    raise ValueError(f"unknown mode {mode!r}")


# --- moduli ------------------------------------------------------------------


@dataclass(frozen=True)
class Moduli:
    omega: float
    storage: float
    loss: float


def complex_modulus(pair: SymbolPair, omega) -> np.ndarray:
    """``E(omega) = Phi_eps(i omega) / Phi_sigma(i omega)``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    half = np.full(omega.shape, 0.5 * math.pi)
    return phi_values(pair.mu_eps, omega, half) / phi_values(pair.mu_sigma, omega, half)


def moduli(pair: SymbolPair, omega: float) -> Moduli:
    E = complex(complex_modulus(pair, np.array([omega]))[0])
    return Moduli(float(omega), E.real, E.imag)


# --- classification ----------------------------------------------------------

PROPER = "ProperFractional"
HOOKE = "Hooke"
NEWTON = "Newton"
VOIGT = "Voigt"
MAXWELL = "Maxwell"
ZENER = "Zener"


@dataclass(frozen=True)
class ExceptionalParams:
    a: float
    b: float
    tau: float
    lam: Measure


@dataclass(frozen=True)
class ModelClass:
    tag: str
    exceptional: bool
    exceptional_params: ExceptionalParams | None = None
    admissible: bool = True

    @property
    def classical(self) -> bool:
        return self.tag != PROPER

    def to_json(self) -> dict:
        out = {"tag": self.tag, "exceptional": self.exceptional, "admissible": self.admissible}
        if self.exceptional_params is not None:
            p = self.exceptional_params
            out["exceptional_params"] = {"a": p.a, "b": p.b, "tau": p.tau, "lambda": p.lam.to_json()}
        return out


def _strip_zero(mu: Measure) -> tuple[float, Measure | None]:
    w0 = sum((a.weight for a in mu.atoms if a.alpha == 0.0), 0.0)
    rest = tuple(a for a in mu.atoms if a.alpha != 0.0)
    if not rest and not mu.densities:
        return w0, None
    return w0, Measure(rest, mu.densities)


def proportional(mu: Measure, nu: Measure, rel_tol: float = REL_TOL) -> float | None:
    """Return ``c`` with ``mu = c * nu`` (to ``rel_tol``), else ``None``."""
    from .measures import total_mass

    c = total_mass(mu) / total_mass(nu)
    am = {a.alpha: a.weight for a in mu.atoms}
    an = {a.alpha: a.weight for a in nu.atoms}
    if set(am) != set(an):
        return None
    for k in am:
        if abs(am[k] - c * an[k]) > rel_tol * am[k]:
            return None
    if mu.densities or nu.densities:
        knots = {0.0, 1.0}
        for d in mu.densities + nu.densities:
            knots.update(d.support())
        grid = np.union1d(np.linspace(0.0, 1.0, 1025), sorted(knots))
        pts = np.concatenate([grid, 0.5 * (grid[:-1] + grid[1:])])
        f, g = mu.density(pts), nu.density(pts)
        finite = np.isfinite(f) & np.isfinite(g)
        scale = max(float(np.max(np.abs(f[finite]), initial=0.0)), 1e-300)
        # densities are continuous away from knots, so sampling is adequate here
        if np.any(np.abs(f[finite] - c * g[finite]) > 1e-10 * scale):
            return None
    return c


def exceptional_decomposition(pair: SymbolPair) -> ExceptionalParams | None:
    """Match ``mu_sigma = a delta + tau lam``, ``mu_eps = b delta + lam``.

    Proportional pairs (``mu_sigma = tau mu_eps``) are reported too.
    """
    c = proportional(pair.mu_sigma, pair.mu_eps)
    if c is not None:
        return ExceptionalParams(0.0, 0.0, c, pair.mu_eps)
    a, s_rest = _strip_zero(pair.mu_sigma)
    b, e_rest = _strip_zero(pair.mu_eps)
    if s_rest is None or e_rest is None or a <= 0:
        return None
    if support_bounds(e_rest)[1] != 1.0:
        return None
    tau = proportional(s_rest, e_rest)
    if tau is None or tau <= 0:
        return None
    if b > 0 and a / b < tau * (1.0 - REL_TOL):
        return None
    return ExceptionalParams(a, b, tau, e_rest)


def _weights01(mu: Measure) -> tuple[float, float]:
    w = {a.alpha: a.weight for a in mu.atoms}
    return w.get(0.0, 0.0), w.get(1.0, 0.0)


def is_classical(pair: SymbolPair) -> bool:
    for mu in (pair.mu_sigma, pair.mu_eps):
        if mu.densities or any(a.alpha not in (0.0, 1.0) for a in mu.atoms):
            return False
    return True


def classify(pair: SymbolPair, report: RestrictionReport | None = None) -> ModelClass:
    if report is None:
        report = check_restriction(pair)
    params = exceptional_decomposition(pair)
    exceptional = params is not None
    if not is_classical(pair):
        return ModelClass(PROPER, exceptional, params, report.satisfied)
    a0, a1 = _weights01(pair.mu_sigma)
    b0, b1 = _weights01(pair.mu_eps)
    if proportional(pair.mu_sigma, pair.mu_eps) is not None:
        tag = HOOKE
    elif a1 == 0 and b0 == 0:
        tag = NEWTON
    elif a1 == 0:
        tag = VOIGT
    elif b0 == 0:
        tag = MAXWELL
    else:
        tag = ZENER
    return ModelClass(tag, exceptional, params, report.satisfied)


def classical_weights(pair: SymbolPair) -> tuple[float, float, float, float]:
    """``(a0, a1, b0, b1)`` for a model supported on {0, 1}."""
    a0, a1 = _weights01(pair.mu_sigma)
    b0, b1 = _weights01(pair.mu_eps)
    return a0, a1, b0, b1


__all__ = [
    "Interval", "Rectangle", "RestrictionReport", "Moduli", "ModelClass", "ExceptionalParams",
    "check_restriction", "nu_rectangle", "moduli", "complex_modulus", "classify", "exceptional_decomposition",
    "classical_weights", "is_classical", "proportional",
]
