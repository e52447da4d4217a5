"""Positive Radon measures on [0, 1]: finitely many atoms plus parametric densities.

A :class:`Measure` is immutable.  Atoms sharing an order are merged at
construction, zero-weight atoms are dropped and the zero measure is rejected.
Three density families are supported:

* :class:`Exponential` -- ``scale * base**alpha`` on ``[0, 1]``;
* :class:`Power` -- ``scale * (end - alpha)**kappa`` on ``[0, end]``
  (``reflected=True`` mirrors it to ``scale * (alpha - (1 - end))**kappa`` on
  ``[1 - end, 1]``, which is what reflection ``alpha -> 1 - alpha`` produces);
* :class:`Table` -- piecewise-linear interpolation of non-negative samples.

Masses of atoms and of the first two families are closed-form; tables are
integrated with Gauss-Legendre per breakpoint cell (exact for linear pieces).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .errors import MeasureError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


def _pow_diff(big, small, p):
    """``big**p - small**p`` for ``big >= small >= 0`` without cancellation."""
    big = np.asarray(big, dtype=float)
    small = np.asarray(small, dtype=float)
    out = np.empty(np.broadcast(big, small).shape)
    big, small = np.broadcast_arrays(big, small)
    pos = small > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(pos, (big - small) / np.where(pos, small, 1.0), 0.0)
        out[pos] = small[pos] ** p * np.expm1(p * np.log1p(rel[pos]))
    out[~pos] = big[~pos] ** p
    return out


@dataclass(frozen=True)
class Atom:
    alpha: float
    weight: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0) or not math.isfinite(self.alpha):
            raise MeasureError(f"atom order {self.alpha!r} outside [0, 1]")
        if not (self.weight >= 0.0) or not math.isfinite(self.weight):
            raise MeasureError(f"atom weight {self.weight!r} must be finite and non-negative")


@dataclass(frozen=True)
class Exponential:
    base: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.base > 0 and math.isfinite(self.base)):
            raise MeasureError("exponential base must be positive")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise MeasureError("exponential scale must be positive")

    def support(self) -> tuple[float, float]:
        return 0.0, 1.0

    def __call__(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        inside = (alpha >= 0) & (alpha <= 1)
        return np.where(inside, self.scale * self.base ** np.clip(alpha, 0, 1), 0.0)

    def mass(self, lo, hi):
        lo = np.clip(np.asarray(lo, dtype=float), 0.0, 1.0)
        hi = np.clip(np.asarray(hi, dtype=float), 0.0, 1.0)
        width = np.maximum(hi - lo, 0.0)
        lb = math.log(self.base)
        if lb == 0.0:
            return self.scale * width
        return self.scale * self.base ** lo * np.expm1(width * lb) / lb

    def reflect(self) -> "Exponential":
        # scale * b**(1 - a) = (scale * b) * (1/b)**a
        return Exponential(1.0 / self.base, self.scale * self.base)

    def to_json(self) -> dict:
        return {"kind": "exponential", "base": self.base, "scale": self.scale}


@dataclass(frozen=True)
class Power:
    end: float
    kappa: float
    scale: float = 1.0
    reflected: bool = False

    def __post_init__(self):
        if not (0.0 < self.end <= 1.0):
            raise MeasureError("power density end must lie in (0, 1]")
        if not (self.kappa > -1.0 and math.isfinite(self.kappa)):
            raise MeasureError("power density exponent kappa must exceed -1")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise MeasureError("power density scale must be positive")

    @property
    def anchor(self) -> float:
        """The singular (or vanishing) end point of the density."""
        return 1.0 - self.end if self.reflected else self.end

    def support(self) -> tuple[float, float]:
        return (1.0 - self.end, 1.0) if self.reflected else (0.0, self.end)

    def distance(self, alpha):
        """Distance from the anchor, measured into the support."""
        alpha = np.asarray(alpha, dtype=float)
        return alpha - self.anchor if self.reflected else self.anchor - alpha

    def __call__(self, alpha):
        v = self.distance(alpha)
        lo, hi = self.support()
        alpha = np.asarray(alpha, dtype=float)
        inside = (alpha >= lo) & (alpha <= hi) & (v > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(inside, self.scale * np.where(inside, v, 1.0) ** self.kappa, 0.0)

    def mass(self, lo, hi):
        s_lo, s_hi = self.support()
        lo = np.clip(np.asarray(lo, dtype=float), s_lo, s_hi)
        hi = np.clip(np.asarray(hi, dtype=float), s_lo, s_hi)
        hi = np.maximum(hi, lo)
        p = self.kappa + 1.0
        if self.reflected:
            far, near = hi - self.anchor, lo - self.anchor
        else:
            far, near = self.anchor - lo, self.anchor - hi
        far = np.maximum(far, 0.0)
        near = np.clip(near, 0.0, far)
        return self.scale * _pow_diff(far, near, p) / p

    def reflect(self) -> "Power":
        return Power(self.end, self.kappa, self.scale, not self.reflected)

    def to_json(self) -> dict:
        out = {"kind": "power", "end": self.end, "kappa": self.kappa, "scale": self.scale}
        if self.reflected:
            out["reflected"] = True
        return out


@dataclass(frozen=True)
class Table:
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(bp) < 2 or len(bp) != len(vals):
            raise MeasureError("table needs at least two breakpoints and one value per breakpoint")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise MeasureError("table breakpoints must be strictly ascending")
        if bp[0] < 0.0 or bp[-1] > 1.0:
            raise MeasureError("table breakpoints must lie in [0, 1]")
        if any(not (v >= 0.0) or not math.isfinite(v) for v in vals):
            raise MeasureError("table values must be finite and non-negative")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def is_zero(self) -> bool:
        return not any(self.values)

    def support(self) -> tuple[float, float]:
        bp, v = self.breakpoints, self.values
        pos = [i for i, x in enumerate(v) if x > 0]
        if not pos:
            raise MeasureError("zero table has empty support")
        j, k = pos[0], pos[-1]
        lo = bp[j - 1] if j > 0 else bp[0]
        hi = bp[k + 1] if k < len(bp) - 1 else bp[-1]
        return lo, hi

    def __call__(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        return np.interp(alpha, self.breakpoints, self.values, left=0.0, right=0.0)

    def mass(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        total = np.zeros(np.broadcast(lo, hi).shape)
        bp = self.breakpoints
        for p, q in zip(bp, bp[1:]):
            a = np.maximum(lo, p)
            b = np.minimum(hi, q)
            w = np.maximum(b - a, 0.0)
            mid = 0.5 * (a + b)
            nodes = mid[..., None] + 0.5 * w[..., None] * _GL_X
            total = total + 0.5 * w * (self(nodes) @ _GL_W)
        return total

    def reflect(self) -> "Table":
        return Table(tuple(1.0 - b for b in reversed(self.breakpoints)), tuple(reversed(self.values)))

    def to_json(self) -> dict:
        return {"kind": "table", "breakpoints": list(self.breakpoints), "values": list(self.values)}


Density = Union[Exponential, Power, Table]


@dataclass(frozen=True)
class Measure:
    """Finite positive measure on [0, 1]; atoms are sorted by order and distinct."""

    atoms: tuple[Atom, ...] = ()
    densities: tuple[Density, ...] = field(default=())

    def __post_init__(self):
        merged: dict[float, float] = {}
        for atom in self.atoms:
            if not isinstance(atom, Atom):
                atom = Atom(*atom)
            if atom.weight > 0:
                merged[atom.alpha] = merged.get(atom.alpha, 0.0) + atom.weight
        atoms = tuple(Atom(a, w) for a, w in sorted(merged.items()))
        dens = []
        for d in self.densities:
            if not isinstance(d, (Exponential, Power, Table)):
                raise MeasureError(f"unsupported density {d!r}")
            if isinstance(d, Table) and d.is_zero():
                continue
            dens.append(d)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "densities", tuple(dens))
        if not atoms and not dens:
            raise MeasureError("the zero measure is not allowed")

    @classmethod
    def point(cls, alpha: float, weight: float = 1.0) -> "Measure":
        return cls(atoms=(Atom(alpha, weight),))

    @classmethod
    def from_atoms(cls, pairs) -> "Measure":
        """Build from an iterable of ``(alpha, weight)`` or a mapping ``alpha -> weight``."""
        if isinstance(pairs, dict):
            pairs = pairs.items()
        return cls(atoms=tuple(Atom(float(a), float(w)) for a, w in pairs))

    @property
    def alphas(self) -> np.ndarray:
        return np.array([a.alpha for a in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms])

    @property
    def is_atomic(self) -> bool:
        return not self.densities

    def density(self, alpha) -> np.ndarray:
        """Sum of the absolutely continuous parts evaluated at ``alpha``."""
        alpha = np.asarray(alpha, dtype=float)
        out = np.zeros(alpha.shape)
        for d in self.densities:
            out = out + d(alpha)
        return out

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.atoms + other.atoms, self.densities + other.densities)

    def scaled(self, factor: float) -> "Measure":
        if factor <= 0:
            raise MeasureError("scale factor must be positive")
        dens = []
        for d in self.densities:
            if isinstance(d, Exponential):
                dens.append(Exponential(d.base, d.scale * factor))
            elif isinstance(d, Power):
                dens.append(Power(d.end, d.kappa, d.scale * factor, d.reflected))
            else:
                dens.append(Table(d.breakpoints, tuple(v * factor for v in d.values)))
        return Measure(tuple(Atom(a.alpha, a.weight * factor) for a in self.atoms), tuple(dens))

    def to_json(self) -> dict:
        return {
            "atoms": [{"alpha": a.alpha, "weight": a.weight} for a in self.atoms],
            "densities": [d.to_json() for d in self.densities],
        }


def measure_from_json(obj: Any) -> Measure:
    """Parse the JSON measure object used by the command line tool."""
    if not isinstance(obj, dict):
        raise MeasureError("measure must be a JSON object")
    unknown = set(obj) - {"atoms", "densities"}
    if unknown:
        raise MeasureError(f"unknown measure keys: {sorted(unknown)}")
    try:
        atoms = tuple(Atom(float(a["alpha"]), float(a["weight"])) for a in obj.get("atoms", []))
        dens: list[Density] = []
        for d in obj.get("densities", []):
            kind = d.get("kind")
            if kind == "exponential":
                dens.append(Exponential(float(d["base"]), float(d.get("scale", 1.0))))
            elif kind == "power":
                dens.append(Power(float(d["end"]), float(d["kappa"]), float(d.get("scale", 1.0)),
                                  bool(d.get("reflected", False))))
            elif kind == "table":
                dens.append(Table(tuple(d["breakpoints"]), tuple(d["values"])))
            else:
                raise MeasureError(f"unknown density kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MeasureError):
            raise
        raise MeasureError(f"malformed measure: {exc}") from exc
    return Measure(atoms, tuple(dens))


def total_mass(mu: Measure) -> float:
    """``mu([0, 1])``."""
    return float(sum(a.weight for a in mu.atoms) + sum(float(d.mass(0.0, 1.0)) for d in mu.densities))


def interval_mass(mu: Measure, lo: float, hi: float, lo_closed: bool = True, hi_closed: bool = True) -> float:
    """Mass of an interval with the given end-point inclusion.

    End-point flags only matter for atoms; densities do not charge points.
    """
    if lo > hi:
        raise ValueError(f"empty interval: lo={lo} > hi={hi}")
    if lo < 0.0 or hi > 1.0:
        raise ValueError("interval must lie in [0, 1]")
    m = 0.0
    for a in mu.atoms:
        above = a.alpha >= lo if lo_closed else a.alpha > lo
        below = a.alpha <= hi if hi_closed else a.alpha < hi
        if above and below:
            m += a.weight
    for d in mu.densities:
        m += float(d.mass(lo, hi))
    return m


def cell_masses(mu: Measure, edges: np.ndarray) -> np.ndarray:
    """Masses of the half-open cells ``[e_i, e_{i+1})``; the last cell is closed."""
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    out = np.zeros(len(lo))
    for d in mu.densities:
        out += d.mass(lo, hi)
    if mu.atoms:
        idx = np.searchsorted(edges, mu.alphas, side="right") - 1
        idx = np.clip(idx, 0, len(lo) - 1)
        inside = (mu.alphas >= edges[0]) & (mu.alphas <= edges[-1])
        np.add.at(out, idx[inside], mu.weights[inside])
    return out


def support_bounds(mu: Measure) -> tuple[float, float]:
    """``(min supp mu, max supp mu)``."""
    lows = [a.alpha for a in mu.atoms] + [d.support()[0] for d in mu.densities]
    highs = [a.alpha for a in mu.atoms] + [d.support()[1] for d in mu.densities]
    return float(min(lows)), float(max(highs))


def atom_weight_at(mu: Measure, point: float) -> float:
    """``mu({point})`` -- exact order match, no tolerance."""
    for a in mu.atoms:
        if a.alpha == point:
            return a.weight
    return 0.0


def reflect(mu: Measure) -> Measure:
    """Image of ``mu`` under ``alpha -> 1 - alpha``."""
    return Measure(tuple(Atom(1.0 - a.alpha, a.weight) for a in mu.atoms),
                   tuple(d.reflect() for d in mu.densities))
