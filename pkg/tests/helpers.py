"""Shared model builders and random generators for the test-suite."""

from __future__ import annotations

import math

import numpy as np

from dofwave.measures import Atom, Exponential, Measure, Power, Table
from dofwave.symbol import SymbolPair

A = Measure.from_atoms


def zener_fractional():
    """sigma = delta + 0.5 delta_0.5, eps = delta + delta_0.5."""
    return A({0.0: 1.0, 0.5: 0.5}), A({0.0: 1.0, 0.5: 1.0})


def exponential_pair(a=0.5, b=1.0):
    return Measure(densities=(Exponential(a),)), Measure(densities=(Exponential(b),))


def counterexample():
    """Atoms at 1/5, 3/5 against 2/5, 4/5: violates the restriction."""
    return A({0.2: 1.0, 0.6: 1.0}), A({0.4: 1.0, 0.8: 1.0})


def ratio_chain_ok(a, b) -> bool:
    """Independent oracle: a_i / b_i non-increasing along the grid, with a/0 = inf."""
    ratios = [math.inf if bi == 0 else ai / bi for ai, bi in zip(a, b) if ai > 0 or bi > 0]
    for r0, r1 in zip(ratios, ratios[1:]):
        if r1 == math.inf and r0 == math.inf:
            continue
        if r1 > r0 * (1 + 1e-12):
            return False
    return True


def random_admissible_atoms(rng: np.random.Generator, n: int | None = None, grid=None, top: float | None = None):
    """Admissible atom pair on a common grid with strictly decreasing ratios.

    ``top`` fixes the largest order, ``grid`` the whole grid.
    """
    if grid is None:
        n = n or int(rng.integers(2, 5))
        hi = top if top is not None else float(rng.uniform(0.3, 0.95))
        inner = np.sort(rng.uniform(0.05, hi - 0.05, n - 2)) if n > 2 else np.array([])
        grid = np.concatenate([[0.0], inner, [hi]])
    grid = np.asarray(grid, dtype=float)
    b = rng.uniform(0.2, 2.0, len(grid))
    ratios = np.sort(rng.uniform(0.1, 3.0, len(grid)))[::-1]
    a = ratios * b
    return A(zip(grid, a)), A(zip(grid, b))


def random_proper_model(rng: np.random.Generator):
    """Proper fractional, non-exceptional atom pair suited to kernel evaluation.

    Atoms at 0, an intermediate order and a top order below 1, with a top gap
    of 0.25 to 0.45 (decay exponent of Im Psi between -0.45 and -0.25).
    """
    top = float(rng.uniform(0.5, 0.9))
    gap = float(rng.uniform(0.25, 0.45))
    grid = [0.0, top - gap, top]
    b = rng.uniform(0.5, 1.5, 3)
    ratios = np.sort(rng.uniform(0.3, 2.0, 3))[::-1]
    ratios[-1] = min(ratios[-1], 0.9 * ratios[-2])
    return A(zip(grid, ratios * b)), A(zip(grid, b))


def random_measure(rng: np.random.Generator) -> Measure:
    """Atoms and/or one density of each family, with random parameters."""
    atoms = []
    dens = []
    kinds = rng.choice(["atoms", "exp", "power", "table", "mixed"])
    if kinds in ("atoms", "mixed"):
        for _ in range(int(rng.integers(1, 4))):
            atoms.append(Atom(float(rng.choice([0.0, 1.0, rng.uniform()])), float(rng.uniform(0.1, 2.0))))
    if kinds in ("exp", "mixed"):
        dens.append(Exponential(float(np.exp(rng.uniform(-3, 3))), float(rng.uniform(0.1, 2.0))))
    if kinds == "power":
        dens.append(Power(float(rng.uniform(0.2, 1.0)), float(rng.uniform(-0.8, 2.0)), float(rng.uniform(0.1, 2.0)),
                          bool(rng.integers(0, 2))))
    if kinds == "table":
        bp = np.linspace(0, 1, int(rng.integers(2, 6)))
        dens.append(Table(tuple(bp), tuple(rng.uniform(0.0, 2.0, len(bp)))))
    if not atoms and not dens:
        atoms.append(Atom(0.5, 1.0))
    try:
        return Measure(tuple(atoms), tuple(dens))
    except ValueError:
        return A({0.5: 1.0})


def random_admissible_pair(rng: np.random.Generator) -> SymbolPair:
    """Atom pairs or exponential pairs that satisfy the restriction."""
    if rng.uniform() < 0.25:
        a, b = np.sort(np.exp(rng.uniform(-3, 3, 2)))
        return SymbolPair(Measure(densities=(Exponential(float(a), float(rng.uniform(0.2, 2))),)),
                          Measure(densities=(Exponential(float(b), float(rng.uniform(0.2, 2))),)))
    s, e = random_admissible_atoms(rng, top=float(rng.choice([rng.uniform(0.3, 1.0), 1.0])))
    return SymbolPair(s, e)
