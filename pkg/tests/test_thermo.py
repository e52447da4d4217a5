from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dofwave.measures import Exponential, Measure, Power, Table
from dofwave.symbol import SymbolPair, phi_log
from dofwave.thermo import (EXACT_ATOMS, EXACT_DENSITY, HOOKE, MAXWELL, NEWTON, PROPER, SAMPLED, VOIGT, ZENER,
                            Interval, Rectangle, check_restriction, classify, complex_modulus, exceptional_decomposition,
                            moduli, nu_rectangle, proportional)

from helpers import A, counterexample, exponential_pair, random_admissible_atoms, zener_fractional


def test_zener_satisfied():
    rep = check_restriction(SymbolPair(*zener_fractional()))
    assert rep.satisfied and rep.mode == EXACT_ATOMS and rep.witness is None


def test_counterexample_witness():
    pair = SymbolPair(*counterexample())
    rep = check_restriction(pair)
    assert not rep.satisfied and rep.witness_nu < 0
    w = rep.witness
    assert w.alpha.lo > w.beta.hi
    assert nu_rectangle(pair, w) == rep.witness_nu
    assert w.alpha.lo == w.alpha.hi and w.beta.lo == w.beta.hi
    assert not check_restriction(pair, mode=SAMPLED).satisfied


def test_equal_measures_satisfied():
    mu = Measure((), (Exponential(2.0), Power(0.7, 0.5)))
    pair = SymbolPair(mu, mu)
    assert check_restriction(pair).satisfied
    rect = Rectangle(Interval(0.5, 1.0), Interval(0.0, 0.4))
    assert nu_rectangle(pair, rect) == pytest.approx(0.0, abs=1e-15)


def test_exponential_pairs():
    assert check_restriction(SymbolPair(*exponential_pair(0.5, 1.0))).satisfied
    rep = check_restriction(SymbolPair(*exponential_pair(2.0, 1.0)))
    assert rep.mode == EXACT_DENSITY and not rep.satisfied and rep.witness_nu < 0


def test_density_ratio_sampling():
    dec = SymbolPair(Measure(densities=(Power(1.0, 1.0),)), Measure(densities=(Exponential(1.0),)))
    assert check_restriction(dec).satisfied
    inc = SymbolPair(Measure(densities=(Exponential(1.0),)), Measure(densities=(Power(1.0, 1.0),)))
    rep = check_restriction(inc)
    assert not rep.satisfied and rep.witness_nu < 0


def test_mixed_uses_rectangles():
    s = Measure(A({0.0: 1.0}).atoms, (Exponential(0.5),))
    e = Measure(A({0.0: 1.0}).atoms, (Exponential(1.0),))
    rep = check_restriction(SymbolPair(s, e))
    assert rep.mode == SAMPLED and rep.satisfied and rep.rectangles_checked > 0
    rep = check_restriction(SymbolPair(e, s))
    assert rep.mode == SAMPLED and not rep.satisfied and rep.witness_nu < 0


def test_forced_modes_validate_input():
    with pytest.raises(ValueError):
        check_restriction(SymbolPair(*exponential_pair()), mode=EXACT_ATOMS)
    with pytest.raises(ValueError):
        check_restriction(SymbolPair(*zener_fractional()), mode="nope")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_nu_antisymmetry(seed, a, b, c, d):
    rng = np.random.default_rng(seed)
    s, e = random_admissible_atoms(rng)
    s = s + Measure(densities=(Exponential(float(rng.uniform(0.2, 3))),))
    pair = SymbolPair(s, e)
    A1, A2 = Interval(*sorted((a, b))), Interval(*sorted((c, d)))
    assert nu_rectangle(pair, Rectangle(A1, A2)) == pytest.approx(-nu_rectangle(pair, Rectangle(A2, A1)), abs=1e-12)


_ORDERS = st.integers(0, 64).map(lambda k: k / 64)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(_ORDERS, st.floats(0.01, 3)), min_size=1, max_size=4),
       st.lists(st.tuples(_ORDERS, st.floats(0.01, 3)), min_size=1, max_size=4))
def test_reflection_invariance(sa, ea):
    # dyadic orders reflect exactly, so atoms keep their identity
    pair = SymbolPair(A(sa), A(ea))
    assert check_restriction(pair).satisfied == check_restriction(pair.reflected()).satisfied


def test_moduli_examples():
    hooke = SymbolPair(A({0.0: 1.0}), A({0.0: 1.0}))
    for w in (1e-3, 1.0, 1e3):
        m = moduli(hooke, w)
        assert (m.storage, m.loss) == pytest.approx((1.0, 0.0))
    newton = SymbolPair(A({0.0: 1.0}), A({1.0: 1.0}))
    for w in (1e-3, 1.0, 1e3):
        m = moduli(newton, w)
        assert m.storage == pytest.approx(0.0, abs=1e-12 * w) and m.loss == pytest.approx(w)


def test_moduli_double_sum_oracle():
    s, e = zener_fractional()
    pair = SymbolPair(s, e)
    for w in (0.1, 1.0, 7.0):
        re = im = 0.0
        for x in e.atoms:
            for y in s.atoms:
                re += x.weight * y.weight * w ** (x.alpha + y.alpha) * math.cos(math.pi / 2 * (x.alpha - y.alpha))
                if x.alpha > y.alpha:
                    nu = x.weight * y.weight - dict((z.alpha, z.weight) for z in s.atoms)[x.alpha] * \
                        dict((z.alpha, z.weight) for z in e.atoms)[y.alpha]
                    im += nu * w ** (x.alpha + y.alpha) * math.sin(math.pi / 2 * (x.alpha - y.alpha))
        norm = abs(phi_log(s, np.array([complex(math.log(w), math.pi / 2)]))[0]) ** 2
        m = moduli(pair, w)
        assert m.storage == pytest.approx(re / norm, rel=1e-12)
        assert m.loss == pytest.approx(im / norm, rel=1e-12)


def test_moduli_nonnegative_random():
    rng = np.random.default_rng(12)
    omega = np.logspace(-3, 3, 13)
    for _ in range(50):
        pair = SymbolPair(*random_admissible_atoms(rng))
        E = complex_modulus(pair, omega)
        scale = np.abs(E)
        assert np.all(E.real >= -1e-10 * scale) and np.all(E.imag >= -1e-10 * scale)


@pytest.mark.parametrize("s,e,tag", [
    ({0.0: 1.0}, {0.0: 2.0}, HOOKE),
    ({0.0: 1.0}, {1.0: 1.0}, NEWTON),
    ({0.0: 1.0}, {0.0: 1.0, 1.0: 1.0}, VOIGT),
    ({0.0: 1.0, 1.0: 2.0}, {1.0: 1.0}, MAXWELL),
    ({0.0: 2.0, 1.0: 1.0}, {0.0: 1.0, 1.0: 2.0}, ZENER),
    ({0.0: 1.0, 0.5: 0.5}, {0.0: 1.0, 0.5: 1.0}, PROPER),
])
def test_classification(s, e, tag):
    c = classify(SymbolPair(A(s), A(e)))
    assert c.tag == tag and c.admissible
    assert c.classical == (tag != PROPER)


def test_exceptional_detection():
    maxwell = SymbolPair(A({0.0: 1.0, 1.0: 0.5}), A({1.0: 1.0}))
    c = classify(maxwell)
    assert c.exceptional and c.tag == MAXWELL
    p = c.exceptional_params
    assert (p.a, p.b, p.tau) == pytest.approx((1.0, 0.0, 0.5))
    zf = classify(SymbolPair(*zener_fractional()))
    assert zf.tag == PROPER and not zf.exceptional
    # a fractional exceptional pair: common part with maximal order 1
    lam = A({0.5: 1.0, 1.0: 1.0})
    s = A({0.0: 2.0}) + lam.scaled(0.5)
    e = A({0.0: 1.0}) + lam
    assert exceptional_decomposition(SymbolPair(s, e)) is not None
    # the common part must reach 1
    lam = A({0.5: 1.0, 0.9: 1.0})
    assert exceptional_decomposition(SymbolPair(A({0.0: 2.0}) + lam.scaled(0.5), A({0.0: 1.0}) + lam)) is None


def test_proportional():
    mu = Measure(A({0.2: 1.0}).atoms, (Exponential(2.0),))
    assert proportional(mu.scaled(3.0), mu) == pytest.approx(3.0)
    assert proportional(A({0.2: 1.0}), A({0.3: 1.0})) is None


def test_inadmissible_classified_and_flagged():
    c = classify(SymbolPair(*counterexample()))
    assert c.tag == PROPER and not c.admissible
    assert c.to_json()["admissible"] is False
