from __future__ import annotations

import math

import numpy as np
import pytest

from dofwave.analysis import (INF, constants, extrapolated_ratio, im_psi_slope, limit_rho, limit_tau, ratio_on_rays,
                              smoothness, tail_ratio_F)
from dofwave.errors import IndeterminateRatio
from dofwave.measures import Exponential, Measure, Power, Table
from dofwave.symbol import SymbolPair

from helpers import A, exponential_pair, random_admissible_atoms, random_admissible_pair, zener_fractional


def test_tail_ratio_examples():
    pair = SymbolPair(*zener_fractional())
    assert tail_ratio_F(pair, 0.25) == pytest.approx(0.5)
    assert tail_ratio_F(pair, 0.0) == pytest.approx(0.75)
    mu = Measure(densities=(Exponential(2.0),))
    for x in (0.0, 0.3, 0.9):
        assert tail_ratio_F(SymbolPair(mu, mu), x) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tail_ratio_F(pair, 0.7)


def test_tail_ratio_indeterminate_and_infinite():
    p = Measure(densities=(Power(1.0, 0.5),))
    with pytest.raises(IndeterminateRatio):
        tail_ratio_F(SymbolPair(p, p), 1.0)
    pair = SymbolPair(A({0.0: 1.0, 0.5: 1.0}), A({0.0: 1.0}) + Measure(densities=(Power(0.5, 0.0),)))
    assert tail_ratio_F(pair, 0.5) == INF


def test_tail_ratio_non_increasing():
    rng = np.random.default_rng(2)
    for _ in range(30):
        s, e = random_admissible_atoms(rng)
        pair = SymbolPair(s, e)
        M = s.alphas.max()
        xs = np.linspace(0.0, M, 41)
        F = [tail_ratio_F(pair, x) for x in xs]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(F, F[1:]))


def test_tau_examples():
    assert limit_tau(SymbolPair(A({0.0: 3.0, 0.6: 2.0}), A({0.0: 1.0, 0.6: 4.0}))) == pytest.approx(0.5)
    assert limit_tau(SymbolPair(*exponential_pair())) == pytest.approx(0.5)
    assert limit_tau(SymbolPair(A({0.0: 1.0}), A({0.0: 1.0, 0.4: 1.0}))) == 0.0
    assert limit_tau(SymbolPair(A({0.0: 1.0, 0.4: 1.0}), A({0.0: 1.0}))) == INF


def test_tau_tail_limit_fallback():
    s = Measure(densities=(Table((0.0, 1.0), (2.0, 1.0)),))
    e = Measure(densities=(Table((0.0, 1.0), (1.0, 1.0)),))
    # F(x) = 2 - (1 + x)/2 -> 1
    assert limit_tau(SymbolPair(s, e)) == pytest.approx(1.0, abs=1e-9)


def test_rho_examples():
    assert limit_rho(SymbolPair(*zener_fractional())) == pytest.approx(1.0)
    assert limit_rho(SymbolPair(*exponential_pair())) == pytest.approx(1.0)
    assert limit_rho(SymbolPair(A({0.0: 1.0}), A({1.0: 1.0}))) == INF


def test_constants_examples():
    a, b = 2.0, 3.0
    c = constants(SymbolPair(A({0.0: a}), A({0.0: b})))
    assert c.tau == c.rho == pytest.approx(a / b)
    assert c.c == c.v_i == pytest.approx(math.sqrt(b / a)) and c.v_e == pytest.approx(math.sqrt(b / a))
    z = constants(SymbolPair(*zener_fractional()))
    assert (z.tau, z.rho, z.v_e) == pytest.approx((0.5, 1.0, 1.0)) and z.c == pytest.approx(math.sqrt(2))
    assert (z.J_g, z.J_e, z.G_g, z.G_e) == pytest.approx((0.5, 1.0, 2.0, 1.0))
    x = constants(SymbolPair(*exponential_pair()))
    assert x.v_i == pytest.approx(math.sqrt(2)) and x.v_e == pytest.approx(1.0)
    n = constants(SymbolPair(A({0.0: 1.0}), A({1.0: 1.0})))
    assert n.tau == 0.0 and n.c == INF and n.rho == INF and n.v_e == 0.0
    assert n.to_json()["c"] == "inf"


def test_constants_invariants_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        c = constants(random_admissible_pair(rng))
        assert c.M_sigma <= c.M_eps and c.m_sigma <= c.m_eps
        assert c.rho >= c.tau * (1 - 1e-12)
        assert c.J_g == c.tau and c.J_e == c.rho


def test_structural_tau_against_numeric_ratio():
    rng = np.random.default_rng(6)
    for _ in range(20):
        g = float(rng.uniform(0.5, 1.0))
        b = rng.uniform(0.5, 2.0, 2)
        r = np.sort(rng.uniform(0.2, 2.0, 2))[::-1]
        pair = SymbolPair(A({0.0: r[0] * b[0], g: r[1] * b[1]}), A({0.0: b[0], g: b[1]}))
        tau, rho = limit_tau(pair), limit_rho(pair)
        assert np.all(np.abs(ratio_on_rays(pair, 1e12) - tau) <= max(1e-4, 1e-4 * tau))
        assert np.all(np.abs(ratio_on_rays(pair, 1e-12) - rho) <= max(1e-4, 1e-4 * rho))


def test_extrapolated_ratio_power_pair():
    # ratio approaches 0.3 like a series in 1 / log s
    s = Measure(densities=(Power(1.0, 0.5, 0.3), Power(1.0, 1.5)))
    e = Measure(densities=(Power(1.0, 0.5),))
    pair = SymbolPair(s, e)
    assert limit_tau(pair) == pytest.approx(0.3)
    assert np.all(np.abs(ratio_on_rays(pair, 1e12) - 0.3) > 1e-2)
    assert np.all(np.abs(extrapolated_ratio(pair, 1e12) - 0.3) < 1e-4)


def test_smoothness_examples():
    r = smoothness(SymbolPair(*zener_fractional()))
    assert (r.kind, r.eta, r.gevrey_beta) == ("PowerDecay", -0.5, 2.0)
    r = smoothness(SymbolPair(A({0.0: 1.0}), A({0.0: 1.0, 0.5: 1.0})))
    assert r.kind == "PowerDecay" and r.eta == pytest.approx(-0.25) and r.gevrey_beta == pytest.approx(4 / 3)
    assert smoothness(SymbolPair(*exponential_pair())).kind == "LogDecay"
    assert smoothness(SymbolPair(A({0.0: 1.0, 1.0: 0.5}), A({1.0: 1.0}))).kind == "Exceptional"
    mixed = SymbolPair(A({0.0: 1.0}) + Measure(densities=(Exponential(0.5),)),
                       A({0.0: 1.0}) + Measure(densities=(Exponential(1.0),)))
    r = smoothness(mixed)
    assert r.kind == "Unquantified" and r.eta is None and r.gevrey_beta is None


def test_decay_slope_matches_eta():
    for pair, eta in ((SymbolPair(*zener_fractional()), -0.5),
                      (SymbolPair(A({0.0: 1.0, 0.3: 2.0, 0.7: 1.0}), A({0.0: 1.0, 0.3: 3.0, 0.7: 2.0})), -0.4)):
        assert smoothness(pair).eta == pytest.approx(eta)
        assert abs(im_psi_slope(pair) - eta) < 0.05
