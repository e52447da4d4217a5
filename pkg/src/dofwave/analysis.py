"""Material constants and regularity descriptors of a model.

``tau = lim Phi_sigma / Phi_eps`` as ``s -> infinity`` and ``rho`` is the same
limit as ``s -> 0``; ``rho`` is obtained as ``1 / tau`` of the reflected pair
(``alpha -> 1 - alpha`` with the roles of the two measures exchanged).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConvergenceFailure, IndeterminateRatio
from .measures import Exponential, Measure, atom_weight_at, interval_mass, support_bounds
from .symbol import SymbolPair, phi_asymptotic, phi_log, psi_values
from .thermo import exceptional_decomposition

INF = math.inf
F_LIMIT_TOL = 1e-10
F_LIMIT_STEPS = 40
CROSS_CHECK_RAYS = (0.0, 0.5 * math.pi, -0.5 * math.pi)


def tail_ratio_F(pair: SymbolPair, x: float) -> float:
    """``mu_sigma([x, M]) / mu_eps([x, M])`` with ``a/0 = inf``."""
    M = max(support_bounds(pair.mu_sigma)[1], support_bounds(pair.mu_eps)[1])
    if not 0.0 <= x <= M:
        raise ValueError(f"x={x} outside [0, {M}]")
    num = interval_mass(pair.mu_sigma, x, M)
    den = interval_mass(pair.mu_eps, x, M)
    if den == 0.0:
        if num == 0.0:
            raise IndeterminateRatio(f"both tails vanish at x={x}")
        return INF
    return num / den


def _lead_coefficient(mu: Measure):
    """``(kappa, c)`` when the density behaves like ``c (M - alpha)**kappa`` at the top."""
    lead = phi_asymptotic(mu)
    if lead.kind == "ExpLead":
        return 0.0, lead.coefficient
    if lead.kind == "PowerLead":
        return lead.kappa, lead.coefficient
    return None


def _f_limit(pair: SymbolPair, M: float) -> float:
    prev = prev_prev = None
    for j in range(1, F_LIMIT_STEPS + 1):
        x = M - 2.0 ** (-j)
        if x < 0:
            continue
        cur = tail_ratio_F(pair, x)
        if prev is not None and (cur == prev or abs(cur - prev) < F_LIMIT_TOL):
            return cur
        prev_prev, prev = prev, cur
    raise ConvergenceFailure("tail ratio did not settle", bracket=(prev, prev_prev))


def limit_tau(pair: SymbolPair) -> float:
    """``lim Phi_sigma / Phi_eps`` at infinity, decided from the top of the supports."""
    Ms = support_bounds(pair.mu_sigma)[1]
    Me = support_bounds(pair.mu_eps)[1]
    if Ms < Me:
        return 0.0
    if Ms > Me:
        return INF
    M = Ms
    ws = atom_weight_at(pair.mu_sigma, M)
    we = atom_weight_at(pair.mu_eps, M)
    if ws > 0 and we > 0:
        return ws / we
    if we > 0:
        return 0.0
    if ws > 0:
        return INF
    ls, le = _lead_coefficient(pair.mu_sigma), _lead_coefficient(pair.mu_eps)
    if ls is not None and le is not None:
        if ls[0] > le[0]:
            return 0.0
        if ls[0] < le[0]:
            return INF
        return ls[1] / le[1]
    return _f_limit(pair, M)


def limit_rho(pair: SymbolPair) -> float:
    """``lim Phi_sigma / Phi_eps`` at zero, via the reflected pair."""
    t = limit_tau(pair.reflected())
    if t == 0.0:
        return INF
    if t == INF:
        return 0.0
    return 1.0 / t


def ratio_on_rays(pair: SymbolPair, R: float, thetas=CROSS_CHECK_RAYS) -> np.ndarray:
    """Raw ``Phi_sigma / Phi_eps`` at ``|s| = R`` on the given rays."""
    L = math.log(R) + 1j * np.asarray(thetas, dtype=float)
    return phi_log(pair.mu_sigma, L) / phi_log(pair.mu_eps, L)


def extrapolated_ratio(pair: SymbolPair, R: float, thetas=CROSS_CHECK_RAYS, nodes: int = 6, degree: int = 4):
    """Estimate the limit of the ratio as ``|s| -> R**(+-inf)`` by extrapolating in ``1/log s``.

    Meant for logarithmic leads (exponential or power densities at the top of
    the support), where the ratio approaches its limit like a series in
    ``1/log s``.  Samples are taken for ``|s|`` between ``R**0.5`` and ``R``
    (``R < 1`` extrapolates towards zero).  Returns one value per ray.
    """
    lr = math.log(R)
    radii = np.linspace(0.5 * lr, lr, nodes)
    out = []
    for th in np.atleast_1d(thetas):
        L = radii + 1j * th
        r = phi_log(pair.mu_sigma, L) / phi_log(pair.mu_eps, L)
        u = 1.0 / L
        # complex least squares fit of r against powers of 1/L, read off at 1/L = 0
        V = np.vander(u, degree + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(V, r, rcond=None)
        out.append(coef[0])
    return np.array(out)


def _fmt(v: float):
    return "inf" if v == INF else v


@dataclass(frozen=True)
class MaterialConstants:
    M_sigma: float
    M_eps: float
    m_sigma: float
    m_eps: float
    tau: float
    rho: float
    k: float
    c: float
    v_i: float
    v_e: float
    J_g: float
    J_e: float
    G_g: float
    G_e: float

    def to_json(self) -> dict:
        return {key: _fmt(v) for key, v in asdict(self).items()}


def constants(pair: SymbolPair) -> MaterialConstants:
    ms, Ms = support_bounds(pair.mu_sigma)
    me, Me = support_bounds(pair.mu_eps)
    tau = limit_tau(pair)
    rho = limit_rho(pair)
    k = math.sqrt(tau) if tau != INF else INF
    c = INF if k == 0.0 else (0.0 if k == INF else 1.0 / k)
    v_e = 0.0 if rho == INF else (INF if rho == 0.0 else 1.0 / math.sqrt(rho))
    return MaterialConstants(
        M_sigma=Ms, M_eps=Me, m_sigma=ms, m_eps=me,
        tau=tau, rho=rho, k=k, c=c, v_i=c, v_e=v_e,
        J_g=tau, J_e=rho,
        G_g=INF if tau == 0.0 else (0.0 if tau == INF else 1.0 / tau),
        G_e=0.0 if rho == INF else (INF if rho == 0.0 else 1.0 / rho),
    )


# --- smoothness --------------------------------------------------------------


@dataclass(frozen=True)
class SmoothnessReport:
    """Decay exponent ``eta`` of ``Im Psi`` along vertical lines and the Gevrey order.

    ``kind`` is ``PowerDecay`` (``eta`` known), ``LogDecay`` (logarithmic
    decay, no exponent), ``Exceptional`` (no claim) or ``Unquantified``
    (decay exists but no exponent is computable from the data).
    """

    eta: float | None
    gevrey_beta: float | None
    kind: str

    def to_json(self) -> dict:
        return {"eta": self.eta, "gevrey_beta": self.gevrey_beta, "kind": self.kind}


def _atom_eta(pair: SymbolPair) -> float | None:
    sw = {a.alpha: a.weight for a in pair.mu_sigma.atoms}
    ew = {a.alpha: a.weight for a in pair.mu_eps.atoms}
    grid = sorted(set(sw) | set(ew))
    a = [sw.get(g, 0.0) for g in grid]
    b = [ew.get(g, 0.0) for g in grid]
    n = len(grid) - 1
    if b[n] == 0:
        return None
    if a[n] > 0:
        tau = a[n] / b[n]
        for m in range(n - 1, -1, -1):
            # ratio a_m / b_m differs from tau (a/0 = inf)
            if b[m] == 0 or abs(a[m] - tau * b[m]) > 1e-12 * max(a[m], tau * b[m]):
                if a[m] == 0 and b[m] == 0:
                    continue
                return -(grid[n] - grid[m])
        return None
    for m in range(n - 1, -1, -1):
        if a[m] > 0:
            return -(grid[n] - grid[m]) / 2.0
    return None


def smoothness(pair: SymbolPair) -> SmoothnessReport:
    if exceptional_decomposition(pair) is not None:
        return SmoothnessReport(None, None, "Exceptional")
    if pair.mu_sigma.is_atomic and pair.mu_eps.is_atomic:
        eta = _atom_eta(pair)
        if eta is not None and eta > -1.0:
            return SmoothnessReport(eta, 1.0 / (1.0 + eta), "PowerDecay")
        return SmoothnessReport(None, None, "Unquantified")
    ds, de = pair.mu_sigma, pair.mu_eps
    if (not ds.atoms and not de.atoms and len(ds.densities) == 1 and len(de.densities) == 1
            and isinstance(ds.densities[0], Exponential) and isinstance(de.densities[0], Exponential)):
        return SmoothnessReport(None, None, "LogDecay")
    return SmoothnessReport(None, None, "Unquantified")


def im_psi_slope(pair: SymbolPair, a: float = 1.0, y_lo: float = 1e3, y_hi: float = 1e6, n: int = 61) -> float:
    """Least-squares log-log slope of ``|Im Psi(a + iy)|`` over ``[y_lo, y_hi]``."""
    y = np.geomspace(y_lo, y_hi, n)
    s = a + 1j * y
    psi = psi_values(pair, np.abs(s), np.angle(s))
    return float(np.polyfit(np.log(y), np.log(np.abs(psi.imag)), 1)[0])
