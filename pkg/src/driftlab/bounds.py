"""Evaluators for the universal eigenvalue inequalities, the Cheng-Yang
recursion machinery, the explicit gap-bound constants, and the consecutive
gap conjecture.

Every evaluator consumes an ordered spectrum (plus geometric constants) and
returns an auditable pass/fail record.  Closed spectra enter the classical
inequalities through the shifted sequence mu_i = lambda_{i-1} + c, which is
also how a Dirichlet spectrum with offset c is handled; c = 0 recovers the
textbook Euclidean forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .discretize import Grid
from .eigensolve import Spectrum
from .model_space import Domain, GeometrySpec, WeightFunction

__all__ = [
    "ConstantsBundle",
    "BoundCheck",
    "RecursionState",
    "RecursionRecord",
    "ppw_check",
    "hile_protter_check",
    "yang_first_check",
    "yang_second_check",
    "recursion_constant",
    "recursion_prefix_factor",
    "recursion_audit",
    "cheng_yang_upper",
    "constant_c_general",
    "immersed_gap_bound",
    "gaussian_soliton_gap",
    "self_shrinker_c",
    "ricci_soliton_c",
    "product_manifold_gap",
    "conjecture_check",
]


def default_C0(n: int) -> float:
    """Conservative surrogate for the Cheng-Yang constant: 1 + 4/n."""
    return 1.0 + 4.0 / n


@dataclass(frozen=True)
class ConstantsBundle:
    """Geometric constants feeding the explicit gap bounds.

    The trial-function weights alpha_j, b_j exist abstractly; the default
    bundle uses the flat-case values alpha_j = 1, b_j = 1 and callers may
    override them.  ``c`` is the inequality offset (reference-embedding
    value), ``c_bar`` the weighted mean of f.
    """

    n: int
    p: int = 0
    c: float = 0.0
    c_bar: float = 0.0
    C0: Optional[float] = None
    alpha_min: float = 1.0
    alpha_max: float = 1.0
    beta: float = 1.0
    b_list: Tuple[float, ...] = ()
    rho: float = 0.0
    H2max: float = 0.0
    Smin: float = 0.0
    Xsq_range: Tuple[float, float] = (0.0, 0.0)
    grad_f_max: float = 0.0
    grad_f_sq_max: float = 0.0

    def __post_init__(self):
        if not (0 < self.alpha_min <= self.alpha_max):
            raise ValueError("need 0 < alpha_min <= alpha_max")
        if self.beta < 0 or any(b < 0 for b in self.b_list):
            raise ValueError("beta and every b_j must be >= 0")
        if self.C0 is not None and self.C0 < 1:
            raise ValueError("C0 must be >= 1")
        if self.c < 0:
            raise ValueError("c must be >= 0")

    @classmethod
    def flat(cls, n: int, p: int = 0, c: float = 0.0) -> "ConstantsBundle":
        return cls(n=n, p=p, c=c, b_list=tuple(1.0 for _ in range(n + p)))

    def effective_C0(self) -> float:
        return self.C0 if self.C0 is not None else default_C0(self.n)


@dataclass(frozen=True)
class BoundCheck:
    """One evaluated inequality: lhs <= rhs up to the uncertainty band."""

    name: str
    k: int
    lhs: float
    rhs: float
    slack: float
    uncertainty: float
    verdict: str
    holds: bool

    def row(self) -> dict:
        return {"check_name": self.name, "k": self.k, "lhs": self.lhs,
                "rhs": self.rhs, "slack": self.slack,
                "uncertainty": self.uncertainty, "verdict": self.verdict}


@dataclass(frozen=True)
class RecursionState:
    k: int
    Lambda_k: float
    T_k: float
    F_k: float


@dataclass(frozen=True)
class RecursionRecord:
    state: RecursionState
    nonneg: BoundCheck
    step: Optional[BoundCheck]
    premise_holds: bool


def _check(name: str, k: int, lhs: float, rhs: float, band: float) -> BoundCheck:
    # A relative roundoff floor keeps exact-equality cases (sharp spectra)
    # from flipping verdicts by one ulp.
    floor = 1e-12 * max(1.0, abs(lhs), min(abs(rhs), 1e12))
    u = band + floor
    slack = rhs - lhs
    if np.isinf(rhs):
        return BoundCheck(name, k, lhs, rhs, np.inf, band, "holds_strictly", True)
    if slack >= u:
        verdict = "holds_strictly"
    elif slack >= 0:
        verdict = "holds"
    elif slack >= -u:
        verdict = "inconclusive"
    else:
        verdict = "violated"
    return BoundCheck(name, k, float(lhs), float(rhs), float(slack), float(band),
                      verdict, bool(slack >= -u))


def _mu(s: Spectrum, c: float) -> np.ndarray:
    """Shifted sequence mu_i = eigenvalue_i + c, positions 1..len."""
    return s.values() + c


def _require(s: Spectrum, k: int):
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(s) < k + 1:
        raise IndexError(f"need {k + 1} eigenvalues, spectrum has {len(s)}")


def ppw_check(s: Spectrum, n: int, k: int, c: float = 0.0) -> BoundCheck:
    """Consecutive gap against the arithmetic mean:
    mu_{k+1} - mu_k <= (4/(nk)) sum_{i<=k} mu_i."""
    _require(s, k)
    mu, u = _mu(s, c), s.bands()
    lhs = mu[k] - mu[k - 1]
    rhs = 4.0 / (n * k) * np.sum(mu[:k])
    band = u[k] + u[k - 1] + 4.0 / (n * k) * np.sum(u[:k])
    return _check("ppw", k, lhs, rhs, band)


def hile_protter_check(s: Spectrum, n: int, k: int, c: float = 0.0) -> BoundCheck:
    """sum_i mu_i / (mu_{k+1} - mu_i) >= nk/4; a tied top eigenvalue makes
    the sum infinite and the check vacuously true."""
    _require(s, k)
    mu, u = _mu(s, c), s.bands()
    gaps = mu[k] - mu[:k]
    lhs = n * k / 4.0
    if np.any(gaps <= 0):
        return _check("hile_protter", k, lhs, np.inf, 0.0)
    rhs = float(np.sum(mu[:k] / gaps))
    band = float(np.sum(mu[k] / gaps ** 2 * u[:k]) + np.sum(mu[:k] / gaps ** 2) * u[k])
    return _check("hile_protter", k, lhs, rhs, band)


def yang_first_check(s: Spectrum, n: int, k: int, c: float = 0.0) -> BoundCheck:
    """sum (mu_{k+1}-mu_i)^2 <= (4/n) sum (mu_{k+1}-mu_i) mu_i."""
    _require(s, k)
    mu, u = _mu(s, c), s.bands()
    gaps = mu[k] - mu[:k]
    lhs = float(np.sum(gaps ** 2))
    rhs = 4.0 / n * float(np.sum(gaps * mu[:k]))
    grad_top = 2.0 * np.sum(gaps) + 4.0 / n * np.sum(mu[:k])
    grad_each = 2.0 * gaps + 4.0 / n * np.abs(mu[k] - 2.0 * mu[:k])
    band = float(grad_top * u[k] + np.sum(grad_each * u[:k]))
    return _check("yang_first", k, lhs, rhs, band)


def yang_second_check(s: Spectrum, n: int, k: int, c: float = 0.0) -> BoundCheck:
    """mu_{k+1} <= (1/k)(1 + 4/n) sum_{i<=k} mu_i."""
    _require(s, k)
    mu, u = _mu(s, c), s.bands()
    lhs = mu[k]
    coeff = (1.0 + 4.0 / n) / k
    rhs = coeff * float(np.sum(mu[:k]))
    band = float(u[k] + coeff * np.sum(u[:k]))
    return _check("yang_second", k, lhs, rhs, band)


def recursion_constant(n: int, k: int) -> float:
    """C(n,k) = 1 - (1/(3n)) (k/(k+1))^{4/n} (1+2/n)(1+4/n)/(k+1)^3, in (0,1)."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return 1.0 - (1.0 / (3.0 * n)) * (k / (k + 1.0)) ** (4.0 / n) \
        * (1.0 + 2.0 / n) * (1.0 + 4.0 / n) / (k + 1.0) ** 3


def recursion_prefix_factor(n: int, k: int) -> float:
    """Product over j < k of C(n,j) ((j+1)/j)^{4/n}: the tight growth factor
    F_k <= factor * F_1 accumulated by the recursion (reporting only)."""
    out = 1.0
    for j in range(1, k):
        out *= recursion_constant(n, j) * ((j + 1.0) / j) ** (4.0 / n)
    return out


def _recursion_states(mu: np.ndarray, n: int) -> List[RecursionState]:
    states = []
    for k in range(1, len(mu) + 1):
        lam = float(np.mean(mu[:k]))
        t = float(np.mean(mu[:k] ** 2))
        f = (1.0 + 2.0 / n) * lam * lam - t
        states.append(RecursionState(k=k, Lambda_k=lam, T_k=t, F_k=f))
    return states


def recursion_audit(s: Spectrum, n: int, c: float = 0.0,
                    k_max: Optional[int] = None) -> List[RecursionRecord]:
    """Audit F_k >= 0 and the step F_{k+1} <= C(n,k)((k+1)/k)^{4/n} F_k.

    The premise (the first Yang inequality on the shifted sequence) is
    checked at each prefix; failures are flagged but the recursion is still
    evaluated, so defective inputs remain visible in the report.
    """
    mu = _mu(s, c)
    if k_max is None:
        k_max = len(mu) - 1
    states = _recursion_states(mu[:k_max + 1], n)
    records = []
    for st in states[:k_max]:
        k = st.k
        nonneg = _check("recursion_f", k, 0.0, st.F_k, _f_band(s, c, n, k))
        step = None
        if k < len(states):
            factor = recursion_constant(n, k) * ((k + 1.0) / k) ** (4.0 / n)
            step = _check("recursion_step", k, states[k].F_k, factor * st.F_k,
                          _f_band(s, c, n, k + 1) + factor * _f_band(s, c, n, k))
        premise = yang_first_check(s, n, k, c).holds if len(mu) > k else True
        records.append(RecursionRecord(state=st, nonneg=nonneg, step=step,
                                       premise_holds=premise))
    return records


def _f_band(s: Spectrum, c: float, n: int, k: int) -> float:
    """First-order uncertainty of F_k from the per-eigenvalue bands."""
    mu, u = _mu(s, c)[:k], s.bands()[:k]
    lam = np.mean(mu)
    grad = np.abs(2.0 * (1.0 + 2.0 / n) * lam / k - 2.0 * mu / k)
    return float(np.sum(grad * u))


def cheng_yang_upper(lambda1: float, n: int, k: int, c: float = 0.0,
                     C0: Optional[float] = None) -> float:
    """Explicit upper bound for lambda_{k+1}:
    C0 (lambda_1 + c) k^{2/n} - c, with C0 defaulting to 1 + 4/n."""
    if C0 is None:
        C0 = default_C0(n)
    return C0 * (lambda1 + c) * k ** (2.0 / n) - c


def constant_c_general(domain: Domain, f: WeightFunction, geom: GeometrySpec,
                       grid: Grid) -> float:
    """Offset constant for weighted domains:
    (1/4) max over the grid of (n^2 H^2 + 2 |Delta_f f| + |grad f|^2).

    Evaluated at the declared reference immersion; that can only enlarge the
    infimum over all immersions, and every asserted bound is monotone
    nondecreasing in c, so validity is preserved.
    """
    pts = grid.points()
    grad = f.gradient_at(pts)
    gsq = np.sum(grad * grad, axis=1)
    drift_lap = f.laplacian_at(pts) - gsq
    val = geom.mean_curv_sq_max + 2.0 * np.abs(drift_lap) + gsq
    return float(np.max(val)) / 4.0


def _immersed_constant(lambda1: float, bundle: ConstantsBundle) -> float:
    denom = bundle.n * bundle.alpha_min ** 2 + (bundle.n + bundle.p) * bundle.beta
    if denom == 0:
        raise ValueError("degenerate bundle: n alpha^2 + (n+p) beta = 0")
    return (lambda1 + bundle.c) * np.sqrt(
        32.0 * bundle.alpha_max ** 2 * bundle.effective_C0() / denom)


def immersed_gap_bound(lambda1: float, bundle: ConstantsBundle, k: int,
                    index_shift: int = 0) -> float:
    """Explicit consecutive-gap bound
    (lambda_1 + c) sqrt(32 abar^2 C0 / (n a^2 + (n+p) beta)) * k^{1/n}.

    With a = abar = beta = 1, p = 0 this reduces to
    4 (lambda_1 + c) sqrt(C0/n) k^{1/n}.  ``index_shift=1`` selects the
    closed-problem form with (k+1)^{1/n}.
    """
    return _immersed_constant(lambda1, bundle) * (k + index_shift) ** (1.0 / bundle.n)


def gaussian_soliton_gap(lambda1: float, n: int, k: int, min_Xsq: float = 0.0,
                         index_shift: int = 0) -> float:
    """Gap bound on the Gaussian shrinker (weight |x|^2/4):
    c = (4n - min |x|^2)/16, bound 4 (lambda_1 + c) sqrt(C0/n) k^{1/n}."""
    c = (4.0 * n - min_Xsq) / 16.0
    return 4.0 * (lambda1 + c) * np.sqrt(default_C0(n) / n) * (k + index_shift) ** (1.0 / n)


def self_shrinker_c(geom: GeometrySpec, n: int) -> float:
    """Offset for self-shrinkers (weight |X|^2/2):
    (1/4) max over |X|^2 in its range of (n^2 H^2 + |2n - |X|^2| + |X|^2).

    The maximand is convex piecewise-linear in t = |X|^2, so the max sits at
    an endpoint of the range."""
    lo, hi = geom.pos_vec_sq_range
    vals = [geom.mean_curv_sq_max + abs(2.0 * n - t) + t for t in (lo, hi)]
    return max(vals) / 4.0


def ricci_soliton_c(rho: float, f_range: Tuple[float, float], c_bar: float,
                    Smin: float, H2max: float, n: int) -> float:
    """Offset for gradient Ricci solitons:
    (1/4) max over f of (n^2 H^2 + 4|rho f - rho c_bar| + 2 rho f
                         + n rho - 2 rho c_bar - S).

    Piecewise linear in f, so the max over [f_min, f_max] is attained at an
    endpoint."""
    lo, hi = f_range
    if lo > hi:
        raise ValueError("empty f range")
    vals = [H2max + 4.0 * abs(rho * t - rho * c_bar) + 2.0 * rho * t
            + n * rho - 2.0 * rho * c_bar - Smin for t in (lo, hi)]
    return max(vals) / 4.0


def product_manifold_gap(lambda1: float, m: int, k: int, grad_f_max: float = 0.0,
                         grad_f_sq_max: float = 0.0, C0m: Optional[float] = None,
                         index_shift: int = 0) -> float:
    """Gap bound on splitting spaces with a flat factor of dimension m.

    The displayed constant contains sqrt(lambda_{k+1}) inside its own offset
    c2; that is replaced by its own explicit upper bound, which makes c2 the
    positive root of c2 = G2/4 + m G sqrt(C0 (lambda_1 + c2)) k^{1/m} and
    only enlarges the bound.  With f constant this collapses to
    4 lambda_1 sqrt(C0(m)/m) k^{1/m}.
    """
    if m < 1:
        raise ValueError("flat-factor dimension m must be >= 1")
    if C0m is None:
        C0m = default_C0(m)
    kk = float(k + index_shift)
    a = grad_f_sq_max / 4.0
    b = m * grad_f_max * np.sqrt(C0m) * kk ** (1.0 / m)
    y = 0.5 * (b + np.sqrt(b * b + 4.0 * (lambda1 + a)))  # y = sqrt(lambda1 + c2)
    c2 = y * y - lambda1
    lead = np.sqrt(4.0 * C0m * (lambda1 + c2) / m)
    inner = 4.0 * lambda1 + grad_f_sq_max \
        + 4.0 * m * grad_f_max * np.sqrt(C0m * (lambda1 + c2)) * kk ** (1.0 / m)
    return float(lead * np.sqrt(inner) * kk ** (1.0 / m))


def conjecture_check(s: Spectrum, n: int, k_max: int) -> List[BoundCheck]:
    """Consecutive-gap conjecture: lambda_{k+1} - lambda_k <= (lambda_2 -
    lambda_1) k^{1/n} for each k <= k_max.

    An open conjecture: the records are reported, never asserted.
    """
    if s.index_base != 1:
        raise ValueError("the gap conjecture is stated for Dirichlet spectra")
    _require(s, k_max)
    lam, u = s.values(), s.bands()
    first_gap = lam[1] - lam[0]
    out = []
    for k in range(1, k_max + 1):
        lhs = lam[k] - lam[k - 1]
        rhs = first_gap * k ** (1.0 / n)
        band = u[k] + u[k - 1] + (u[1] + u[0]) * k ** (1.0 / n)
        out.append(_check("conjecture", k, lhs, rhs, band))
    return out
