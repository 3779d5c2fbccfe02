"""Closed-form spectra for reference spaces.

These validate the finite-difference solver and supply the curved-space
spectra (spheres, cylinder products) that are never discretized.  Every
enumeration bound is chosen adaptively so the k-th reported value is
certified: no value beyond the enumeration ceiling can undercut it.
"""

from __future__ import annotations

from math import comb, pi
from typing import Sequence

import numpy as np

from .eigensolve import Spectrum
from .errors import UnderResolvedError

__all__ = [
    "interval_spectrum",
    "box_spectrum",
    "torus_spectrum",
    "sphere_spectrum",
    "ou_spectrum",
    "product_spectrum",
]


def _oracle(values, index_base, name, params, uncertainties=None) -> Spectrum:
    vals = tuple(float(v) for v in values)
    zeros = tuple(0.0 for _ in vals)
    return Spectrum(eigenvalues=vals, residual_norms=zeros, index_base=index_base,
                    problem={"oracle": name, "params": params},
                    uncertainties=tuple(uncertainties) if uncertainties is not None else zeros)


def interval_spectrum(length: float, k: int) -> Spectrum:
    """Dirichlet spectrum of an interval: (j pi / L)^2, j = 1..k."""
    if length <= 0:
        raise ValueError("length must be positive")
    vals = [(j * pi / length) ** 2 for j in range(1, k + 1)]
    return _oracle(vals, 1, "interval", {"length": length, "k": k})


def box_spectrum(lengths: Sequence[float], k: int) -> Spectrum:
    """Dirichlet spectrum of a box: sorted sums of (j_i pi / L_i)^2."""
    lengths = [float(L) for L in lengths]
    if any(L <= 0 for L in lengths):
        raise ValueError("lengths must be positive")
    base = [(pi / L) ** 2 for L in lengths]
    ceiling = (k + 1) * max(base) * len(base)
    while True:
        grids = [np.arange(1.0, np.floor(np.sqrt(ceiling / b)) + 2.0) for b in base]
        # Same expression order as interval_spectrum, so a one-axis box
        # reproduces the interval values bit for bit.
        axis_vals = [(g * pi / L) ** 2 for g, L in zip(grids, lengths)]
        mesh = np.meshgrid(*axis_vals, indexing="ij")
        vals = np.sum(np.stack([m.ravel() for m in mesh]), axis=0)
        vals = np.sort(vals[vals <= ceiling])
        if len(vals) >= k:
            return _oracle(vals[:k], 1, "box", {"lengths": lengths, "k": k})
        ceiling *= 2.0


def torus_spectrum(periods: Sequence[float], k: int) -> Spectrum:
    """Closed spectrum of a flat torus: sums of (2 pi m_i / P_i)^2, m integer."""
    periods = [float(p) for p in periods]
    if any(p <= 0 for p in periods):
        raise ValueError("periods must be positive")
    base = [(2.0 * pi / p) ** 2 for p in periods]
    ceiling = max(k, 1) * max(base)
    while True:
        caps = [np.floor(np.sqrt(ceiling / b)) for b in base]
        grids = [np.arange(-m, m + 1.0) for m in caps]
        axis_vals = [(2.0 * pi * g / p) ** 2 for g, p in zip(grids, periods)]
        mesh = np.meshgrid(*axis_vals, indexing="ij")
        vals = np.sum(np.stack([m.ravel() for m in mesh]), axis=0)
        vals = np.sort(vals[vals <= ceiling])
        if len(vals) >= k:
            return _oracle(vals[:k], 0, "torus", {"periods": periods, "k": k})
        ceiling *= 2.0


def _sphere_multiplicity(m: int, l: int) -> int:
    high = comb(m + l, l)
    low = comb(m + l - 2, l - 2) if l >= 2 else 0
    return high - low


def sphere_spectrum(dim: int, radius: float, k: int) -> Spectrum:
    """Closed spectrum of a round sphere S^m(r): l(l+m-1)/r^2 with the
    spherical-harmonic multiplicities."""
    if dim < 1:
        raise ValueError("sphere dimension must be >= 1")
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    vals = []
    l = 0
    while len(vals) < k:
        vals.extend([l * (l + dim - 1) / radius ** 2] * _sphere_multiplicity(dim, l))
        l += 1
    return _oracle(vals[:k], 0, "sphere", {"dim": dim, "radius": radius, "k": k})


def ou_spectrum(dim: int, coeff: float, k: int) -> Spectrum:
    """Spectrum of -Delta_f on R^d with f = coeff |x|^2: 2 coeff |alpha| over
    multi-indices alpha, i.e. level s with multiplicity C(s+d-1, d-1)."""
    if coeff <= 0:
        raise ValueError("coeff must be positive: no discrete spectrum otherwise")
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    vals = []
    s = 0
    while len(vals) < k:
        vals.extend([2.0 * coeff * s] * comb(s + dim - 1, dim - 1))
        s += 1
    return _oracle(vals[:k], 0, "ou", {"dim": dim, "coeff": coeff, "k": k})


def product_spectrum(s1: Spectrum, s2: Spectrum, k: int) -> Spectrum:
    """Spectrum of a product space whose weight lives on one factor: the
    sorted pairwise sums of the factor spectra.

    The k-th sum is certified only when every pair outside the supplied
    prefixes provably exceeds it; a factor marked ``complete`` needs no such
    guard.  Under-resolved inputs raise with the prefix sizes that would be
    needed.
    """
    e1, e2 = s1.values(), s2.values()
    sums = np.add.outer(e1, e2).ravel()
    order = np.argsort(sums, kind="stable")
    if k > len(sums):
        raise UnderResolvedError(
            f"only {len(sums)} pair sums available, need {k}",
            needed_left=k, needed_right=k)
    kth = sums[order[k - 1]]
    problems = []
    if not s1.complete and e1[-1] + e2[0] < kth:
        problems.append(f"left factor needs entries past {e1[-1]:g} "
                        f"(max + min partner {e1[-1] + e2[0]:g} < {kth:g})")
    if not s2.complete and e1[0] + e2[-1] < kth:
        problems.append(f"right factor needs entries past {e2[-1]:g} "
                        f"(min partner + max {e1[0] + e2[-1]:g} < {kth:g})")
    if problems:
        raise UnderResolvedError("; ".join(problems),
                                 needed_left=len(e1) + 1, needed_right=len(e2) + 1)
    take = order[:k]
    i1, i2 = np.unravel_index(take, (len(e1), len(e2)))
    unc = s1.bands()[i1] + s2.bands()[i2]
    index_base = 1 if (s1.index_base == 1 or s2.index_base == 1) else 0
    spec = _oracle(sums[take], index_base, "product",
                   {"left": s1.problem, "right": s2.problem, "k": k},
                   uncertainties=unc)
    return Spectrum(eigenvalues=spec.eigenvalues, residual_norms=spec.residual_norms,
                    index_base=index_base, problem=spec.problem,
                    uncertainties=spec.uncertainties,
                    complete=s1.complete and s2.complete)
