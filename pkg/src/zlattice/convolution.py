"""Discrete convolution products over lattice sub-domains.

One windowed kernel ``conv_general`` covers the causal (Faltung), Weyl,
bilateral and general domain-pair products; ``conv_axes`` convolves along a
chosen subset of axes only.  Output windows are always caller-supplied:
infinite result domains are never materialized.  When a factor carries a decay
envelope, truncation of the unstored tail is bounded entrywise in closed
geometric form and reported as a ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DivergentConvolution
from .lattice import (
    Box,
    FiniteSet,
    FullLattice,
    LatticeDomain,
    Orthant,
    SequenceTable,
    Shifted,
    minkowski_sum,
    value_norm,
)
from .ztransform import eval_forward

DEFAULT_TOL = 1e-12
TOL_FLOOR = 1e-14


# ---------------------------------------------------------------------------
# Axis profiles for tail bounds
# ---------------------------------------------------------------------------


def _axis_interval(domain: LatticeDomain, axis: int):
    """(lo, hi) bounds of the domain along one axis; None means unbounded."""
    off = 0
    while isinstance(domain, Shifted):
        off += domain.offset[axis]
        domain = domain.base
    if isinstance(domain, FullLattice):
        return (None, None)
    if isinstance(domain, Orthant):
        return (off, None) if domain.signs[axis] > 0 else (None, off)
    if isinstance(domain, Box):
        return (domain.lo[axis] + off, domain.hi[axis] + off)
    if isinstance(domain, FiniteSet):
        cs = [p[axis] for p in domain.points]
        return (min(cs) + off, max(cs) + off)
    raise TypeError(f"unknown domain {domain!r}")


@dataclass
class _AxisProfile:
    lo: int | None  # admissible interval along the axis
    hi: int | None
    r_neg: float  # envelope factor r_neg^k for k < 0
    r_pos: float  # envelope factor r_pos^k for k >= 0

    def factor(self, k: int) -> float:
        return (self.r_pos if k >= 0 else self.r_neg) ** k


def _profiles(f: SequenceTable, axes: Sequence[int]) -> tuple[float, list[_AxisProfile]]:
    """Global constant and per-axis envelope profiles of a table.

    Without an envelope, the table is exactly zero outside its support, so the
    admissible interval clips to the support and the bound constant is the
    maximum stored norm.
    """
    profs = []
    if f.envelope is not None:
        M = f.envelope.M
        for ax in axes:
            lo, hi = _axis_interval(f.domain, ax)
            r = f.envelope.rates[ax]
            rn, rp = (r if isinstance(r, tuple) else (r, r))
            profs.append(_AxisProfile(lo, hi, rn, rp))
    else:
        M = float(np.max(f.norms())) if f.values.size else 0.0
        for ax in axes:
            dlo, dhi = _axis_interval(f.domain, ax)
            lo = f.support.lo[ax] if dlo is None else max(dlo, f.support.lo[ax])
            hi = f.support.hi[ax] if dhi is None else min(dhi, f.support.hi[ax])
            profs.append(_AxisProfile(lo, hi, 1.0, 1.0))
    return M, profs


def _geom_sum(t: float, lo: int | None, hi: int | None) -> float:
    """sum_{l=lo}^{hi} t^l with infinite ends allowed; inf if divergent."""
    if t <= 0:
        raise ValueError("ratio must be positive")
    if lo is not None and hi is not None:
        if lo > hi:
            return 0.0
        if t == 1.0:
            return float(hi - lo + 1)
        return (t**lo) * (1.0 - t ** (hi - lo + 1)) / (1.0 - t)
    if hi is None and lo is not None:
        return (t**lo) / (1.0 - t) if t < 1.0 else math.inf
    if lo is None and hi is not None:
        return (t**hi) / (1.0 - 1.0 / t) if t > 1.0 else math.inf
    return math.inf


def _pair_sum(pa: _AxisProfile, pb: _AxisProfile, k: int, lo: int | None, hi: int | None) -> float:
    """sum over l in [lo, hi] of pa.factor(k - l) * pb.factor(l).

    The summand is piecewise geometric; split the l-line at 0 and at k.
    """

    def clip(a, b, lo_, hi_):
        lo2 = a if lo_ is None else (lo_ if a is None else max(a, lo_))
        hi2 = b if hi_ is None else (hi_ if b is None else min(b, hi_))
        return lo2, hi2

    total = 0.0
    # pieces by sign of l: l < 0 uses pb.r_neg, l >= 0 uses pb.r_pos;
    # by sign of k - l: l <= k uses pa.r_pos, l > k uses pa.r_neg.
    pieces = []
    for (plo, phi, rb) in (( None, -1, pb.r_neg), (0, None, pb.r_pos)):
        for (qlo, qhi, ra) in ((None, k, pa.r_pos), (k + 1, None, pa.r_neg)):
            a, b = clip(plo, phi, qlo, qhi)
            a, b = clip(a, b, lo, hi)
            if a is not None and b is not None and a > b:
                continue
            pieces.append((a, b, ra, rb))
    for a, b, ra, rb in pieces:
        # term(l) = ra^(k-l) * rb^l = ra^k * (rb/ra)^l
        t = rb / ra
        s = _geom_sum(t, a, b)
        if math.isinf(s):
            return math.inf
        total += (ra**k) * s
    return total


def _tail_bound(
    a: SequenceTable,
    b: SequenceTable,
    k,
    a_axes: Sequence[int],
    b_axes: Sequence[int],
) -> float:
    """Bound the convolution mass outside the stored summation box at k.

    Per axis: full admissible geometric sum minus the part over the stored
    box.  Both use the same envelope factors, so the difference bounds every
    term the windowed kernel did not add.
    """
    Ma, pa = _profiles(a, a_axes)
    Mb, pb = _profiles(b, b_axes)
    if Ma == 0.0 or Mb == 0.0:
        return 0.0
    full = 1.0
    stored = 1.0
    for i, (ai, bi) in enumerate(zip(a_axes, b_axes)):
        ki = k[i]
        # admissible l-interval: l in dom_b, k - l in dom_a
        lo_d = pb[i].lo
        hi_d = pb[i].hi
        if pa[i].hi is not None:
            lo2 = ki - pa[i].hi
            lo_d = lo2 if lo_d is None else max(lo_d, lo2)
        if pa[i].lo is not None:
            hi2 = ki - pa[i].lo
            hi_d = hi2 if hi_d is None else min(hi_d, hi2)
        s_full = _pair_sum(pa[i], pb[i], ki, lo_d, hi_d)
        if math.isinf(s_full):
            return math.inf
        # stored box: l in supp(b), k - l in supp(a), intersected with admissible
        lo_s = max(b.support.lo[bi], ki - a.support.hi[ai])
        hi_s = min(b.support.hi[bi], ki - a.support.lo[ai])
        if lo_d is not None:
            lo_s = max(lo_s, lo_d)
        if hi_d is not None:
            hi_s = min(hi_s, hi_d)
        s_stored = _pair_sum(pa[i], pb[i], ki, lo_s, hi_s) if lo_s <= hi_s else 0.0
        full *= s_full
        stored *= min(s_stored, s_full)
    return Ma * Mb * max(full - stored, 0.0)


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


@dataclass
class ConvPlan:
    """Domain pair and mode of a convolution product."""

    d_a: LatticeDomain
    d_b: LatticeDomain
    mode: str = "general"  # faltung | weyl | general | axes
    axes: tuple[int, ...] | None = None  # 1-based, strictly increasing (axes mode)

    @property
    def result_domain(self) -> LatticeDomain:
        if self.mode == "axes":
            return FullLattice(self.d_b.dim)
        try:
            return minkowski_sum(self.d_a, self.d_b)
        except Exception:
            return FullLattice(self.d_b.dim)


def _mul(a_val, b_val):
    av = np.asarray(a_val)
    bv = np.asarray(b_val)
    if av.ndim == 2 and bv.ndim >= 1:
        return av @ bv
    return av * bv


def conv_general(
    a: SequenceTable,
    b: SequenceTable,
    window: Box,
    tol: float = DEFAULT_TOL,
    enforce: bool = True,
    return_ledger: bool = False,
):
    """(a * b)(k) = sum over l in dom(b) with k - l in dom(a) of a(k-l) b(l).

    Computed over the stored supports on the given output window; when an
    envelope is present the per-entry tail bound is checked against ``tol``
    (relative, with an absolute floor) unless ``enforce`` is False.
    """
    if a.dim != b.dim or window.dim != a.dim:
        raise DimensionMismatch("convolution dimension mismatch")
    n = a.dim
    out_kind = b.value_kind if a.value_kind == "scalar" else (
        b.value_kind if b.value_kind != "scalar" else a.value_kind
    )
    out_m = b.m if b.m is not None else a.m
    vshape = b.vshape if b.value_kind != "scalar" else a.vshape
    out = np.zeros(window.shape + vshape, dtype=complex)
    has_env = a.envelope is not None or b.envelope is not None
    ledger = np.zeros(window.shape) if has_env else None

    axes = tuple(range(n))
    for idx in np.ndindex(*window.shape):
        k = tuple(lo + i for lo, i in zip(window.lo, idx))
        acc = np.zeros(vshape, dtype=complex)
        for s, av in a.support_points():
            if s not in a.domain:
                continue
            l = tuple(ki - si for ki, si in zip(k, s))
            if l not in b.domain or l not in b.support:
                continue
            acc = acc + _mul(av, b.at(l))
        out[idx] = acc
        if has_env:
            t = _tail_bound(a, b, k, axes, axes)
            ledger[idx] = t
            if enforce:
                scale = max(value_norm(acc), TOL_FLOOR / max(tol, 1e-300))
                if t > max(tol * scale, TOL_FLOOR):
                    raise DivergentConvolution(
                        f"tail bound {t:.3e} at k={k} exceeds tolerance"
                    )
    domain = ConvPlan(a.domain, b.domain).result_domain
    table = SequenceTable(domain, window, out, out_kind, out_m)
    return (table, ledger) if return_ledger else table


def conv_axes(
    a: SequenceTable,
    b: SequenceTable,
    axes: Sequence[int],
    window: Box,
    tol: float = DEFAULT_TOL,
    enforce: bool = True,
    return_ledger: bool = False,
):
    """Convolve along the 1-based axis subset only, passing the rest through.

    a is l-dimensional (l = len(axes)); the empty subset returns b unchanged.
    """
    axes = tuple(int(j) for j in axes)
    if len(axes) == 0:
        return (b, np.zeros(b.support.shape)) if return_ledger else b
    if list(axes) != sorted(set(axes)) or axes[0] < 1 or axes[-1] > b.dim:
        raise ValueError(f"axes must be strictly increasing in 1..{b.dim}")
    if a.dim != len(axes):
        raise DimensionMismatch("kernel dimension must equal number of axes")
    if a.value_kind != "scalar":
        raise ValueError("axes-mode kernel must be scalar")
    if window.dim != b.dim:
        raise DimensionMismatch("window dimension mismatch")
    ax0 = tuple(j - 1 for j in axes)
    has_env = a.envelope is not None or b.envelope is not None
    out = np.zeros(window.shape + b.vshape, dtype=complex)
    ledger = np.zeros(window.shape) if has_env else None

    for idx in np.ndindex(*window.shape):
        k = tuple(lo + i for lo, i in zip(window.lo, idx))
        acc = np.zeros(b.vshape, dtype=complex)
        for s, av in a.support_points():
            if s not in a.domain:
                continue
            l = list(k)
            for si, j in zip(s, ax0):
                l[j] = k[j] - si
            l = tuple(l)
            if l not in b.domain or l not in b.support:
                continue
            acc = acc + np.asarray(b.at(l)) * av
        out[idx] = acc
        if has_env:
            ksub = tuple(k[j] for j in ax0)
            t = _tail_bound(a, b, ksub, tuple(range(a.dim)), ax0)
            # pass-through coordinates scale b's envelope factors
            if b.envelope is not None:
                for j in range(b.dim):
                    if j not in ax0:
                        t *= b.envelope.axis_factor(j, k[j])
            ledger[idx] = t
            if enforce:
                scale = max(value_norm(acc), TOL_FLOOR / max(tol, 1e-300))
                if t > max(tol * scale, TOL_FLOOR):
                    raise DivergentConvolution(
                        f"tail bound {t:.3e} at k={k} exceeds tolerance"
                    )
    table = SequenceTable(FullLattice(b.dim), window, out, b.value_kind, b.m)
    return (table, ledger) if return_ledger else table


# ---------------------------------------------------------------------------
# Transform-side check
# ---------------------------------------------------------------------------


def support_minkowski(a: SequenceTable, b: SequenceTable) -> Box:
    lo = tuple(x + y for x, y in zip(a.support.lo, b.support.lo))
    hi = tuple(x + y for x, y in zip(a.support.hi, b.support.hi))
    return Box(lo, hi)


def conv_theorem_check(
    a: SequenceTable,
    b: SequenceTable,
    z_points: Sequence[Sequence[complex]],
    axes: Sequence[int] | None = None,
) -> dict:
    """Max relative deviation of F_{a*b}(z) against F_a F_b at the points.

    In axes mode F_a is evaluated at the axis sub-tuple of z.  Both factors
    must be finitely supported so the product table is exact on the Minkowski
    window.
    """
    if a.envelope is not None or b.envelope is not None:
        raise DivergentConvolution("theorem check requires finite-support factors")
    if axes is None:
        window = support_minkowski(a, b)
        prod = conv_general(a, b, window)
    else:
        ax0 = tuple(j - 1 for j in axes)
        lo = list(b.support.lo)
        hi = list(b.support.hi)
        for i, j in enumerate(ax0):
            lo[j] += a.support.lo[i]
            hi[j] += a.support.hi[i]
        window = Box(tuple(lo), tuple(hi))
        prod = conv_axes(a, b, axes, window)
    worst = 0.0
    for z in z_points:
        z = tuple(complex(c) for c in z)
        lhs = np.asarray(eval_forward(prod, z))
        if axes is None:
            fa = eval_forward(a, z)
        else:
            fa = eval_forward(a, tuple(z[j - 1] for j in axes))
        rhs = np.asarray(eval_forward(b, z)) * fa
        denom = max(value_norm(rhs), 1e-30)
        worst = max(worst, value_norm(lhs - rhs) / denom)
    return {"max_rel_deviation": worst, "points": len(list(z_points))}
