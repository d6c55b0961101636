"""Cesaro kernels, forward differences, and Weyl-type fractional operators.

The Cesaro kernel of order alpha is the ratio Gamma(k + alpha) / (Gamma(alpha)
k!), generated here by its first-order recurrence so it never overflows.  The
Weyl derivative convolves an N0 kernel against a two-sided sequence; composing
it with the m-th forward difference gives the (kernel, m) fractional
derivative, which for kernel c^(m - alpha), m = ceil(alpha), is the classical
Weyl fractional derivative of order alpha.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .convolution import conv_general
from .errors import DimensionMismatch, InsufficientWindow
from .lattice import Box, Envelope, SequenceTable, nonneg_orthant, value_norm
from .ztransform import eval_forward

CESARO_ENVELOPE_EPS = 0.05  # envelope rate 1 + eps; any eps > 0 is valid


def cesaro_values(alpha: float, K: int) -> np.ndarray:
    """c^alpha(0..K) by the recurrence c(k) = c(k-1) * (k - 1 + alpha) / k."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    out = np.empty(K + 1)
    out[0] = 1.0
    if alpha == 0.0:
        out[1:] = 0.0
        return out
    for k in range(1, K + 1):
        out[k] = out[k - 1] * (k - 1 + alpha) / k
    return out


def cesaro(alpha: float, K: int) -> SequenceTable:
    """Cesaro kernel table on N0 with a geometric envelope.

    The sequence grows like k^(alpha-1)/Gamma(alpha), so any rate 1 + eps
    dominates eventually; the constant is the exact maximum of
    c^alpha(k) / (1+eps)^k, scanned past the window up to the turning point.
    """
    vals = cesaro_values(alpha, K)
    rate = 1.0 + CESARO_ENVELOPE_EPS
    # ratio c(k)/rate^k peaks near k* = (alpha - 1)/log(rate); scan that far
    k_star = max(K, int((max(alpha, 1.0)) / math.log(rate)) + 2)
    scan = cesaro_values(alpha, k_star)
    M = float(np.max(scan / rate ** np.arange(k_star + 1))) if alpha > 0 else 1.0
    return SequenceTable(
        nonneg_orthant(1),
        Box((0,), (K,)),
        vals.astype(complex),
        envelope=Envelope(M, (rate,)),
    )


def cesaro_asymptote(alpha: float, k) -> np.ndarray:
    """k^(alpha-1) / Gamma(alpha), the continuous-kernel analogue."""
    k = np.asarray(k, dtype=float)
    return k ** (alpha - 1.0) / math.gamma(alpha)


def _window_box(window) -> Box:
    if isinstance(window, Box):
        return window
    lo, hi = window
    if np.isscalar(lo):
        return Box((int(lo),), (int(hi),))
    return Box(tuple(lo), tuple(hi))


def forward_difference(f: SequenceTable, m: int, window) -> SequenceTable:
    """(Delta^m f)(k) = sum_j (-1)^(m-j) C(m, j) f(k+j), 1-D only."""
    if f.dim != 1:
        raise DimensionMismatch("forward difference is one-dimensional")
    if m < 0:
        raise ValueError("difference order must be >= 0")
    window = _window_box(window)
    top = window.hi[0] + m
    if top > f.support.hi[0] and f.envelope is not None:
        # beyond the stored window a truncated infinite sequence is unknown,
        # not zero; finite-support tables are exactly zero there
        raise InsufficientWindow(
            f"window needs f up to {top}, stored up to {f.support.hi[0]}"
        )
    coeffs = [(-1) ** (m - j) * math.comb(m, j) for j in range(m + 1)]

    def fn(k):
        acc = np.zeros(f.vshape, dtype=complex)
        for j, c in enumerate(coeffs):
            acc = acc + c * np.asarray(f.at((k[0] + j,)))
        return acc

    return SequenceTable.from_function(
        f.domain, window, fn, f.value_kind, f.m
    )


def weyl_derivative(
    a: SequenceTable,
    f: SequenceTable,
    window,
    tol: float = 1e-12,
    enforce: bool = True,
    return_ledger: bool = False,
):
    """(D_{W,a} f)(k) = sum_{s>=0} a(s) f(k-s), truncated at the kernel window.

    Delegates to the general product with the (N0, Z) domain pair; the
    envelope tail of the truncation is ledgered per entry.
    """
    if a.dim != 1 or f.dim != 1:
        raise DimensionMismatch("Weyl derivative is one-dimensional")
    return conv_general(
        a, f, _window_box(window), tol=tol, enforce=enforce, return_ledger=return_ledger
    )


def weyl_am(
    a: SequenceTable,
    m: int,
    f: SequenceTable,
    window,
    tol: float = 1e-12,
    enforce: bool = True,
):
    """(D_{W,a,m} f) = Delta^m (D_{W,a} f) on the window."""
    window = _window_box(window)
    inner = Box((window.lo[0],), (window.hi[0] + m,))
    g = weyl_derivative(a, f, inner, tol=tol, enforce=enforce)
    return forward_difference(g, m, window)


def weyl_fractional(alpha: float, f: SequenceTable, window, kernel_len: int = 256):
    """Weyl fractional derivative of order alpha: kernel c^(m-alpha), m = ceil."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    m = math.ceil(alpha)
    return weyl_am(cesaro(m - alpha, kernel_len), m, f, window)


def weyl_transform_identity_check(
    a: SequenceTable,
    m: int,
    u: SequenceTable,
    z_points: Sequence[complex],
    out_window: Box | None = None,
) -> dict:
    """Deviation of F_{D_{W,a,m} u} from sum_j (-1)^(m-j) C(m,j) z^j F_a F_u.

    The derivative sequence inherits the kernel's polynomial growth, so its
    transform is evaluated on a long window; the kernel envelope bounds the
    remainder, which is folded into the reported deviation tolerance.
    """
    if u.envelope is not None:
        raise ValueError("identity check expects finitely supported u")
    if out_window is None:
        lo = u.support.lo[0] - m
        hi = u.support.hi[0] + a.support.hi[0]
        out_window = Box((lo,), (hi,))
    d = weyl_am(a, m, u, out_window, enforce=False)
    worst = 0.0
    for z in z_points:
        z = complex(z[0]) if isinstance(z, (tuple, list)) else complex(z)
        lhs = np.asarray(eval_forward(d, (z,)))
        fa = eval_forward(a, (z,))
        fu = np.asarray(eval_forward(u, (z,)))
        pref = sum(
            (-1) ** (m - j) * math.comb(m, j) * z**j for j in range(m + 1)
        )
        rhs = pref * fa * fu
        denom = max(value_norm(rhs), 1e-30)
        worst = max(worst, value_norm(lhs - rhs) / denom)
    return {"max_rel_deviation": worst, "points": len(list(z_points))}
