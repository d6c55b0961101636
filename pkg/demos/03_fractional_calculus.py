"""Cesaro kernels and Weyl-type fractional differences.

Demonstrates the semigroup property of the Cesaro family, the power-law
asymptote of the kernel, and that the half derivative applied twice agrees
with the ordinary forward difference.
"""

import numpy as np

from zlattice import (
    Box,
    Envelope,
    FullLattice,
    SequenceTable,
    cesaro,
    cesaro_asymptote,
    conv_general,
    forward_difference,
    weyl_fractional,
)


def main():
    K = 40
    a, b = cesaro(0.4, K), cesaro(0.6, K)
    prod = conv_general(a, b, Box((0,), (K,)), enforce=False)
    ref = cesaro(1.0, K)
    dev = np.max(np.abs(prod.values - ref.values))
    print(f"semigroup: c^0.4 * c^0.6 vs c^1.0, max dev {dev:.3e}")

    ks = np.array([10, 100, 1000])
    c = cesaro(0.5, 1000)
    ratio = c.values.real[ks] / cesaro_asymptote(0.5, ks)
    print("c^0.5(k) / (k^-0.5 / Gamma(0.5)) at k=10,100,1000:", np.round(ratio, 4))

    # half derivative twice on a two-sided geometric sequence; each half
    # order carries one forward difference, so the composition equals the
    # ordinary difference advanced by one step
    K = 200
    k = np.arange(-K, K + 1)
    f = SequenceTable(
        FullLattice(1), Box((-K,), (K,)), (0.5 ** np.abs(k)).astype(complex),
        envelope=Envelope(1.0, ((2.0, 0.5),)),
    )
    half = weyl_fractional(0.5, f, (-180, 22), kernel_len=150)
    # certify a decay envelope for the intermediate table so the second
    # application can bound its kernel-truncation tail
    ks = np.arange(-180, 23)
    fac = np.where(ks >= 0, 0.5**ks, 2.0**ks.astype(float))
    half.envelope = Envelope(
        float(np.max(np.abs(half.values) / fac)), ((2.0, 0.5),)
    )
    twice = weyl_fractional(0.5, half, (-3, 20), kernel_len=150)
    delta = forward_difference(f, 1, (-2, 21))
    dev = np.max(np.abs(twice.values - delta.values))
    print(f"D^0.5 D^0.5 f vs Delta f shifted by one: max dev {dev:.3e}")


if __name__ == "__main__":
    main()
