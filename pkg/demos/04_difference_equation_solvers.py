"""Green functions and resolvent kernels for linear difference equations.

Solves a diagonal scaling recurrence on the 2-D lattice through its Green
function, then a fractional-order Volterra equation through the resolvent
of its Weyl symbol, checking residuals against the reported error ledger.
"""

import numpy as np

from zlattice import Box, green_function, residual, solve
from zlattice.fixtures import (
    gaussian_table,
    scaling_pencil,
    weyl_fractional_problem,
)
from zlattice.lattice import SequenceTable


def main():
    # A u(k+1, l+1) - u(k, l) = f(k, l), A = diag(2, 3)
    P = scaling_pencil()
    G = green_function(P, (1.0, 1.0), Box((0, 0), (14, 14)))
    diag = [np.asarray(G.table.at((j, j)))[0, 0].real for j in range(1, 5)]
    print("Green function diagonal (expect 2^-j):", np.round(diag, 6))

    f = gaussian_table(2, 10)
    sol = solve(P, f, (1.0, 1.0), Box((0, 0), (16, 16)), Box((0, 0), (12, 12)))
    rep = residual(P, sol.u, f, Box((1, 1), (10, 10)))
    print(f"2-D solve: residual {rep['max_residual']:.3e}, ledger {sol.ledger:.3e}")

    # fractional Volterra equation driven by a unit impulse
    S = weyl_fractional_problem(0.5, np.eye(1))
    d = SequenceTable.delta(1)
    fsol = solve(S, d, (1.3,), Box((0,), (80,)), Box((0,), (48,)))
    frep = residual(S, fsol.u, d, Box((4,), (32,)))
    print(
        f"Weyl order-0.5 solve: residual {frep['max_residual']:.3e}, "
        f"ledger {fsol.ledger:.3e}"
    )


if __name__ == "__main__":
    main()
