"""Trace-form pairing on gl(n), trace-power invariants and their
gradients, and the exact basis-expansion identity
sum_ij tr(x^k E_ji) [E_ij, x] = 0.

Gradient convention: with the pairing B(x, y) = tr(xy), the gradient
matrix of a scalar field f has (i, j) entry df/dx_ji.  This is locked by
the identity grad of tr(x^2)/2 = x and verified against finite
differences in the calculus layer.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .exactmat import (
    DimensionMismatchError,
    ExactmatError,
    RatMatrix,
    commutator,
    power,
)
from .fields import ScalarField, to_multipoly
from .sympoly import poly_eval, var_index


@lru_cache(maxsize=None)
def basis_matrix(n: int, i: int, j: int) -> RatMatrix:
    """Elementary matrix E_ij (1-based): single 1 at entry (i, j).

    The trace-form dual of E_ij is E_ji, an identity exercised by the
    Gram-matrix test in the property suites.
    """
    if not (1 <= i <= n and 1 <= j <= n):
        raise ExactmatError(f"basis index ({i},{j}) out of range 1..{n}")
    return RatMatrix(
        [
            [Fraction(int(a == i - 1 and b == j - 1)) for b in range(n)]
            for a in range(n)
        ]
    )


def trace_form(x: RatMatrix, y: RatMatrix) -> Fraction:
    """B(x, y) = tr(xy), computed as the standard bilinear sum."""
    if x.n != y.n:
        raise DimensionMismatchError(f"dimension {x.n} vs {y.n}")
    n = x.n
    return sum(
        (x.rows[a][c] * y.rows[c][a] for a in range(n) for c in range(n)),
        Fraction(0),
    )


def trace_power(x: RatMatrix, k: int) -> Fraction:
    """The invariant tr(x^k)/k, k >= 1."""
    if k < 1:
        raise ExactmatError(f"trace power index {k} must be >= 1")
    return power(x, k).trace() / k


def trace_power_gradient(x: RatMatrix, k: int) -> RatMatrix:
    """Gradient of tr(x^k)/k with respect to the trace form: x^(k-1).

    Pairing the result against any direction v via trace_form gives the
    directional derivative of trace_power at x along v.
    """
    if k < 1:
        raise ExactmatError(f"trace power index {k} must be >= 1")
    return power(x, k - 1)


def entry_bracket_pairing(x: RatMatrix, k: int, i: int, j: int) -> Fraction:
    """tr(x^k E_ji), which equals entry (i, j) of x^k."""
    return trace_form(power(x, k), basis_matrix(x.n, j, i))


def basis_expansion_residual(x: RatMatrix, k: int) -> RatMatrix:
    """Brute-force sum over all n^2 basis pairs of
    tr(x^k E_ji) [E_ij, x]; identically the zero matrix.

    The sum telescopes to [x^k, x] = 0, but it is assembled literally,
    pair by pair, so exact cancellation is what the suites certify.
    """
    if k < 0:
        raise ExactmatError(f"power index {k} must be >= 0")
    n = x.n
    xk = power(x, k)
    acc = RatMatrix.zeros(n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            coef = trace_form(xk, basis_matrix(n, j, i))
            if coef != 0:
                acc = acc + commutator(basis_matrix(n, i, j), x).scale(coef)
    return acc


def gradient_matrix(f: ScalarField, x: RatMatrix) -> RatMatrix:
    """Exact gradient of a polynomial field at x under the trace form.

    Expands f in the entry variables, takes formal partials, and places
    df/dx_ji at position (i, j).
    """
    n = x.n
    p = to_multipoly(f, n)
    return RatMatrix(
        [
            [
                poly_eval(p.partial(var_index(n, j, i)), x)
                for j in range(1, n + 1)
            ]
            for i in range(1, n + 1)
        ]
    )


def gradient_commutator_residual(f: ScalarField, x: RatMatrix) -> RatMatrix:
    """[grad f(x), x], exactly; zero whenever f is a polynomial in the
    trace powers p_1..p_n."""
    return commutator(gradient_matrix(f, x), x)
