"""Krylov rows of the last standard basis vector, their determinant, the
open locus where that determinant is nonzero, companion matrices, the
mirabolic subgroup P (last row (0, ..., 0, 1)), and the conjugation
procedure that moves any regular matrix into the locus.

The determinant of the rows e_n, e_n x, ..., e_n x^(n-1) is written D(x)
throughout, matching the analysis-JSON key ``"D"``.  D is a homogeneous
polynomial of degree n(n-1)/2 in the entries of x, transforms under
conjugation by y in P as D(y x y^-1) = det(y)^-1 D(x), and is nonzero
exactly when e_n is a cyclic row vector for x.  Conventions for n = 1:
the Krylov matrix is [1], D is identically 1, every element is regular,
and P is the trivial group.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .exactmat import (
    ExactmatError,
    RatMatrix,
    RatVector,
    SingularMatrixError,
    UniPoly,
    determinant,
    inverse,
    min_poly,
    power,
)
from .invariants import basis_matrix, trace_form


class NotInPError(ExactmatError):
    """Last row is not (0, ..., 0, 1)."""


class SearchExhausted(ExactmatError):
    """Random cyclic-row search hit its retry budget on a regular matrix."""


@dataclass(frozen=True)
class NotRegular:
    """Returned when no cyclic row exists; carries the minimal polynomial
    whose degree < n witnesses the failure."""

    min_poly: UniPoly


@dataclass(frozen=True)
class CompanionSpec:
    """Coefficient vector (a1, ..., an) of a companion matrix."""

    alpha: tuple

    def __init__(self, alpha: Sequence):
        if len(alpha) < 1:
            raise ExactmatError("companion spec must have length >= 1")
        object.__setattr__(self, "alpha", tuple(Fraction(a) for a in alpha))

    @property
    def n(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class PGroupElement:
    """Invertible matrix whose last row is (0, ..., 0, 1)."""

    matrix: RatMatrix

    def __post_init__(self):
        _validate_p(self.matrix)

    @property
    def n(self) -> int:
        return self.matrix.n

    def det(self) -> Fraction:
        return determinant(self.matrix)


@dataclass(frozen=True)
class KrylovMatrix:
    """Rows e_n x^k, k = 0..n-1, top to bottom, plus the matrix they came from."""

    base: RatMatrix
    rows: RatMatrix

    def __post_init__(self):
        n = self.base.n
        row = RatVector.unit(n, n)
        for k in range(n):
            if self.rows.row(k + 1) != row:
                raise ExactmatError(f"Krylov row {k} violates the row recurrence")
            row = row * self.base


def krylov_matrix(x: RatMatrix) -> KrylovMatrix:
    """Build the Krylov rows by repeated row-times-matrix products.

    Never forms matrix powers: each row is the previous row times x,
    n * n^2 scalar multiplications in total.
    """
    n = x.n
    row = RatVector.unit(n, n)
    rows = [row]
    for _ in range(n - 1):
        row = row * x
        rows.append(row)
    return KrylovMatrix(base=x, rows=RatMatrix.from_rows(rows))


def krylov_determinant(x: RatMatrix) -> Fraction:
    """D(x), the determinant of the Krylov rows of e_n."""
    return determinant(krylov_matrix(x).rows)


def pairing_matrix(x: RatMatrix) -> RatMatrix:
    """The matrix with (k+1, j) entry tr(x^k E_jn), built from explicit
    matrix powers and literal trace pairings.

    An independent construction of the same matrix as krylov_matrix; the
    two determinants are compared exactly in the verification suites.
    """
    n = x.n
    rows = []
    for k in range(n):
        xk = power(x, k)
        rows.append(
            [trace_form(xk, basis_matrix(n, j, n)) for j in range(1, n + 1)]
        )
    return RatMatrix(rows)


def pairing_determinant(x: RatMatrix) -> Fraction:
    """D(x) computed from the trace-pairing construction."""
    return determinant(pairing_matrix(x))


def in_omega(x: RatMatrix) -> bool:
    """Exact test D(x) != 0, i.e. e_n is a cyclic row vector for x."""
    return krylov_determinant(x) != 0


def companion(spec: CompanionSpec) -> RatMatrix:
    """Companion matrix with subdiagonal 1s and last column a_n, ..., a_1
    top to bottom; its characteristic polynomial is
    t^n - a1 t^(n-1) - ... - an."""
    n = spec.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = Fraction(1)
    for i in range(n):
        rows[i][n - 1] = rows[i][n - 1] + spec.alpha[n - 1 - i]
    return RatMatrix(rows)


def companion_sign(n: int) -> int:
    """D at any companion matrix: (-1)^(n(n-1)/2), the parity of the row
    reversal hidden in the anti-unitriangular Krylov matrix."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


def is_regular(x: RatMatrix) -> bool:
    """True iff the minimal polynomial has full degree n."""
    return min_poly(x).degree == x.n


def _validate_p(y: RatMatrix):
    n = y.n
    last = y.rows[n - 1]
    if any(last[j] != 0 for j in range(n - 1)) or last[n - 1] != 1:
        raise NotInPError(f"last row {[str(e) for e in last]} is not e_n")
    if determinant(y) == 0:
        raise SingularMatrixError("matrix in P candidate is singular")


def p_check(y: RatMatrix) -> PGroupElement:
    """Wrap y after verifying last row = e_n and det(y) != 0."""
    return PGroupElement(matrix=y)


def transformation_law(
    x: RatMatrix, y: Union[PGroupElement, RatMatrix]
) -> tuple[Fraction, Fraction]:
    """Return (D(y x y^-1), det(y)^-1 D(x)); the two are equal for y in P."""
    if isinstance(y, RatMatrix):
        y = p_check(y)
    ym = y.matrix
    conjugated = ym * x * inverse(ym)
    return krylov_determinant(conjugated), krylov_determinant(x) / y.det()


def homogeneity_check(x: RatMatrix, t) -> tuple[Fraction, Fraction]:
    """Return (D(t x), t^(n(n-1)/2) D(x)); the two are equal."""
    t = Fraction(t)
    e = x.n * (x.n - 1) // 2
    return krylov_determinant(x.scale(t)), t**e * krylov_determinant(x)


def _cyclic_det(w: RatVector, x: RatMatrix) -> Fraction:
    rows = [w]
    for _ in range(x.n - 1):
        rows.append(rows[-1] * x)
    return determinant(RatMatrix.from_rows(rows))


def find_cyclic_row(
    x: RatMatrix, seed: int = 0, max_tries: int = 64
) -> Union[RatVector, NotRegular]:
    """Search for a row w with det(w, wx, ..., wx^(n-1)) != 0.

    Returns NotRegular (with the minimal polynomial as witness) when the
    minimal polynomial has degree < n, since no cyclic row exists then.
    Otherwise tries e_n first, then the remaining standard basis rows,
    then random integer rows with entries in [-m, m], doubling m every
    eight draws; deterministic given the seed.  Raises SearchExhausted
    after max_tries random draws, which has probability zero in exact
    arithmetic but remains reportable.
    """
    n = x.n
    mp = min_poly(x)
    if mp.degree < n:
        return NotRegular(min_poly=mp)
    for i in [n] + list(range(1, n)):
        w = RatVector.unit(n, i)
        if _cyclic_det(w, x) != 0:
            return w
    rng = random.Random(seed)
    m = 1
    for tries in range(max_tries):
        if tries and tries % 8 == 0:
            m *= 2
        w = RatVector([rng.randint(-m, m) for _ in range(n)])
        if w.is_zero():
            continue
        if _cyclic_det(w, x) != 0:
            return w
    raise SearchExhausted(f"no cyclic row found in {max_tries} random draws")


def _complete_to_invertible(w: RatVector) -> RatMatrix:
    """Deterministic completion: standard basis rows are added greedily in
    index order while they grow the rank, then w goes in as the last row."""
    n = w.n
    chosen: list[RatVector] = []
    for i in range(1, n + 1):
        if len(chosen) == n - 1:
            break
        candidate = RatVector.unit(n, i)
        sub = [v.entries for v in chosen + [candidate, w]]
        if _rows_independent(sub):
            chosen.append(candidate)
    return RatMatrix.from_rows(chosen + [w])


def _rows_independent(rows: list[tuple]) -> bool:
    work = [list(r) for r in rows]
    ncols = len(work[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(r + 1, len(work)):
            if work[i][c] != 0:
                f = work[i][c] / work[r][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
    return r == len(rows)


def conjugate_into_omega(
    x: RatMatrix, seed: int = 0, max_tries: int = 64
) -> Union[RatMatrix, NotRegular]:
    """Find invertible g with D(g x g^-1) != 0, verified exactly.

    Returns the identity when D(x) != 0 already, and NotRegular when the
    minimal polynomial of x has degree < n (no conjugate of x ever has a
    nonzero Krylov determinant).  Otherwise completes a cyclic row w to an
    invertible g whose last row is w, so that e_n (g x g^-1)^k = w x^k g^-1
    and the Krylov determinant picks up only the factor det(g^-1).
    """
    if in_omega(x):
        return RatMatrix.identity(x.n)
    w = find_cyclic_row(x, seed=seed, max_tries=max_tries)
    if isinstance(w, NotRegular):
        return w
    g = _complete_to_invertible(w)
    conjugated = g * x * inverse(g)
    if not in_omega(conjugated):  # pragma: no cover - guarded by construction
        raise AssertionError("postcondition D(g x g^-1) != 0 failed")
    return g
