"""Scalar fields on matrix space: expression trees with node kinds
const, var(i,j), add, mul, pow, pk(k).

A ``Pk(k)`` node denotes the built-in conjugation invariant tr(x^k)/k.
Every tree is a polynomial in the matrix entries, so each field admits an
exact expansion to a MultiPoly (used for formal gradients) as well as
generic numeric evaluation.  Evaluation is duck-typed over the entry
scalars: exact with Fraction entries, fast with floats or numpy arrays.

JSON wire format (shared by the invariant and calculus layers)::

    {"kind": "const", "value": "3/2"}
    {"kind": "var", "i": 1, "j": 2}
    {"kind": "add", "args": [...]}        # n-ary
    {"kind": "mul", "args": [...]}
    {"kind": "pow", "base": {...}, "exp": 3}
    {"kind": "pk", "k": 2}
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .exactmat import RatMatrix, format_rational, parse_rational
from .sympoly import MultiPoly, trace_power_poly, var_index


class FieldError(ValueError):
    pass


class ScalarField:
    """Base class; concrete nodes below."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(ScalarField):
    value: Fraction

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))


@dataclass(frozen=True)
class Var(ScalarField):
    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1:
            raise FieldError(f"var indices ({self.i},{self.j}) must be >= 1")


@dataclass(frozen=True)
class Add(ScalarField):
    args: tuple

    def __init__(self, args: Sequence[ScalarField]):
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Mul(ScalarField):
    args: tuple

    def __init__(self, args: Sequence[ScalarField]):
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Pow(ScalarField):
    base: ScalarField
    exp: int

    def __post_init__(self):
        if self.exp < 0:
            raise FieldError(f"pow exponent {self.exp} must be >= 0")


@dataclass(frozen=True)
class Pk(ScalarField):
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise FieldError(f"pk degree {self.k} must be >= 1")


def max_var_index(field: ScalarField) -> int:
    """Largest 1-based entry index referenced anywhere in the tree."""
    if isinstance(field, Var):
        return max(field.i, field.j)
    if isinstance(field, (Add, Mul)):
        return max((max_var_index(a) for a in field.args), default=0)
    if isinstance(field, Pow):
        return max_var_index(field.base)
    return 0


def _mat_mul(a, b, n):
    return [
        [sum(a[i][l] * b[l][j] for l in range(n)) for j in range(n)]
        for i in range(n)
    ]


def evaluate_on_entries(field: ScalarField, entries, lift: Callable = float):
    """Recursive evaluation over an n x n nested sequence of scalars.

    ``lift`` converts Const values into the scalar domain: ``float`` for the
    numeric layer, identity for exact evaluation.  Scalars only need +, *
    and integer **, so numpy arrays broadcast through unchanged.
    """
    n = len(entries)

    def rec(node: ScalarField):
        if isinstance(node, Const):
            return lift(node.value)
        if isinstance(node, Var):
            if node.i > n or node.j > n:
                raise FieldError(f"var({node.i},{node.j}) out of range for n={n}")
            return entries[node.i - 1][node.j - 1]
        if isinstance(node, Add):
            total = lift(Fraction(0))
            for a in node.args:
                total = total + rec(a)
            return total
        if isinstance(node, Mul):
            total = lift(Fraction(1))
            for a in node.args:
                total = total * rec(a)
            return total
        if isinstance(node, Pow):
            return rec(node.base) ** node.exp
        if isinstance(node, Pk):
            acc = entries
            for _ in range(node.k - 1):
                acc = _mat_mul(acc, entries, n)
            tr = acc[0][0]
            for i in range(1, n):
                tr = tr + acc[i][i]
            return tr * lift(Fraction(1, node.k))
        raise FieldError(f"unknown node {node!r}")

    return rec(field)


def evaluate_exact(field: ScalarField, x: RatMatrix) -> Fraction:
    """Exact rational evaluation."""
    return evaluate_on_entries(field, x.rows, lift=lambda c: c)


def to_multipoly(field: ScalarField, n: int) -> MultiPoly:
    """Expand the field into an explicit polynomial in the n^2 entries."""
    nvars = n * n
    if isinstance(field, Const):
        return MultiPoly.const(nvars, field.value)
    if isinstance(field, Var):
        if field.i > n or field.j > n:
            raise FieldError(f"var({field.i},{field.j}) out of range for n={n}")
        return MultiPoly.variable(nvars, var_index(n, field.i, field.j))
    if isinstance(field, Add):
        total = MultiPoly(nvars)
        for a in field.args:
            total = total + to_multipoly(a, n)
        return total
    if isinstance(field, Mul):
        total = MultiPoly.const(nvars, 1)
        for a in field.args:
            total = total * to_multipoly(a, n)
        return total
    if isinstance(field, Pow):
        return to_multipoly(field.base, n) ** field.exp
    if isinstance(field, Pk):
        return trace_power_poly(n, field.k)
    raise FieldError(f"unknown node {field!r}")


def field_to_json(field: ScalarField) -> dict:
    if isinstance(field, Const):
        return {"kind": "const", "value": format_rational(field.value)}
    if isinstance(field, Var):
        return {"kind": "var", "i": field.i, "j": field.j}
    if isinstance(field, Add):
        return {"kind": "add", "args": [field_to_json(a) for a in field.args]}
    if isinstance(field, Mul):
        return {"kind": "mul", "args": [field_to_json(a) for a in field.args]}
    if isinstance(field, Pow):
        return {"kind": "pow", "base": field_to_json(field.base), "exp": field.exp}
    if isinstance(field, Pk):
        return {"kind": "pk", "k": field.k}
    raise FieldError(f"unknown node {field!r}")


def field_from_json(obj) -> ScalarField:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FieldError(f"field JSON node must be an object with a kind: {obj!r}")
    kind = obj["kind"]
    if kind == "const":
        return Const(parse_rational(obj["value"]))
    if kind == "var":
        return Var(i=int(obj["i"]), j=int(obj["j"]))
    if kind == "add":
        return Add([field_from_json(a) for a in obj["args"]])
    if kind == "mul":
        return Mul([field_from_json(a) for a in obj["args"]])
    if kind == "pow":
        exp = int(obj["exp"])
        return Pow(base=field_from_json(obj["base"]), exp=exp)
    if kind == "pk":
        return Pk(k=int(obj["k"]))
    raise FieldError(f"unknown field node kind {kind!r}")


# -- generators used by the verification suites ------------------------------

_INVARIANT_MONOMIALS = {
    # exponent tuples (e1, e2, e3) on (p1, p2, p3); weighted degree <= 3
    2: [(1, 0), (2, 0), (0, 1), (3, 0), (1, 1)],
    3: [(1, 0, 0), (2, 0, 0), (0, 1, 0), (3, 0, 0), (1, 1, 0), (0, 0, 1)],
}

_COEFS = [
    Fraction(1),
    Fraction(-1),
    Fraction(2),
    Fraction(-2),
    Fraction(1, 2),
    Fraction(-1, 2),
]


def random_invariant_field(n: int, rng: random.Random) -> ScalarField:
    """Random polynomial in the trace powers p_1..p_n.

    Monomials are capped at weighted degree 3 (degree of p_k counted as k)
    and coefficients at |c| <= 2 so that finite-difference checks on
    entries in [-2, 2] stay far inside the documented tolerances.
    """
    monos = _INVARIANT_MONOMIALS.get(n)
    if monos is None:
        monos = [
            tuple(int(t == k) for t in range(n)) for k in range(n)
        ] + [(2,) + (0,) * (n - 1)]
    terms = []
    for mono in rng.sample(monos, rng.randint(1, min(3, len(monos)))):
        factors: list[ScalarField] = [Const(rng.choice(_COEFS))]
        for k, e in enumerate(mono, start=1):
            if e == 1:
                factors.append(Pk(k))
            elif e > 1:
                factors.append(Pow(Pk(k), e))
        terms.append(Mul(factors) if len(factors) > 1 else factors[0])
    return Add(terms) if len(terms) > 1 else terms[0]


def random_polynomial_field(n: int, rng: random.Random) -> ScalarField:
    """Random low-degree polynomial in individual entries; generically not
    conjugation invariant."""
    terms = []
    for _ in range(rng.randint(1, 3)):
        factors: list[ScalarField] = [Const(rng.choice(_COEFS))]
        for _ in range(rng.randint(1, 2)):
            v = Var(rng.randint(1, n), rng.randint(1, n))
            e = rng.randint(1, 2)
            factors.append(v if e == 1 else Pow(v, e))
        terms.append(Mul(factors))
    return Add(terms) if len(terms) > 1 else terms[0]


def bump_field(n: int, half_width, prefactor: ScalarField | None = None) -> ScalarField:
    """Test function that vanishes to second order on the cube boundary
    |x_ij| = half_width: prefactor * prod_ij ((a^2 - x_ij^2)/a^2)^2."""
    a = Fraction(half_width)
    if a <= 0:
        raise FieldError("half_width must be positive")
    inv_a2 = Fraction(1) / (a * a)
    factors: list[ScalarField] = []
    if prefactor is not None:
        factors.append(prefactor)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            wall = Add([Const(1), Mul([Const(-inv_a2), Pow(Var(i, j), 2)])])
            factors.append(Pow(wall, 2))
    return Mul(factors)
