"""Floating-point layer: finite-difference directional and Lie
derivatives, the reduced linear system in the last-row bracket
derivatives, and a quadrature analogue of the weak (distributional) form
of local invariance.

All derivative estimates use central differences, (f(x+hv) - f(x-hv))/2h.
Checks that depend on the Krylov determinant being nonzero are gated away
from the hypersurface by the ``delta`` cutoff, since finite differences
degrade as the determinant approaches zero.  Scalar fields built from
trace powers are exactly invariant, so their Lie derivatives measure pure
finite-difference noise; the default tolerances are sized for entries
clamped to [-2, 2] at h = 1e-5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .exactmat import RatMatrix
from .fields import ScalarField, evaluate_on_entries
from .invariants import basis_matrix
from .krylov import krylov_determinant


class CalculusError(ValueError):
    pass


class PreconditionViolated(CalculusError):
    """The Krylov determinant at x is inside the safety cutoff."""


class BoundaryLeak(CalculusError):
    """Test function does not vanish near the integration-box boundary."""


@dataclass(frozen=True)
class FloatMatrix:
    """Square float64 matrix with finite entries."""

    entries: np.ndarray

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise CalculusError(f"expected square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise CalculusError("matrix entries must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_rat(cls, x: RatMatrix) -> "FloatMatrix":
        return cls([[float(e) for e in row] for row in x.rows])


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference step, scheme, and tolerance schedule."""

    h: float = 1e-5
    scheme: str = "central"
    tau_res: float = 1e-6
    tau_sys: float = 1e-5
    tau_lemma: float = 1e-5
    tau_comb: float = 1e-5
    delta: float = 0.1

    def __post_init__(self):
        if self.h <= 0 or self.tau_res <= 0 or self.delta <= 0:
            raise CalculusError("h, tau_res and delta must be positive")
        if self.scheme != "central":
            raise CalculusError(f"unsupported scheme {self.scheme!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Monte-Carlo box quadrature: per-coordinate interval [-a, a]."""

    half_width: float = 2.0
    n_samples: int = 1_000_000
    seed: int = 0
    chunk: int = 200_000
    shell_fraction: float = 0.01
    leak_ratio: float = 0.02

    def __post_init__(self):
        if self.half_width <= 0 or self.n_samples < 1:
            raise CalculusError("half_width must be > 0 and n_samples >= 1")


def eval_field(phi: ScalarField, x: FloatMatrix) -> float:
    """Recursive evaluation; a pk(k) node evaluates tr(x^k)/k in floats."""
    return float(evaluate_on_entries(phi, x.entries, lift=float))


def fd_directional(
    phi: ScalarField, x: FloatMatrix, v: FloatMatrix, cfg: FDConfig = FDConfig()
) -> float:
    """Central-difference directional derivative of phi at x along v."""
    h = cfg.h
    plus = FloatMatrix(x.entries + h * v.entries)
    minus = FloatMatrix(x.entries - h * v.entries)
    return (eval_field(phi, plus) - eval_field(phi, minus)) / (2.0 * h)


def adjoint_direction(x: FloatMatrix, i: int, j: int) -> FloatMatrix:
    """The adjoint vector field at x: [E_ij, x]."""
    n = x.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise CalculusError(f"index ({i},{j}) out of range 1..{n}")
    v = np.zeros((n, n))
    v[i - 1, :] += x.entries[j - 1, :]
    v[:, j - 1] -= x.entries[:, i - 1]
    return FloatMatrix(v)


def lie_derivative(
    phi: ScalarField, i: int, j: int, x: FloatMatrix, cfg: FDConfig = FDConfig()
) -> float:
    """Derivative of phi along the adjoint field x -> [E_ij, x]."""
    return fd_directional(phi, x, adjoint_direction(x, i, j), cfg)


def p_invariance_residual(
    phi: ScalarField, x: FloatMatrix, cfg: FDConfig = FDConfig()
) -> float:
    """max |L_ij phi| over i = 1..n-1, j = 1..n; zero for n = 1.

    Small values certify local invariance under the subgroup that fixes
    the last basis row.
    """
    n = x.n
    worst = 0.0
    for i in range(1, n):
        for j in range(1, n + 1):
            worst = max(worst, abs(lie_derivative(phi, i, j, x, cfg)))
    return worst


def full_identity_residual(
    phi: ScalarField, x: FloatMatrix, k: int, cfg: FDConfig = FDConfig()
) -> float:
    """|sum_ij (x^k)_ij L_ij phi| at x.

    The underlying vector field sum_ij (x^k)_ij [E_ij, .] is [x^k, x] = 0,
    so the residual is pure finite-difference error for every C^1 field.
    """
    n = x.n
    if not 0 <= k <= n - 1:
        raise CalculusError(f"power index {k} out of range 0..{n - 1}")
    xk = np.linalg.matrix_power(x.entries, k)
    total = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            total += xk[i - 1, j - 1] * lie_derivative(phi, i, j, x, cfg)
    return abs(total)


@dataclass(frozen=True)
class ReducedSystemResult:
    residuals: tuple      # r_k = sum_j (x^k)_nj L_nj phi, k = 0..n-1
    solution: tuple       # s_j = L_nj phi, j = 1..n
    lemma_pass: bool
    abs_D: float


def _float_krylov_det(x: FloatMatrix) -> float:
    n = x.n
    rows = [np.zeros(n)]
    rows[0][n - 1] = 1.0
    for _ in range(n - 1):
        rows.append(rows[-1] @ x.entries)
    return float(np.linalg.det(np.stack(rows)))


def reduced_system_check(
    phi: ScalarField,
    x: Union[RatMatrix, FloatMatrix],
    cfg: FDConfig = FDConfig(),
) -> ReducedSystemResult:
    """Evaluate the n-unknown linear system in the last-row derivatives.

    Precondition (checked here): |D(x)| >= delta, using the exact
    determinant when x is rational.  Precondition (caller-checked): phi
    should have p_invariance_residual <= tau_res, otherwise lemma_pass is
    vacuous.  lemma_pass certifies both max_k |r_k| <= tau_sys and
    max_j |s_j| <= tau_lemma, the executable form of "all last-row Lie
    derivatives vanish wherever D != 0".
    """
    if isinstance(x, RatMatrix):
        abs_d = abs(float(krylov_determinant(x)))
        fx = FloatMatrix.from_rat(x)
    else:
        fx = x
        abs_d = abs(_float_krylov_det(fx))
    if abs_d < cfg.delta:
        raise PreconditionViolated(f"|D(x)| = {abs_d:.3g} < delta = {cfg.delta}")
    n = fx.n
    solution = tuple(lie_derivative(phi, n, j, fx, cfg) for j in range(1, n + 1))
    residuals = []
    xk = np.eye(n)
    for _ in range(n):
        residuals.append(float(sum(xk[n - 1, j] * solution[j] for j in range(n))))
        xk = xk @ fx.entries
    lemma_pass = max(abs(r) for r in residuals) <= cfg.tau_sys and max(
        abs(s) for s in solution
    ) <= cfg.tau_lemma
    return ReducedSystemResult(
        residuals=tuple(residuals),
        solution=solution,
        lemma_pass=lemma_pass,
        abs_D=abs_d,
    )


def adjoint_field_divergence(n: int, i: int, j: int) -> Fraction:
    """Exact divergence of x -> [E_ij, x] on matrix space.

    The field is linear, so the divergence is sum_ab of the (a, b) entry
    of [E_ij, E_ab]; it vanishes identically, which is what licenses the
    single-integral weak derivative below.
    """
    e_ij = basis_matrix(n, i, j)
    total = Fraction(0)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            bracket = e_ij * basis_matrix(n, a, b) - basis_matrix(n, a, b) * e_ij
            total += bracket.entry(a, b)
    return total


@dataclass(frozen=True)
class WeakDerivativeResult:
    estimate: float
    std_error: float
    n_samples: int
    seed: int


# rng stream for the boundary-shell check; sampling chunks start at 1
_BOUNDARY_STREAM = 0


def _batch_entries(block: np.ndarray):
    """(n, n, N) array -> nested lists of per-entry sample vectors."""
    n = block.shape[0]
    return [[block[a, b] for b in range(n)] for a in range(n)]


def _batch_adjoint_direction(block: np.ndarray, i: int, j: int) -> np.ndarray:
    v = np.zeros_like(block)
    v[i - 1, :, :] += block[j - 1, :, :]
    v[:, j - 1, :] -= block[:, i - 1, :]
    return v


def _batch_lie_derivative(
    psi: ScalarField, block: np.ndarray, i: int, j: int, h: float
) -> np.ndarray:
    v = _batch_adjoint_direction(block, i, j)
    plus = evaluate_on_entries(psi, _batch_entries(block + h * v), lift=float)
    minus = evaluate_on_entries(psi, _batch_entries(block - h * v), lift=float)
    return (plus - minus) / (2.0 * h)


def check_boundary_decay(psi: ScalarField, n: int, quad: QuadratureSpec) -> float:
    """Verify psi is negligible on the outer shell of the box.

    Samples the shell (one coordinate forced within shell_fraction of the
    wall) against interior samples; raises BoundaryLeak when the shell
    maximum exceeds leak_ratio times the interior maximum.  Returns the
    measured ratio.
    """
    a = quad.half_width
    rng = np.random.default_rng([quad.seed, _BOUNDARY_STREAM])
    m = 512
    interior = rng.uniform(-a, a, size=(n, n, m))
    interior_max = float(
        np.max(np.abs(evaluate_on_entries(psi, _batch_entries(interior), lift=float)))
    )
    shell = rng.uniform(-a, a, size=(n, n, m))
    coords = rng.integers(0, n * n, size=m)
    signs = rng.choice([-1.0, 1.0], size=m)
    radii = rng.uniform(a * (1.0 - quad.shell_fraction), a, size=m)
    for s in range(m):
        shell[coords[s] // n, coords[s] % n, s] = signs[s] * radii[s]
    shell_max = float(
        np.max(np.abs(evaluate_on_entries(psi, _batch_entries(shell), lift=float)))
    )
    scale = max(interior_max, 1e-12)
    ratio = shell_max / scale
    if ratio > quad.leak_ratio:
        raise BoundaryLeak(
            f"shell max {shell_max:.3g} vs interior max {interior_max:.3g}"
        )
    return ratio


def weak_lie_derivative(
    u: ScalarField,
    psi: ScalarField,
    i: int,
    j: int,
    quad: QuadratureSpec = QuadratureSpec(),
    cfg: FDConfig = FDConfig(),
    n: int = 2,
) -> WeakDerivativeResult:
    """Monte-Carlo estimate of the weak derivative pairing
    -integral of u * (L_ij psi) over the box, with its standard error.

    Realizes the density u as a distribution T(psi) = integral(u psi); the
    adjoint fields are divergence free (asserted exactly), so the weak
    derivative (L_ij T)(psi) reduces to the single integral above when
    psi vanishes near the boundary (checked by shell sampling).

    Sampling is chunked; chunk c draws from default_rng([seed, c]), so a
    sharded parallel run recombines to the identical result.
    """
    if adjoint_field_divergence(n, i, j) != 0:  # pragma: no cover - identity
        raise CalculusError("adjoint field is not divergence free")
    check_boundary_decay(psi, n, quad)
    a = quad.half_width
    volume = (2.0 * a) ** (n * n)
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_idx = 1
    while done < quad.n_samples:
        count = min(quad.chunk, quad.n_samples - done)
        rng = np.random.default_rng([quad.seed, chunk_idx])
        block = rng.uniform(-a, a, size=(n, n, count))
        lie_psi = _batch_lie_derivative(psi, block, i, j, cfg.h)
        u_vals = evaluate_on_entries(u, _batch_entries(block), lift=float)
        vals = np.asarray(u_vals * lie_psi, dtype=np.float64)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += count
        chunk_idx += 1
    mean = total / quad.n_samples
    var = max(total_sq / quad.n_samples - mean * mean, 0.0)
    estimate = -volume * mean
    std_error = volume * math.sqrt(var / quad.n_samples)
    return WeakDerivativeResult(
        estimate=estimate,
        std_error=std_error,
        n_samples=quad.n_samples,
        seed=quad.seed,
    )


def weak_lie_derivative_grid(
    u: ScalarField,
    psi: ScalarField,
    i: int,
    j: int,
    half_width: float = 2.0,
    points_per_axis: int = 20,
    cfg: FDConfig = FDConfig(),
) -> float:
    """Deterministic midpoint-rule cross-check of the weak derivative,
    n = 2 only (a tensor grid in 4 entry coordinates)."""
    n = 2
    a = half_width
    step = 2.0 * a / points_per_axis
    axis = -a + step * (np.arange(points_per_axis) + 0.5)
    grids = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    block = np.stack(
        [g.ravel() for g in grids], axis=0
    ).reshape(n, n, points_per_axis**4)
    lie_psi = _batch_lie_derivative(psi, block, i, j, cfg.h)
    u_vals = evaluate_on_entries(u, _batch_entries(block), lift=float)
    return float(-(step**4) * np.sum(np.asarray(u_vals * lie_psi)))
