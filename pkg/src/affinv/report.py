"""Verification suites and machine-readable reports.

Each suite draws seeded samples, checks a fixed list of properties, and
returns a VerificationReport: zero failures in every property record is
equivalent to an overall pass, and every failure carries a replayable
witness (the offending input in wire format).  Reports are deterministic
given (config, seed) except for the timestamp field.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional, Union

from . import __version__
from .calculus import (
    FDConfig,
    FloatMatrix,
    QuadratureSpec,
    adjoint_field_divergence,
    full_identity_residual,
    p_invariance_residual,
    reduced_system_check,
    weak_lie_derivative,
)
from .exactmat import (
    RatMatrix,
    determinant,
    format_rational,
    inverse,
    matrix_to_json,
)
from .fields import (
    Add,
    Const,
    Mul,
    Pk,
    Pow,
    Var,
    bump_field,
    field_to_json,
    random_invariant_field,
    random_polynomial_field,
)
from .invariants import basis_expansion_residual
from .krylov import (
    CompanionSpec,
    companion,
    companion_sign,
    homogeneity_check,
    in_omega,
    is_regular,
    krylov_determinant,
    krylov_matrix,
    p_check,
    pairing_determinant,
    transformation_law,
)

SUITE_NAMES = ("identity", "lemma", "weak")


class SuiteConfigError(ValueError):
    pass


@dataclass
class PropertyRecord:
    name: str
    checked: int = 0
    failures: int = 0
    worst_residual: Union[float, str] = "exact"
    witness: Optional[dict] = None

    def check_exact(self, ok: bool, witness: dict):
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.witness is None:
                self.witness = witness

    def check_residual(self, residual: float, tol: float, witness: dict):
        self.checked += 1
        if self.worst_residual == "exact" or residual > self.worst_residual:
            self.worst_residual = float(residual)
        if residual > tol:
            self.failures += 1
            if self.witness is None:
                self.witness = witness

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "failures": self.failures,
            "worst_residual": self.worst_residual,
            "witness": self.witness,
        }


@dataclass
class VerificationReport:
    suite: str
    n: int
    samples: int
    seed: int
    passed: bool
    properties: list
    config: dict
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "pass": self.passed,
            "properties": [p.to_json() for p in self.properties],
            "config": self.config,
            "version": self.version,
            "timestamp": self.timestamp,
        }


def _finish(suite, n, samples, seed, records, config) -> VerificationReport:
    return VerificationReport(
        suite=suite,
        n=n,
        samples=samples,
        seed=seed,
        passed=all(r.failures == 0 for r in records),
        properties=records,
        config=config,
    )


def _mix(*parts: int) -> int:
    acc = 0x9E3779B9
    for p in parts:
        acc = (acc * 1_000_003 + p) % (1 << 62)
    return acc


def _rand_matrix(rng: random.Random, n: int, lo: int = -9, hi: int = 9) -> RatMatrix:
    return RatMatrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])


def _rand_p_element(rng: random.Random, n: int):
    while True:
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n - 1)]
        rows.append([0] * (n - 1) + [1])
        y = RatMatrix(rows)
        if determinant(y) != 0:
            return p_check(y)


def run_identity_suite(n: int, samples: int, seed: int) -> VerificationReport:
    """Exact-layer properties: basis expansion, dual determinant
    constructions, homogeneity, the mirabolic transformation law, the
    regularity inclusion, and the companion sign."""
    rng = random.Random(_mix(seed, n, 1))
    rec_basis = PropertyRecord("basis_expansion_zero")
    rec_dets = PropertyRecord("krylov_vs_pairing_determinant")
    rec_hom = PropertyRecord("homogeneity_degree")
    rec_law = PropertyRecord("mirabolic_transformation_law")
    rec_omega = PropertyRecord("omega_subset_regular")
    rec_sign = PropertyRecord("companion_sign")
    for _ in range(samples):
        x = _rand_matrix(rng, n)
        wit = {"matrix": matrix_to_json(x)}
        for k in range(n):
            rec_basis.check_exact(
                basis_expansion_residual(x, k).is_zero(), {**wit, "k": k}
            )
        d = krylov_determinant(x)
        rec_dets.check_exact(d == pairing_determinant(x), wit)
        t = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        lhs, rhs = homogeneity_check(x, t)
        rec_hom.check_exact(lhs == rhs, {**wit, "t": format_rational(t)})
        if n >= 2:
            y = _rand_p_element(rng, n)
            a, b = transformation_law(x, y)
            same_omega = in_omega(y.matrix * x * inverse(y.matrix)) == in_omega(x)
            rec_law.check_exact(
                a == b and same_omega, {**wit, "y": matrix_to_json(y.matrix)}
            )
        if d != 0:
            rec_omega.check_exact(is_regular(x), wit)
        alpha = [Fraction(rng.randint(-9, 9)) for _ in range(n)]
        c = companion(CompanionSpec(alpha))
        rec_sign.check_exact(
            krylov_determinant(c) == companion_sign(n),
            {"alpha": [format_rational(a) for a in alpha]},
        )
    records = [rec_basis, rec_dets, rec_hom, rec_law, rec_omega, rec_sign]
    return _finish(
        "identity", n, samples, seed, records, {"n": n, "samples": samples, "seed": seed}
    )


def _lemma_point(rng: random.Random, n: int) -> RatMatrix:
    """Integer entries in [-2, 2] and D(x) != 0; exact D keeps the point at
    least 1 away from the hypersurface, well beyond the delta cutoff."""
    while True:
        x = _rand_matrix(rng, n, -2, 2)
        if krylov_determinant(x) != 0:
            return x


def run_lemma_suite(
    n: int,
    samples: int,
    seed: int,
    cfg: FDConfig = FDConfig(),
    n_fields: int = 20,
) -> VerificationReport:
    """Finite-difference harness for the reduced linear system.

    Invariant fields (polynomials in the trace powers) must be locally
    invariant under the last-row-fixing subgroup within tau_res, and their
    last-row Lie derivatives must vanish within tau_lemma wherever the
    Krylov determinant clears the delta cutoff.  Arbitrary fields check the
    full contraction identity at tau_comb, and the residual vector is tied
    to the exact Krylov matrix.
    """
    if n < 2:
        raise SuiteConfigError("lemma suite needs n >= 2")
    rng = random.Random(_mix(seed, n, 2))
    fields = [random_invariant_field(n, rng) for _ in range(n_fields)]
    points = [_lemma_point(rng, n) for _ in range(samples)]
    rec_pres = PropertyRecord("p_invariance_of_invariant_fields")
    rec_lemma = PropertyRecord("last_row_derivatives_vanish")
    rec_sys = PropertyRecord("reduced_system_residuals")
    rec_tie = PropertyRecord("float_residuals_tie_to_exact_krylov")
    rec_full = PropertyRecord("full_identity_arbitrary_fields")
    for x in points:
        fx = FloatMatrix.from_rat(x)
        wit_x = {"matrix": matrix_to_json(x)}
        km = krylov_matrix(x)
        for f in fields:
            wit = {**wit_x, "field": field_to_json(f)}
            rec_pres.check_residual(
                p_invariance_residual(f, fx, cfg), cfg.tau_res, wit
            )
            res = reduced_system_check(f, x, cfg)
            rec_lemma.check_residual(
                max(abs(s) for s in res.solution), cfg.tau_lemma, wit
            )
            rec_sys.check_residual(
                max(abs(r) for r in res.residuals), cfg.tau_sys, wit
            )
            tie = max(
                abs(
                    res.residuals[k]
                    - sum(
                        float(km.rows.entry(k + 1, j + 1)) * res.solution[j]
                        for j in range(n)
                    )
                )
                for k in range(n)
            )
            rec_tie.check_residual(tie, 1e-10, wit)
        f_any = random_polynomial_field(n, rng)
        for k in range(n):
            rec_full.check_residual(
                full_identity_residual(f_any, fx, k, cfg),
                cfg.tau_comb,
                {**wit_x, "field": field_to_json(f_any), "k": k},
            )
    records = [rec_pres, rec_lemma, rec_sys, rec_tie, rec_full]
    config = {
        "n": n,
        "samples": samples,
        "seed": seed,
        "n_fields": n_fields,
        "fd": {
            "h": cfg.h,
            "scheme": cfg.scheme,
            "tau_res": cfg.tau_res,
            "tau_sys": cfg.tau_sys,
            "tau_lemma": cfg.tau_lemma,
            "tau_comb": cfg.tau_comb,
            "delta": cfg.delta,
        },
    }
    return _finish("lemma", n, samples, seed, records, config)


def weak_test_functions(n: int, half_width) -> list:
    """The five bump test functions used by the weak suite: prefactors of
    mixed parity so non-invariant densities cannot hide by symmetry."""
    prefactors = [
        Const(1),
        Pk(1),
        Pk(2),
        Var(1, 2),
        Add([Var(1, 1), Var(2, 1)]),
    ]
    return [bump_field(n, half_width, prefactor=p) for p in prefactors]


def invariant_density(n: int = 2):
    """1 + p1^2/4 + p2/2, a conjugation-invariant polynomial density."""
    return Add(
        [
            Const(1),
            Mul([Const(Fraction(1, 4)), Pow(Pk(1), 2)]),
            Mul([Const(Fraction(1, 2)), Pk(2)]),
        ]
    )


def run_weak_suite(
    samples: int,
    seed: int,
    half_width: float = 2.0,
    cfg: FDConfig = FDConfig(),
    zero_tol_floor: float = 1e-2,
    witness_sigma: float = 5.0,
) -> VerificationReport:
    """Quadrature analogue of local invariance in the weak sense, n = 2.

    An invariant density must annihilate every adjoint direction against
    every bump test function within max(3 * std_error, the floor); the
    coordinate density x11 must light up at least one direction at
    witness_sigma standard errors.
    """
    n = 2
    quad = QuadratureSpec(half_width=half_width, n_samples=samples, seed=seed)
    psis = weak_test_functions(n, half_width)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    rec_div = PropertyRecord("adjoint_fields_divergence_free")
    rec_inv = PropertyRecord("invariant_density_weak_zero")
    rec_leb = PropertyRecord("lebesgue_weak_zero")
    rec_wit = PropertyRecord("noninvariant_density_detected")
    for i, j in pairs:
        rec_div.check_exact(
            adjoint_field_divergence(n, i, j) == 0, {"i": i, "j": j}
        )
    u_inv = invariant_density(n)
    for m, psi in enumerate(psis):
        for i, j in pairs:
            r = weak_lie_derivative(u_inv, psi, i, j, quad, cfg, n=n)
            tol = max(3.0 * r.std_error, zero_tol_floor)
            rec_inv.check_residual(
                abs(r.estimate) / tol, 1.0, {"psi": m, "i": i, "j": j}
            )
    for i, j in pairs:
        r = weak_lie_derivative(Const(1), psis[0], i, j, quad, cfg, n=n)
        tol = max(3.0 * r.std_error, zero_tol_floor)
        rec_leb.check_residual(abs(r.estimate) / tol, 1.0, {"i": i, "j": j})
    best_ratio = 0.0
    u_wit = Var(1, 1)
    for m, psi in enumerate(psis):
        for i, j in pairs:
            r = weak_lie_derivative(u_wit, psi, i, j, quad, cfg, n=n)
            if r.std_error > 0:
                best_ratio = max(best_ratio, abs(r.estimate) / r.std_error)
    rec_wit.checked = 1
    rec_wit.worst_residual = best_ratio
    if best_ratio < witness_sigma:
        rec_wit.failures = 1
        rec_wit.witness = {"density": field_to_json(u_wit)}
    records = [rec_div, rec_inv, rec_leb, rec_wit]
    config = {
        "n": n,
        "samples": samples,
        "seed": seed,
        "quadrature": {
            "half_width": half_width,
            "chunk": quad.chunk,
            "shell_fraction": quad.shell_fraction,
            "leak_ratio": quad.leak_ratio,
        },
        "fd": {"h": cfg.h},
        "zero_tol_floor": zero_tol_floor,
        "witness_sigma": witness_sigma,
    }
    return _finish("weak", n, samples, seed, records, config)


_SUITE_DEFAULTS = {
    "identity": {"n": 3, "samples": 200},
    "lemma": {"n": 2, "samples": 50},
    "weak": {"n": 2, "samples": 1_000_000},
}


def run_suite_from_config(config: dict) -> VerificationReport:
    """Dispatch {"suite": ..., "n": ..., "samples": ..., "seed": ...,
    "fd": {...}, "quadrature": {...}} to the named suite."""
    if not isinstance(config, dict):
        raise SuiteConfigError("config must be a JSON object")
    suite = config.get("suite")
    if suite not in SUITE_NAMES:
        raise SuiteConfigError(
            f"unknown suite {suite!r}; expected one of {', '.join(SUITE_NAMES)}"
        )
    defaults = _SUITE_DEFAULTS[suite]
    try:
        n = int(config.get("n", defaults["n"]))
        samples = int(config.get("samples", defaults["samples"]))
        seed = int(config.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise SuiteConfigError(f"bad numeric config value: {exc}") from exc
    if samples < 1:
        raise SuiteConfigError("samples must be >= 1")
    try:
        fd_cfg = FDConfig(**config.get("fd", {})) if "fd" in config else FDConfig()
    except (TypeError, ValueError) as exc:
        raise SuiteConfigError(f"bad fd config: {exc}") from exc
    if suite == "identity":
        if n < 1:
            raise SuiteConfigError("identity suite needs n >= 1")
        return run_identity_suite(n, samples, seed)
    if suite == "lemma":
        return run_lemma_suite(n, samples, seed, fd_cfg)
    quad = config.get("quadrature", {})
    if n != 2:
        raise SuiteConfigError("weak suite supports n = 2 only")
    return run_weak_suite(
        samples,
        seed,
        half_width=float(quad.get("half_width", 2.0)),
        cfg=fd_cfg,
    )
