"""Seeded property suite over the lemma chain.

:func:`run_suite` draws Lie derivations on an algebra and records, per named
check, the worst residual and every failing seed.  Checks that need a frame
run on the non-commutative summand; the rest run on the whole algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .algebra import (
    StarAlgebra,
    center_basis,
    center_distance,
    commutator,
    halving_projection,
    norm,
    random_element,
    random_projection,
    random_unitary,
    split_commutative,
    adjoint,
)
from .decomposer import lemma10_traces, noncommutative_part, standard_form
from .exceptions import InvalidSpecError, LieDerivError
from .linmap import (
    LinearOperatorOnAlgebra,
    apply,
    sample_lie_derivation,
    trace_residual,
    verify_identity_3_2,
)
from .peirce import (
    corner_swap_operator,
    lemma1_witness,
    lemma3_normalize,
    lemma4_check,
    lemma5_residual,
    make_frame,
)

__all__ = ["CheckResult", "SuiteReport", "run_suite", "rotated_frame_projection"]


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_residual: float = 0.0
    runs: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, seed, value: float, witness=None):
        self.runs += 1
        value = float(value)
        self.max_residual = max(self.max_residual, value)
        if not value <= self.tolerance:
            self.failures.append(
                {"seed": seed, "residual": value, "witness": None if witness is None else list(witness)}
            )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "runs": self.runs,
            "failures": self.failures,
        }


@dataclass
class SuiteReport:
    algebra: StarAlgebra
    seeds: list
    mode: str
    checks: dict[str, CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra.to_dict(),
            "seeds": list(self.seeds),
            "mode": self.mode,
            "passed": self.passed,
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
        }


def rotated_frame_projection(B: StarAlgebra, rng: np.random.Generator):
    """Halving projection conjugated by a random unitary: a second valid frame."""
    u = random_unitary(B, rng)
    return u @ halving_projection(B) @ adjoint(u)


def run_suite(
    A: StarAlgebra,
    seeds: Iterable[int],
    mode: str = "groundtruth",
    tol: float = 1e-9,
    adversarial: bool = False,
    sampler: Optional[Callable[[StarAlgebra, int], LinearOperatorOnAlgebra]] = None,
) -> SuiteReport:
    seeds = sorted(seeds)
    names = ["lemma9", "lemma10", "identity_3_2", "corollary1", "reconstruction"]
    z0, z1 = split_commutative(A)
    has_nc = any(c == 1.0 for c in z1.coefficients)
    if has_nc:
        names = ["lemma1", "lemma3", "lemma4", "lemma5", *names, "frame_independence"]
    else:
        names.append("remark2")
    checks = {n: CheckResult(n, tol) for n in names}
    if adversarial and not has_nc:
        raise InvalidSpecError(f"{A} is commutative: every linear map is a Lie derivation, nothing to corrupt")
    if has_nc:
        B, idx = noncommutative_part(A)
        frame = make_frame(halving_projection(B))

    for seed in seeds:
        L = sampler(A, seed) if sampler else sample_lie_derivation(A, seed, mode).operator
        rng = np.random.default_rng([seed, 1])
        scale = 1.0 + L.norm

        checks["lemma9"].record(
            seed, max(center_distance(apply(L, z.to_element())) for z in center_basis(A)) / scale
        )
        F = lemma10_traces(L, z0, z1)
        rep = max((trace_residual(f, tol) for f in F), key=lambda r: r.max_residual)
        checks["lemma10"].record(seed, rep.max_residual, rep.witness)
        p = random_projection(A, rng)
        checks["identity_3_2"].record(seed, verify_identity_3_2(L, p, random_element(A, rng), tol).max_residual)

        try:
            sf = standard_form(L, tol)
        except LieDerivError as exc:
            checks["reconstruction"].record(seed, np.inf, getattr(exc, "witness", None))
            continue
        checks["reconstruction"].record(seed, sf.diagnostics["reconstruction"].max_residual)
        x, y = random_element(A, rng), random_element(A, rng)
        checks["corollary1"].record(seed, norm(apply(sf.E, commutator(x, y))) / (1.0 + sf.E.norm))

        if not has_nc:
            checks["remark2"].record(
                seed, max(sf.D.norm, float(np.linalg.norm(sf.E.matrix - L.matrix))) / scale
            )
            continue

        L1 = LinearOperatorOnAlgebra(B, L.matrix[np.ix_(idx, idx)])
        s11 = frame.p1 @ random_element(B, rng) @ frame.p1
        yw, u = lemma1_witness(s11, frame)
        checks["lemma1"].record(seed, norm(s11 - s11 @ yw @ u) / (1.0 + norm(s11)))
        try:
            a, z, L1n = lemma3_normalize(L1, frame, tol)
        except LieDerivError as exc:
            checks["lemma3"].record(seed, exc.residual if exc.residual is not None else np.inf)
            continue
        lp = apply(L1, frame.p1)
        checks["lemma3"].record(
            seed,
            max(norm(lp - commutator(frame.p1, a) - z), norm(apply(L1n, frame.p1) - z)) / (1.0 + L1.norm),
        )
        rep = lemma4_check(L1n, frame, tol)
        checks["lemma4"].record(seed, rep.max_residual, rep.witness)
        rep = lemma5_residual(L1n, frame, tol)
        checks["lemma5"].record(seed, rep.max_residual, rep.witness)

        try:
            other = standard_form(L, tol, frame_projection=rotated_frame_projection(B, rng))
        except LieDerivError as exc:
            checks["frame_independence"].record(seed, np.inf, getattr(exc, "witness", None))
            continue
        diff = max(np.linalg.norm(sf.D.matrix - other.D.matrix), np.linalg.norm(sf.E.matrix - other.E.matrix))
        checks["frame_independence"].record(seed, diff / scale)

    if adversarial:
        bad = corner_swap_operator(frame)
        rep = lemma4_check(bad, frame, tol)
        checks["lemma4"].record("adversarial", rep.max_residual, rep.witness)
    return SuiteReport(A, seeds, mode, checks)
