"""Command-line front end.

Exit codes: 0 success, 1 semantic failure (e.g. not a Lie derivation),
2 malformed input or usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .decomposer import standard_form
from .exceptions import InvalidSpecError, LieDerivError, NotLieDerivationError
from .io import (
    algebra_to_json,
    dumps,
    element_to_json,
    load_json,
    operator_from_json,
    operator_to_json,
    parse_algebra,
    standard_form_report,
    weights_to_json,
)
from .linmap import (
    inner_derivation_matrix,
    leibniz_residual,
    lie_derivation_space,
    lie_residual,
    sample_lie_derivation,
    solve_inner,
    trace_from_weights,
    trace_residual,
)
from .suite import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_TOL = 1e-9


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    seed: Optional[int] = None
    tolerance: float = DEFAULT_TOL
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InvalidSpecError(f"tolerance must be positive, got {self.tolerance}")
        if self.command == "generate" and self.seed is None:
            raise InvalidSpecError("generate needs --seed")


def default_tolerance() -> float:
    raw = os.environ.get("LIEDERIV_TOL")
    if not raw:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise InvalidSpecError(f"LIEDERIV_TOL={raw!r} is not a number") from None


def _emit(text: str, path: Optional[str]):
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sidecar_path(out: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.truth{ext or '.json'}"


def _rank(M: np.ndarray, rtol: float = 1e-10) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0


def cmd_check(cfg: RunConfig) -> int:
    L = operator_from_json(load_json(cfg.input_path))
    tol = cfg.tolerance
    reps = {
        "lie": lie_residual(L, tol),
        "leibniz": leibniz_residual(L, tol),
        "trace": trace_residual(L, tol),
    }
    if reps["leibniz"].passed and reps["trace"].passed:
        classification = "zero"
    elif reps["leibniz"].passed:
        classification = "derivation"
    elif reps["trace"].passed:
        classification = "center-valued trace"
    elif reps["lie"].passed:
        classification = "lie derivation"
    else:
        classification = "not a lie derivation"
    print(", ".join(f"{k}: {'pass' if r.passed else 'fail'}" for k, r in reps.items()))
    print(f"classification: {classification}")
    wanted = {"lie": "lie", "derivation": "leibniz", "trace": "trace"}[cfg.flags["as"]]
    if cfg.output_path:
        report = {k: r.to_dict() for k, r in reps.items()}
        report["classification"] = classification
        _emit(dumps(report), cfg.output_path)
    return EXIT_OK if reps[wanted].passed else EXIT_FAIL


def cmd_decompose(cfg: RunConfig) -> int:
    L = operator_from_json(load_json(cfg.input_path))
    try:
        sf = standard_form(L, cfg.tolerance, validate=not cfg.flags.get("no_gate", False))
        a = solve_inner(sf.D)
    except NotLieDerivationError as exc:
        print(f"decomposition failed at stage {exc.stage}: {exc}", file=sys.stderr)
        _emit(dumps({"algebra": algebra_to_json(L.algebra), "error": exc.to_dict()}), cfg.output_path)
        return EXIT_FAIL
    except LieDerivError as exc:
        print(f"decomposition failed: {exc}", file=sys.stderr)
        _emit(dumps({"algebra": algebra_to_json(L.algebra), "error": {"stage": "solve_inner", "message": str(exc)}}), cfg.output_path)
        return EXIT_FAIL
    _emit(dumps(standard_form_report(sf, a)), cfg.output_path)
    return EXIT_OK


def cmd_generate(cfg: RunConfig) -> int:
    A = parse_algebra(cfg.flags["algebra"])
    sample = sample_lie_derivation(A, cfg.seed, cfg.flags["mode"])
    _emit(dumps(operator_to_json(sample.operator)), cfg.output_path)
    if sample.a is not None and cfg.output_path and cfg.output_path != "-":
        truth = {
            "algebra": algebra_to_json(A),
            "seed": cfg.seed,
            "mode": sample.mode,
            "a": element_to_json(sample.a),
            "weights": weights_to_json(sample.weights),
        }
        _emit(dumps(truth), _sidecar_path(cfg.output_path))
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    A = parse_algebra(cfg.flags["algebra"])
    lie = len(lie_derivation_space(A))
    inner = _rank(inner_derivation_matrix(A))
    m = A.num_blocks
    trace_cols = []
    for k in range(m):
        for l in range(m):
            W = np.zeros((m, m))
            W[k, l] = 1.0
            trace_cols.append(trace_from_weights(A, W).matrix.reshape(-1))
    trace = _rank(np.array(trace_cols).T)
    ok = lie == inner + trace
    print(f"lie {lie} {'=' if ok else '!='} inner {inner} + trace {trace}")
    if cfg.output_path:
        _emit(
            dumps({"algebra": algebra_to_json(A), "lie": lie, "inner": inner, "trace": trace,
                   "predicted": inner + trace, "agree": ok}),
            cfg.output_path,
        )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    A = parse_algebra(cfg.flags["algebra"])
    base = cfg.seed or 0
    seeds = range(base, base + cfg.flags["count"])
    report = run_suite(A, seeds, cfg.flags["mode"], cfg.tolerance, cfg.flags["adversarial"])
    for name, chk in report.checks.items():
        status = "pass" if chk.passed else "FAIL"
        line = f"{name}: {status} (max residual {chk.max_residual:.3e})"
        if chk.failures:
            first = chk.failures[0]
            line += f" first failure seed={first['seed']} witness={first['witness']}"
        print(line)
    if cfg.output_path:
        _emit(dumps(report.to_dict()), cfg.output_path)
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "check": cmd_check,
    "decompose": cmd_decompose,
    "generate": cmd_generate,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liederiv",
        description="Check and decompose Lie derivations on finite-dimensional *-algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_in=False, need_alg=False):
        if need_in:
            p.add_argument("--in", dest="input_path", required=True, help="operator JSON file ('-' for stdin)")
        if need_alg:
            p.add_argument("--algebra", required=True, help='file or inline spec, e.g. "[2,3]"')
        p.add_argument("--out", dest="output_path", help="write JSON output here")
        p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9 or $LIEDERIV_TOL)")

    p = sub.add_parser("check", help="residuals of the Lie, Leibniz and trace identities")
    common(p, need_in=True)
    p.add_argument("--as", dest="as_", choices=["lie", "derivation", "trace"], default="lie")

    p = sub.add_parser("decompose", help="standard form L = D + E")
    common(p, need_in=True)
    p.add_argument("--no-gate", action="store_true",
                   help="skip the initial Lie check so failures are reported by lemma stage")

    p = sub.add_parser("generate", help="seeded random Lie derivation")
    common(p, need_alg=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=["groundtruth", "nullspace"], default="groundtruth")

    p = sub.add_parser("spectrum", help="dimension of the Lie-derivation space vs inner + trace")
    common(p, need_alg=True)

    p = sub.add_parser("verify", help="seeded lemma suite")
    common(p, need_alg=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--mode", choices=["groundtruth", "nullspace"], default="groundtruth")
    p.add_argument("--adversarial", action="store_true", help="inject a corner-swapping operator")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = args.tol if args.tol is not None else default_tolerance()
        flags = {
            "as": getattr(args, "as_", "lie"),
            "algebra": getattr(args, "algebra", None),
            "mode": getattr(args, "mode", "groundtruth"),
            "count": getattr(args, "count", 10),
            "adversarial": getattr(args, "adversarial", False),
            "no_gate": getattr(args, "no_gate", False),
        }
        if flags["count"] < 1:
            raise InvalidSpecError("--count must be at least 1")
        cfg = RunConfig(
            command=args.command,
            input_path=getattr(args, "input_path", None),
            output_path=args.output_path,
            seed=getattr(args, "seed", None),
            tolerance=tol,
            flags=flags,
        )
        return COMMANDS[cfg.command](cfg)
    except (InvalidSpecError, LieDerivError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
