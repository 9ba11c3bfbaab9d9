"""Command-line front end.

Every subcommand reads JSON, writes a JSON report to stdout (or ``--output``)
and exits with 0 on success, 2 when a criterion/certificate does not hold and
1 on input errors.  Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Sequence

import numpy as np

from . import io
from .construction import IndexInterleaving, SubspaceSpec, construct_targeted_frames
from .dimension import dimension_bound_functionals, dimension_bound_vectors, remark38_minimal_N
from .errors import CriterionNotSatisfied, NeumannError
from .frames import (
    DEFAULT_ENUM_CAP,
    FramePair,
    besselian_constant,
    besselian_diagnostic,
    frame_constant_K,
    validate_frame,
)
from .generate import KINDS, generate_frame
from .perturbation import (
    BESSELIAN_CRITERIA,
    CRITERIA,
    PerturbationCandidate,
    besselian_certificate,
    emit_perturbed_frames,
    evaluate_criterion,
)
from .space import parse_p

log = logging.getLogger("frameperturb")

EXIT_OK, EXIT_INPUT, EXIT_UNSATISFIED = 0, 1, 2


def _mode(args) -> str:
    if getattr(args, "exact", False):
        return "exact"
    if getattr(args, "bounds", False):
        return "bounds"
    return "auto"


def _load_frame(path: str) -> FramePair:
    return FramePair.from_json(io.load(path, io.FRAME_SCHEMA))


def _load_candidate(path: str) -> PerturbationCandidate:
    return PerturbationCandidate.from_json(io.load(path, io.PERTURBATION_SCHEMA))


def cmd_validate(args) -> tuple[dict, int]:
    report = validate_frame(_load_frame(args.frame), tol=args.tol)
    return report.to_json(), EXIT_OK if report.is_frame else EXIT_UNSATISFIED


def cmd_constants(args) -> tuple[dict, int]:
    F = _load_frame(args.frame)
    validation = validate_frame(F, tol=args.tol)
    K = frame_constant_K(F, tol=args.tol, seed=args.seed)
    L = besselian_constant(F, mode=_mode(args), cap=args.cap, seed=args.seed)
    diag = besselian_diagnostic(F, samples=args.samples, seed=args.seed, L=L)
    out = {
        "K": K.to_json(),
        "L": L.to_json(),
        "residual": validation.residual,
        "crude_sum": F.crude_sum(),
        "diagnostic": diag.to_json(),
    }
    return out, EXIT_OK if diag.ok else EXIT_UNSATISFIED


def _criterion_kwargs(args) -> dict:
    return {"mode": _mode(args), "cap": args.cap, "seed": args.seed, "frame_tol": args.tol}


def cmd_check(args) -> tuple[dict, int]:
    c = _load_candidate(args.perturbation)
    ids = CRITERIA if args.criterion == "all" else (args.criterion,)
    reports = [evaluate_criterion(c, cid, **_criterion_kwargs(args)) for cid in ids]
    ok = any(r.satisfied for r in reports)
    if len(reports) == 1:
        return reports[0].to_json(), EXIT_OK if ok else EXIT_UNSATISFIED
    return {"reports": [r.to_json() for r in reports]}, EXIT_OK if ok else EXIT_UNSATISFIED


def cmd_perturb(args) -> tuple[dict, int]:
    c = _load_candidate(args.perturbation)
    report = evaluate_criterion(c, args.criterion, **_criterion_kwargs(args))
    pf = emit_perturbed_frames(c, report, tol=args.neumann_tol, force=args.force)
    out = pf.to_json()
    if args.criterion in BESSELIAN_CRITERIA:
        L_F = besselian_constant(c.base, mode=_mode(args), cap=args.cap, seed=args.seed)
        out["besselian"] = besselian_certificate(pf, report.value, L_F, mode=_mode(args),
                                                 cap=args.cap, seed=args.seed).to_json()
    return out, EXIT_OK if pf.certified else EXIT_UNSATISFIED


def cmd_dimension(args) -> tuple[dict, int]:
    F = _load_frame(args.frame)
    if args.replace_vectors or args.replace_functionals:
        path = args.replace_vectors or args.replace_functionals
        data = io.load(path, io.SUBSPACE_SCHEMA)
        rows = np.array(data["basis"] if isinstance(data, dict) else data, dtype=float)
        fn = dimension_bound_vectors if args.replace_vectors else dimension_bound_functionals
        cert = fn(F, rows, mode=_mode(args), cap=args.cap, seed=args.seed)
    else:
        cert = remark38_minimal_N(F, sharp=args.sharp, cap=args.cap, seed=args.seed)
    return cert.to_json(), EXIT_OK if cert.valid else EXIT_UNSATISFIED


def _parse_indices(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise io.InputError(f"--indices must be comma-separated integers, got {text!r}") from exc


def cmd_construct(args) -> tuple[dict, int]:
    F = _load_frame(args.frame)
    V = SubspaceSpec.from_json(io.load(args.V, io.SUBSPACE_SCHEMA), F.space, "vector")
    W = SubspaceSpec.from_json(io.load(args.W, io.SUBSPACE_SCHEMA), F.space, "functional")
    idx = _parse_indices(args.indices)
    I = IndexInterleaving(len(F) + len(idx), tuple(idx))
    result = construct_targeted_frames(F, V, W, I, theta=args.theta, besselian=args.besselian,
                                       tol=args.neumann_tol)
    return result.to_json(), EXIT_OK if result.ok else EXIT_UNSATISFIED


def cmd_gen(args) -> tuple[dict, int]:
    F = generate_frame(args.dim, args.count, p=args.p, kind=args.kind, seed=args.seed)
    return F.to_json(), EXIT_OK


def _render_text(obj: Any, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines += _render_text(obj[k], f"{prefix}{k}.")
        return lines
    if isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        return [f"{prefix[:-1]}: <{len(obj)} items>"]
    return [f"{prefix[:-1]}: {obj}"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="frame residual tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="seed for ascent and sampling (default 0)")
    common.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP, help="exact enumeration cap on M")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--debug", action="store_true")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="force exact sign enumeration")
    mode.add_argument("--bounds", action="store_true", help="force bounds mode")

    parser = argparse.ArgumentParser(prog="frameperturb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the frame identity")
    p.add_argument("frame")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("constants", parents=[common], help="K_F, L_F and the sampled besselian diagnostic")
    p.add_argument("frame")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("check", parents=[common], help="evaluate perturbation criteria")
    p.add_argument("perturbation")
    p.add_argument("--criterion", choices=CRITERIA + ("all",), default="thm31")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("perturb", parents=[common], help="emit perturbed frames with a certificate")
    p.add_argument("perturbation")
    p.add_argument("--criterion", choices=CRITERIA, default="thm31")
    p.add_argument("--force", action="store_true", help="emit even if the criterion fails (UNCERTIFIED)")
    p.add_argument("--neumann-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("dimension", parents=[common], help="dimension certificate")
    p.add_argument("frame")
    p.add_argument("--sharp", action="store_true", help="use the abs-bilinear tail instead of the crude sum")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--replace-vectors", help="JSON list of x0_1..x0_N (vector replacement certificate)")
    grp.add_argument("--replace-functionals", help="JSON list of y0_1..y0_N (functional replacement certificate)")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("construct", parents=[common], help="frames targeting subspaces V and W")
    p.add_argument("--frame", required=True)
    p.add_argument("--V", required=True)
    p.add_argument("--W", required=True)
    p.add_argument("--indices", required=True, help="comma-separated 1-based positions of I")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--besselian", action="store_true")
    p.add_argument("--neumann-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("gen", parents=[common], help="seeded random frame")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--p", type=parse_p, default=2.0)
    p.add_argument("--kind", choices=KINDS, default="tight")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        out, code = args.func(args)
    except CriterionNotSatisfied as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSATISFIED
    except NeumannError as exc:
        print(f"error: Neumann inversion failed: {exc}", file=sys.stderr)
        return EXIT_UNSATISFIED
    except (ValueError, KeyError) as exc:
        if args.debug:
            raise
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = io.dumps(out) if args.format == "json" else "\n".join(_render_text(out)) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
