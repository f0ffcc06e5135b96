"""Command-line front end.

Subcommands: verify, extract, construct-equality, integral, fuzz.  Results
are JSON on stdout; diagnostics go to stderr.  Exit codes are a CI contract:

    0  verified / constructed / extracted
    1  inequality violated beyond tolerance (an implementation bug signal)
    2  precondition or hypothesis failure
    3  input, schema, or usage error

Certificates and reports are emitted on 0/1/2.  Output is deterministic
except for a trailing "timestamp" key, suppressed by --deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from . import fuzzing, instances, quadrature, reverse, serialize
from .algebra import zero as zero_element
from .errors import CapabilityError, HypothesisError, InputError, SchemaError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_HYPOTHESIS = 2
EXIT_INPUT = 3

_VERIFIERS = {
    reverse.MULT_SCALAR: reverse.verify_multiplicative_scalar,
    reverse.MULT_HERMITIAN: reverse.verify_multiplicative_hermitian,
    reverse.FAMILY_NORM: reverse.verify_family_norm,
    reverse.FAMILY_MODULUS: reverse.verify_family_modulus,
    reverse.ADDITIVE: reverse.verify_additive,
}

_EXTRACTORS = {
    reverse.MULT_SCALAR: reverse.extract_scalar_bounds,
    reverse.MULT_HERMITIAN: reverse.extract_hermitian_bounds,
    reverse.FAMILY_NORM: reverse.extract_family_bounds,
    reverse.FAMILY_MODULUS: reverse.extract_family_bounds,
    reverse.ADDITIVE: reverse.extract_additive_bounds,
}

_FAMILY_THEOREMS = (reverse.FAMILY_NORM, reverse.FAMILY_MODULUS, reverse.ADDITIVE)


class _Parser(argparse.ArgumentParser):
    # the CLI contract wants usage errors on exit code 3, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="revtri", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-9, help="verification tolerance")
        p.add_argument(
            "--deterministic",
            action="store_true",
            help="omit the timestamp for byte-stable output",
        )

    p = sub.add_parser("verify", help="verify a theorem on an instance file")
    p.add_argument("--theorem", choices=reverse.THEOREMS, help="theorem id (file may supply it)")
    p.add_argument("--in", dest="infile", required=True, help="instance JSON path")
    common(p)

    p = sub.add_parser("extract", help="extract maximal constants from an instance file")
    p.add_argument("--theorem", choices=reverse.THEOREMS)
    p.add_argument("--in", dest="infile", required=True)
    common(p)

    p = sub.add_parser("construct-equality", help="build vectors achieving equality")
    p.add_argument(
        "--theorem",
        choices=(reverse.FAMILY_NORM, reverse.FAMILY_MODULUS, reverse.ADDITIVE),
    )
    p.add_argument("--in", dest="infile", required=True)
    common(p)

    p = sub.add_parser("integral", help="verify the sampled-path integral inequality")
    p.add_argument("--in", dest="infile", required=True)
    common(p)

    p = sub.add_parser("fuzz", help="run a seeded soundness campaign")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument(
        "--theorem",
        default=",".join(reverse.THEOREMS),
        help="comma-separated theorem ids (default: all)",
    )
    p.add_argument("--dims", default="", help="caps, e.g. block=2,blocks=2,rank=3,n=4,m=2")
    p.add_argument("--backend", choices=fuzzing.BACKENDS, default="generic")
    p.add_argument("--strategy", choices=fuzzing.STRATEGIES, default="mixed")
    common(p)
    return parser


def _emit(payload: dict, deterministic: bool) -> None:
    if not deterministic:
        payload = dict(payload)
        payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    print(json.dumps(payload, indent=2, sort_keys=True))


def _error_payload(kind: str, exc: Exception) -> dict:
    return {"error": {"kind": kind, "message": str(exc)}}


def _load(path: str) -> instances.InstanceFile:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SchemaError("/", f"cannot read {path}: {exc}") from exc
    return instances.parse_instance(raw)


def _resolve_theorem(args, inst) -> str:
    theorem = args.theorem or inst.theorem
    if theorem is None:
        raise SchemaError("/theorem", "no theorem id (use --theorem or the instance field)")
    if theorem not in reverse.THEOREMS:
        raise SchemaError("/theorem", f"unknown theorem id {theorem!r}")
    return theorem


def _theorem_args(inst, theorem):
    """(reference, vectors) for the theorem, schema-checked."""
    if inst.vectors is None:
        raise SchemaError("/vectors", "missing vectors field")
    if theorem in _FAMILY_THEOREMS:
        if inst.family is None:
            raise SchemaError("/family", f"{theorem} needs a family")
        return inst.family, inst.vectors
    if inst.e is None:
        raise SchemaError("/e", f"{theorem} needs a reference vector e")
    return inst.e, inst.vectors


def _cmd_verify(args) -> int:
    inst = _load(args.infile)
    theorem = _resolve_theorem(args, inst)
    ref, xs = _theorem_args(inst, theorem)
    tol = inst.tol if inst.tol is not None else args.tol
    bounds = inst.bounds_for(theorem)
    source = "file"
    if bounds is None:
        bounds = _EXTRACTORS[theorem](ref, xs)
        source = "extracted"
    try:
        cert = _VERIFIERS[theorem](ref, xs, bounds, tol)
    except CapabilityError as exc:
        _emit(_error_payload("capability", exc), args.deterministic)
        return EXIT_HYPOTHESIS
    payload = serialize.certificate_to_json(cert)
    payload["bounds"] = serialize.bounds_to_json(bounds)
    payload["bounds_source"] = source
    _emit(payload, args.deterministic)
    if not cert.preconditions_ok:
        return EXIT_HYPOTHESIS
    if cert.relative_slack < -tol:
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_extract(args) -> int:
    inst = _load(args.infile)
    theorem = _resolve_theorem(args, inst)
    ref, xs = _theorem_args(inst, theorem)
    try:
        bounds = _EXTRACTORS[theorem](ref, xs)
    except HypothesisError as exc:
        _emit(_error_payload("hypothesis", exc), args.deterministic)
        return EXIT_HYPOTHESIS
    _emit(
        {"theorem": theorem, "bounds": serialize.bounds_to_json(bounds)},
        args.deterministic,
    )
    return EXIT_OK


def _cmd_construct(args) -> int:
    inst = _load(args.infile)
    theorem = _resolve_theorem(args, inst)
    if theorem not in _FAMILY_THEOREMS:
        raise SchemaError("/theorem", f"construct-equality does not support {theorem}")
    if inst.family is None:
        raise SchemaError("/family", "construct-equality needs a family")
    if inst.norms is None:
        raise SchemaError("/norms", "construct-equality needs target norms")
    tol = inst.tol if inst.tol is not None else args.tol
    try:
        if theorem == reverse.ADDITIVE:
            xs = reverse.build_additive_equality(inst.family, inst.norms)
            bounds = reverse.extract_additive_bounds(inst.family, xs)
            cert = reverse.verify_additive(inst.family, xs, bounds, tol)
        else:
            bounds = inst.bounds_for(theorem)
            if bounds is None:
                raise SchemaError("/bounds", "construct-equality needs normalized bounds")
            xs = reverse.build_equality_instance(inst.family, bounds, inst.norms)
            cert = _VERIFIERS[theorem](inst.family, xs, bounds, tol)
    except CapabilityError as exc:
        _emit(_error_payload("capability", exc), args.deterministic)
        return EXIT_HYPOTHESIS
    payload = {
        "theorem": theorem,
        "vectors": [serialize.vector_to_json(x) for x in xs],
        "bounds": serialize.bounds_to_json(bounds),
        "certificate": serialize.certificate_to_json(cert),
    }
    _emit(payload, args.deterministic)
    return EXIT_OK if cert.equality else EXIT_VIOLATION


def _cmd_integral(args) -> int:
    inst = _load(args.infile)
    if inst.path is None:
        raise SchemaError("/path", "integral needs a path")
    if inst.e is None:
        raise SchemaError("/e", "integral needs a reference vector e")
    a1 = inst.a1 if inst.a1 is not None else zero_element(inst.space.algebra)
    a2 = inst.a2 if inst.a2 is not None else zero_element(inst.space.algebra)
    tol = inst.tol if inst.tol is not None else args.tol
    cert = quadrature.verify_integral_corollary(inst.path, inst.e, a1, a2, tol)
    _emit(serialize.certificate_to_json(cert), args.deterministic)
    if not cert.preconditions_ok:
        return EXIT_HYPOTHESIS
    if not cert.details["passed"]:
        return EXIT_VIOLATION
    return EXIT_OK


def _parse_dims(spec: str) -> fuzzing.DimCaps:
    if not spec:
        return fuzzing.DimCaps()
    names = {"block": "max_block", "blocks": "max_blocks", "rank": "max_rank",
             "n": "max_n", "m": "max_m"}
    kwargs = {}
    for part in spec.split(","):
        if "=" not in part:
            raise SchemaError("/dims", f"expected key=value, got {part!r}")
        key, _, value = part.partition("=")
        if key.strip() not in names:
            raise SchemaError("/dims", f"unknown dimension cap {key!r}")
        try:
            kwargs[names[key.strip()]] = int(value)
        except ValueError as exc:
            raise SchemaError("/dims", f"{key}: {value!r} is not an integer") from exc
    return fuzzing.DimCaps(**kwargs)


def _cmd_fuzz(args) -> int:
    theorems = tuple(t.strip() for t in args.theorem.split(",") if t.strip())
    config = fuzzing.FuzzConfig(
        seed=args.seed,
        trials=args.trials,
        dims=_parse_dims(args.dims),
        theorems=theorems,
        tol=args.tol,
        backend=args.backend,
        strategy=args.strategy,
    )
    report = fuzzing.fuzz_campaign(config)
    _emit(report.to_json_dict(), args.deterministic)
    return EXIT_VIOLATION if report.total_failures else EXIT_OK


_COMMANDS = {
    "verify": _cmd_verify,
    "extract": _cmd_extract,
    "construct-equality": _cmd_construct,
    "integral": _cmd_integral,
    "fuzz": _cmd_fuzz,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except SchemaError as exc:
        print(f"revtri: schema error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"revtri: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (HypothesisError, CapabilityError) as exc:
        _emit(_error_payload("hypothesis", exc), getattr(args, "deterministic", True))
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
