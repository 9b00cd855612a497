"""Command-line interface.

Exit status: 0 on success, 2 when an inequality is violated, 1 on any
structural, configuration or document error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .documents import DocumentError, InstanceDocument, Source, dumps_function, load_function, load_instance
from .hypergroup import FAMILIES, compute_haar, convolve, family_instance, haar_from_invariance, invariance_residual, validate_hypergroup
from .norms import lebesgue_norm, lorentz_norm
from .potential import RieszParams, riesz_kernel, riesz_potential, validate_quasimetric
from .steps import decreasing_rearrangement, distribution, maximal
from .verify import ConfigError, SuiteConfig, SuiteError, dumps_report, random_function, report_document, results_csv, run_suite

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _exponent(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(val):
        raise argparse.ArgumentTypeError("nan is not an exponent")
    return val


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _emit(obj, out: str | None = None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(_finite(obj), indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def _function(doc: InstanceDocument, ref: str) -> np.ndarray:
    """A function named in the instance, or else a function file."""
    if ref in doc.functions:
        return doc.functions[ref]
    n = doc.table.n if doc.table is not None else None
    return load_function(ref, n)


def cmd_gen(args) -> int:
    table = family_instance(args.family, args.size)
    rng = np.random.default_rng(args.seed)
    doc = InstanceDocument(
        table=table,
        haar=compute_haar(table),
        functions={"f": random_function(rng, table.n), "g": random_function(rng, table.n)},
        meta={"family": args.family, "size": args.size, "seed": args.seed},
    )
    _emit(doc.dumps(), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = load_instance(args.instance)
    out: dict = {}
    ok = True
    if doc.table is not None:
        report = validate_hypergroup(doc.table, tol=args.tol)
        out["hypergroup"] = report.to_dict()
        ok &= report.passed
    if doc.rho is not None:
        qm = validate_quasimetric(doc.rho)
        out["quasimetric"] = qm.to_dict()
        ok &= qm.passed
    if doc.growth is not None:
        out["growth_residual"] = doc.growth.growth_residual()
    if not out:
        raise ConfigError("nothing to validate: the document has no hypergroup, rho or growth block")
    _emit(out)
    return EXIT_OK if ok else EXIT_ERROR


def cmd_haar(args) -> int:
    doc = load_instance(args.instance)
    table = doc.require_table()
    haar = compute_haar(table)
    solved = haar_from_invariance(table)
    _emit({
        "weights": haar.weights.tolist(),
        "invariance_residual": invariance_residual(table, haar.weights),
        "solver_gap": float(np.max(np.abs(solved - haar.weights))),
    })
    return EXIT_OK


def cmd_convolve(args) -> int:
    doc = load_instance(args.instance)
    table = doc.require_table()
    h = convolve(table, doc.weights(), _function(doc, args.f), _function(doc, args.g))
    _emit(dumps_function(h), args.out)
    return EXIT_OK


def cmd_rearrange(args) -> int:
    doc = load_instance(args.instance)
    haar = doc.weights()
    f = _function(doc, args.f)
    fstar = decreasing_rearrangement(f, haar)
    _emit({
        "distribution": distribution(f, haar).to_dict(),
        "rearrangement": fstar.to_dict(),
        "maximal": maximal(fstar).to_dict(),
    })
    return EXIT_OK


def cmd_norm(args) -> int:
    doc = load_instance(args.instance)
    haar = doc.weights()
    f = _function(doc, args.f)
    try:
        if args.q is None:
            val = lebesgue_norm(f, haar, args.p)
        else:
            val = lorentz_norm(f, haar, args.p, args.q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit({"p": args.p, "q": args.q, "norm": val})
    return EXIT_OK


def cmd_potential(args) -> int:
    doc = load_instance(args.instance)
    table = doc.require_table()
    if doc.growth is not None:
        radii = doc.growth.radii
    elif doc.rho is not None:
        radii = doc.rho[table.identity]
    else:
        raise ConfigError("potential needs radii: supply a 'growth' block or a 'rho' matrix")
    try:
        params = RieszParams(args.alpha, args.N)
        kernel = riesz_kernel(radii, params, args.policy)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    vals = riesz_potential(table, doc.weights(), _function(doc, args.f), kernel)
    _emit(dumps_function(vals), args.out)
    return EXIT_OK


def _suite_config(args) -> SuiteConfig:
    settings: dict = {}
    if args.config:
        src = Source(args.config)
        data = src.data
        if isinstance(data, dict) and isinstance(data.get("suite"), dict):
            data = data["suite"]
        if not isinstance(data, dict):
            raise src.error(None, "a suite config must be a JSON object")
        settings.update(data)
    for key in ("seed", "trials", "sizes", "families", "jobs"):
        val = getattr(args, key)
        if val is not None:
            settings[key] = val
    return SuiteConfig.from_dict(settings)


def cmd_verify(args) -> int:
    cfg = _suite_config(args)
    results, summary = run_suite(cfg)
    doc = report_document(cfg, results, summary)
    _emit(dumps_report(doc), args.out)
    if args.csv:
        Path(args.csv).write_text(results_csv(results))
    stream = sys.stderr if not args.out else sys.stdout
    for name, s in summary["checks"].items():
        stream.write(f"{name:32s} trials={s['trials']:5d} evals={s['evaluations']:8d} "
                     f"violations={s['violations']:6d} vacuous={s['vacuous']:5d} max_ratio={s['max_ratio']:.6g}\n")
    return EXIT_VIOLATION if summary["total_violations"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hyperlorentz", description="Convolution and Lorentz-norm tools on finite commutative hypergroups.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="emit a builder-family instance with random functions f and g")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(run=cmd_gen)

    p = sub.add_parser("validate", help="check the hypergroup axioms and any quasi-metric")
    p.add_argument("instance")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("haar", help="print Haar weights")
    p.add_argument("instance")
    p.set_defaults(run=cmd_haar)

    p = sub.add_parser("convolve", help="convolve two functions (names in the instance or function files)")
    p.add_argument("instance")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--out")
    p.set_defaults(run=cmd_convolve)

    p = sub.add_parser("rearrange", help="distribution function, decreasing rearrangement and maximal function")
    p.add_argument("instance")
    p.add_argument("f")
    p.set_defaults(run=cmd_rearrange)

    p = sub.add_parser("norm", help="Lebesgue norm, or Lorentz norm when --q is given")
    p.add_argument("instance")
    p.add_argument("f")
    p.add_argument("--p", type=_exponent, required=True)
    p.add_argument("--q", type=_exponent)
    p.set_defaults(run=cmd_norm)

    p = sub.add_parser("potential", help="Riesz potential with kernel radius^(alpha - N)")
    p.add_argument("instance")
    p.add_argument("f")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--policy", choices=("zero", "cap"), default="zero")
    p.add_argument("--out")
    p.set_defaults(run=cmd_potential)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--families", type=_str_list)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(run=cmd_verify)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
    except DocumentError as exc:
        sys.stderr.write(f"{exc}\n")
    except SuiteError as exc:
        sys.stderr.write(f"error: {exc}\nreplay instance: {json.dumps(exc.instance)}\n")
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
    return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
