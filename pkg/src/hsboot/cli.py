"""Command-line entry point.

Exit codes: 0 success or pass, 1 verification failure (counterexample on
stdout), 2 usage or parameter error, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bootstrap as bs
from . import budgets, formats
from .algebra import FieldSpec, MultiPoly
from .circuits import ABP, Circuit, expand, sparse_to_formula
from .designs import build_design, round_down_pow2, verify_design
from .errors import FormatError, HsbootError, ParameterError, ResourceError
from .hitting import find_annihilator, grid_hitting_set, randomized_pit, verify_hitting_exhaustive
from .plotting import schedule_figure, schedule_tsv
from .reduction import NWSubstitution, ki_extract, nw_substitute

log = logging.getLogger("hsboot")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _emit(args, name: str, data: str | bytes, manifest: formats.RunManifest | None = None) -> None:
    """Write an artifact into --out-dir (atomically) or to stdout."""
    raw = data.encode() if isinstance(data, str) else data
    if manifest is not None:
        manifest.record(name, raw)
    if args.out_dir:
        formats.write_atomic(Path(args.out_dir) / name, raw)
    elif isinstance(data, str):
        sys.stdout.write(data)


def _finish(args, manifest: formats.RunManifest, start: float) -> None:
    manifest.wall_clock = time.perf_counter() - start
    if args.out_dir:
        formats.write_atomic(Path(args.out_dir) / "manifest.json", formats.dumps(manifest.to_dict()))


def _load(path: str):
    return formats.load_algebraic(formats.read_json(path))


def _load_circuit(path: str) -> Circuit:
    obj = _load(path)
    if isinstance(obj, MultiPoly):
        return sparse_to_formula(obj)
    if isinstance(obj, ABP):
        raise FormatError(f"{Path(path).name}: expected a formula or circuit, got an ABP")
    return obj


def _load_poly(path: str) -> MultiPoly:
    obj = _load(path)
    return obj if isinstance(obj, MultiPoly) else expand(obj)


def _sample(F: FieldSpec, text: str | None, default: int) -> list[int]:
    if text is None:
        return list(range(min(default, F.order)))
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError("--sample: expected comma-separated integers") from None


# ------------------------------------------------------------------ commands


def cmd_gen_design(args) -> int:
    k = args.k
    if k >= 2 and k & (k - 1):
        k = round_down_pow2(k)
        log.warning("k=%d is not a power of two; rounded down to %d", args.k, k)
    d = build_design(k, args.c, args.r)
    if args.m is not None:
        d = d.truncated(args.m)
    _emit(args, "design.json", formats.design_to_json(d))
    return EXIT_OK


def cmd_verify_design(args) -> int:
    d = formats.design_from_dict(formats.read_json(args.design))
    res = verify_design(d)
    out = {"ok": res.ok, "reason": res.reason, "i": res.i, "j": res.j, "intersection": res.intersection}
    sys.stdout.write(formats.dumps(out))
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_gen_grid(args) -> int:
    F = FieldSpec.parse(args.field) if args.field else FieldSpec.binary(args.extension_degree)
    h = grid_hitting_set(F, args.n, args.d, _sample(F, args.sample, args.d + 1))
    _emit(args, "grid.hs", formats.hitting_set_to_text(h))
    return EXIT_OK


def cmd_find_annihilator(args) -> int:
    h = formats.read_hitting_set(args.hs)
    q = find_annihilator(h, args.k if args.k is not None else h.claimed.n, args.d)
    _emit(args, "annihilator.json", formats.dumps(formats.poly_to_dict(q)))
    return EXIT_OK


def cmd_verify_hs(args) -> int:
    h = formats.read_hitting_set(args.hs)
    n = args.n if args.n is not None else h.claimed.n
    d = args.d if args.d is not None else h.claimed.d
    res = verify_hitting_exhaustive(h, n, d)
    out = {"ok": res.ok, "checked": res.checked,
           "counterexample": None if res.ok else formats.poly_to_dict(res.counterexample)}
    sys.stdout.write(formats.dumps(out))
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_pit_random(args) -> int:
    c = _load(args.circuit)
    if isinstance(c, MultiPoly):
        c = sparse_to_formula(c)
    sample = _sample(c.field, args.sample, c.field.order)
    res = randomized_pit(c, sample, args.trials, args.seed)
    out = {"nonzero": res.nonzero, "point": list(res.point) if res.point else None, "value": res.value,
           "trials_used": res.trials_used,
           "failure_bound": None if res.failure_bound is None else str(res.failure_bound)}
    sys.stdout.write(formats.dumps(out))
    return EXIT_OK


def _substitution(args) -> tuple[NWSubstitution, Circuit]:
    design = formats.design_from_dict(formats.read_json(args.design))
    q = _load_poly(args.q)
    p = _load_circuit(args.p)
    return NWSubstitution(design, q), p


def cmd_nw_substitute(args) -> int:
    sub, p = _substitution(args)
    _emit(args, "substituted.json", formats.dumps(formats.circuit_to_dict(nw_substitute(p, sub))))
    return EXIT_OK


def cmd_ki_extract(args) -> int:
    sub, p = _substitution(args)
    res = ki_extract(p, sub)
    out = {"t": res.t, "a": res.a, "assignment": {str(k): v for k, v in sorted(res.assignment.items())},
           "p_prime": formats.poly_to_dict(res.p_prime), "p_tilde": formats.poly_to_dict(res.p_tilde),
           "quotient": formats.poly_to_dict(res.quotient), "formula": formats.circuit_to_dict(res.p_tilde_formula),
           "bounds": {"s": res.s, "d": res.d, "D": res.D, "r": res.r, "degree_bound": res.degree_bound,
                      "size": res.p_tilde_formula.size, "size_bound": res.size_bound,
                      "size_bound_ok": res.size_bound_ok}}
    _emit(args, "extraction.json", formats.dumps(out))
    return EXIT_OK


def cmd_bootstrap_report(args) -> int:
    start = time.perf_counter()
    manifest = formats.RunManifest(list(args.argv), args.seed)
    _write_report(args, args.n0, args.epsilon, args.s, args.s_star, args.stage, manifest)
    _finish(args, manifest, start)
    return EXIT_OK


def _write_report(args, n0: int, eps: Fraction, s: int, s_star: int | None, stage: int | None, manifest) -> None:
    if s < 2:
        raise ParameterError("--s must be at least 2")
    sch = bs.schedule_from_paper(n0, eps, s if s_star is None else s_star, min_stages=stage or 0)
    rep = bs.report_from_schedule(sch, s, stage)
    _emit(args, "report.json", formats.dumps(rep), manifest)
    if args.out_dir:
        _emit(args, "schedule.tsv", schedule_tsv(sch), manifest)
        _emit(args, "schedule.png", schedule_figure(sch), manifest)


def cmd_bootstrap_run(args) -> int:
    start = time.perf_counter()
    cfg = formats.read_json(args.config)
    if not isinstance(cfg, dict):
        raise FormatError("$: config must be a JSON object")
    seed = cfg.get("seed", args.seed)
    manifest = formats.RunManifest(list(args.argv), seed, formats.config_digest(cfg))
    with budgets.overrides(cfg.get("budgets", {})):
        if cfg.get("mode", "toy") == "report":
            s_star = _cfg(cfg, "s_star")
            _write_report(args, _cfg(cfg, "n0"), _cfg(cfg, "epsilon", Fraction), _cfg(cfg, "s", int, s_star),
                          s_star, _cfg(cfg, "stage", int, None), manifest)
            status = EXIT_OK
        else:
            artifacts, ok = run_config(cfg)
            for name, data in artifacts.items():
                if args.out_dir or name == "summary.json":
                    _emit(args, name, data, manifest)
                else:
                    manifest.record(name, data.encode())
            status = EXIT_OK if ok else EXIT_FAIL
    _finish(args, manifest, start)
    return status


def _cfg(cfg: dict, key: str, kind=int, default=...):
    if key not in cfg:
        if default is ...:
            raise FormatError(f"{key}: missing")
        return default
    v = cfg[key]
    try:
        if kind is Fraction:
            return Fraction(str(v))
        if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
            raise TypeError
        return kind(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise FormatError(f"{key}: expected {kind.__name__}") from None


def run_config(cfg: dict) -> tuple[dict[str, str], bool]:
    """Execute a toy-mode config; returns artifacts by file name and the pass flag.

    Artifacts carry no timing so equal configs give byte-identical files.
    """
    F = FieldSpec.parse(_cfg(cfg, "field", str))
    n0 = _cfg(cfg, "n0")
    eps = _cfg(cfg, "epsilon", Fraction, Fraction(1))
    s_star = _cfg(cfg, "s_star", int, 2)
    base_spec = cfg.get("base", {"kind": "grid", "side": 2})
    if not isinstance(base_spec, dict):
        raise FormatError("base: expected an object")
    base = bs.make_base(base_spec)
    raw_stages = cfg.get("stages", [])
    if not isinstance(raw_stages, list):
        raise FormatError("stages: expected a list")
    overrides = []
    for j, st in enumerate(raw_stages):
        if not isinstance(st, dict):
            raise FormatError(f"stages[{j}]: expected an object")
        try:
            overrides.append(bs.StageOverride.from_dict(st))
        except ParameterError as exc:
            raise FormatError(f"stages[{j}]: {exc}") from None
    schedule = bs.schedule_from_paper(n0, eps, s_star)
    run = bs.run_toy(F, n0, base, overrides)

    artifacts: dict[str, str] = {"base.hs": formats.hitting_set_to_text(run.base)}
    stage_rows = ["stage\tsource\tk\tannihilator_degree\tl\tm\tevaluation_points\toutput"]
    stages_out = []
    ok = True
    for st in run.stages:
        artifacts[f"stage{st.stage}.hs"] = formats.hitting_set_to_text(st.output)
        artifacts[f"stage{st.stage}_annihilator.json"] = formats.dumps(formats.poly_to_dict(st.q))
        artifacts[f"stage{st.stage}_design.json"] = formats.design_to_json(st.design)
        stage_rows.append(f"{st.stage}\t{len(st.source)}\t{st.design.k}\t{st.annihilator_degree}\t{st.design.l}"
                          f"\t{st.m}\t{len(st.evaluation_points)}\t{len(st.output)}")
        stages_out.append({"stage": st.stage, "checks": st.checks, "notes": st.notes,
                           "design": [st.design.l, st.design.k, st.design.r], "m": st.m,
                           "annihilator_degree": st.annihilator_degree, "cardinality": len(st.output)})
        ok &= all(st.checks.values())
    artifacts["stages.tsv"] = "\n".join(stage_rows) + "\n"
    summary = {
        "field": str(F), "n0": n0, "base": {"kind": base.name, "cardinality": len(run.base)},
        "schedule_checks": [c.to_dict() for c in schedule.checks],
        "calls": [[i, role] for i, role in run.calls],
        "stages": stages_out, "final_cardinality": len(run.final),
    }
    ver = cfg.get("verify")
    if ver is not None:
        if not isinstance(ver, dict):
            raise FormatError("verify: expected an object")
        res = bs.micro_class_check(run, _cfg(ver, "n", int, None), _cfg(ver, "degree", int, 1))
        summary["micro_check"] = {"ok": res.ok, "checked": res.checked,
                                  "counterexample": None if res.ok else formats.poly_to_dict(res.counterexample)}
        ok &= res.ok
    hard = cfg.get("hard_polynomial")
    if hard is not None:
        if not isinstance(hard, dict):
            raise FormatError("hard_polynomial: expected an object")
        hp = bs.derive_hard_polynomial(run, _cfg(hard, "n"), _cfg(hard, "d"))
        artifacts["hard_polynomial.json"] = formats.dumps(formats.poly_to_dict(hp.poly))
        vanishes = all(hp.poly.evaluate(p) == 0 for p in run.final.restrict(hp.poly.num_vars))
        summary["hard_polynomial"] = {"set_size": hp.set_size, "work": hp.work, "vanishes": vanishes}
        ok &= vanishes and not hp.poly.is_zero()
    summary["ok"] = ok
    artifacts["summary.json"] = formats.dumps(summary)
    return artifacts, ok


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for every random choice (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads; never changes output bytes")
    common.add_argument("--out-dir", default=None, help="write artifacts here instead of standard output")
    common.add_argument("--log-level", default="WARNING", help="logging level on standard error")

    p = _Parser(prog="hsboot", description="Hitting-set bootstrapping toolkit.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("gen-design", parents=[common], help="Reed-Solomon (k^c, k, r) design as JSON")
    c.add_argument("--k", type=int, required=True, help="set size (rounded down to a power of two)")
    c.add_argument("--c", type=int, required=True, help="universe exponent, l = k^c")
    c.add_argument("--r", type=int, required=True, help="intersection bound")
    c.add_argument("--m", type=int, default=None, help="keep only the first m sets")
    c.set_defaults(func=cmd_gen_design)

    c = sub.add_parser("verify-design", parents=[common], help="check a design file")
    c.add_argument("--design", required=True)
    c.set_defaults(func=cmd_verify_design)

    c = sub.add_parser("gen-grid", parents=[common], help="grid hitting set S^n")
    fld = c.add_mutually_exclusive_group(required=True)
    fld.add_argument("--field", help="'GF(p)' or 'GF(2^t)'")
    fld.add_argument("--extension-degree", type=int, help="work over GF(2^t) instead of naming a field")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=int, required=True, help="degree the grid must hit")
    c.add_argument("--sample", default=None, help="comma-separated elements (default 0..d)")
    c.set_defaults(func=cmd_gen_grid)

    c = sub.add_parser("find-annihilator", parents=[common], help="canonical annihilator of a hitting set")
    c.add_argument("--hs", required=True, help="hitting-set file")
    c.add_argument("--k", type=int, default=None, help="number of leading coordinates used (default n)")
    c.add_argument("--d", type=int, required=True, help="individual degree bound")
    c.set_defaults(func=cmd_find_annihilator)

    c = sub.add_parser("verify-hs", parents=[common], help="exhaustive hitting check, individual degree <= d")
    c.add_argument("--hs", required=True)
    c.add_argument("--n", type=int, default=None, help="variables (default: header n)")
    c.add_argument("--d", type=int, default=None, help="individual degree (default: header d)")
    c.set_defaults(func=cmd_verify_hs)

    c = sub.add_parser("pit-random", parents=[common], help="seeded randomized identity test")
    c.add_argument("--circuit", required=True, help="circuit, ABP or polynomial JSON")
    c.add_argument("--trials", type=int, default=20)
    c.add_argument("--sample", default=None, help="comma-separated elements (default: whole field)")
    c.set_defaults(func=cmd_pit_random)

    for name, fn, what in (("nw-substitute", cmd_nw_substitute, "circuit for p(q(y|S_1), ..., q(y|S_m))"),
                           ("ki-extract", cmd_ki_extract, "extract a nonzero multiple of q")):
        c = sub.add_parser(name, parents=[common], help=what)
        c.add_argument("--design", required=True, help="design JSON")
        c.add_argument("--q", required=True, help="polynomial or circuit JSON for q")
        c.add_argument("--p", required=True, help="formula JSON for p")
        c.set_defaults(func=fn)

    b = sub.add_parser("bootstrap", help="recursive hitting-set generator")
    bsub = b.add_subparsers(dest="action", metavar="ACTION", parser_class=_Parser)
    bsub.required = True
    c = bsub.add_parser("run", parents=[common], help="execute a JSON config (toy or report mode)")
    c.add_argument("--config", required=True)
    c.set_defaults(func=cmd_bootstrap_run)
    c = bsub.add_parser("report", parents=[common], help="exact symbolic cost report")
    c.add_argument("--n0", type=int, required=True)
    c.add_argument("--epsilon", type=_fraction, required=True)
    c.add_argument("--s", type=int, required=True, help="size parameter")
    c.add_argument("--s-star", type=int, default=None, help="stop threshold (default s)")
    c.add_argument("--stage", type=int, default=None, help="report this stage (default: last)")
    c.set_defaults(func=cmd_bootstrap_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        print("hsboot: error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ResourceError as exc:
        extra = f" (projected {exc.projected})" if exc.projected is not None else ""
        print(f"hsboot: resource budget exceeded: {exc}{extra}", file=sys.stderr)
        return EXIT_RESOURCE
    except (HsbootError, ValueError) as exc:
        print(f"hsboot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"hsboot: error: {exc.args[0]}: missing", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
