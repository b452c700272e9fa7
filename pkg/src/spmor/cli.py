"""Command-line front end.

Exit codes: 0 ok, 2 input error, 3 numerical failure.
"""

import argparse
import datetime
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .analysis import (
    MATCH_TOL,
    DOUBLED_MATCH_TOL,
    compute_moments,
    frequency_grid,
    match_report,
    passivity_sample,
    sweep_error,
    sweep_points,
)
from .densela import DEFAULT_TOL
from .errors import (
    ParseError,
    RelationViolated,
    SingularMatrix,
    SpmorError,
    TargetUnreachable,
    ValidationError,
)
from .krylov import build_basis, make_operator
from .linearize import linearize
from .netlist import assemble_mna, mna_to_second_order, parse_netlist
from .reduce import higher_order_reduce, prima_reduce, sprim_reduce
from .serialize import model_from_dict, model_to_dict
from .synthetic import rc_ladder, rlc_ladder
from .systems import (
    FirstOrderSystem,
    HigherOrderSystem,
    SpecialSecondOrderSystem,
    hermitian_structure,
    is_hermitian,
    verify_j_relations,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

S0_PRESETS = {
    "peec": 2 * np.pi * 1e9,
    "package": 5 * np.pi * 1e9,
    "shaft": np.pi * 1e3,
}

METHODS = ("prima", "sprim", "higher")


class InputError(SpmorError):
    pass


def parse_s0(text):
    """Real or complex expansion point; ``a+bi``/``a+bj`` or a preset name."""
    key = text.strip().lower()
    if key in S0_PRESETS:
        return S0_PRESETS[key]
    try:
        z = complex(key.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad expansion point {text!r}") from None
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise argparse.ArgumentTypeError(f"expansion point must be finite, got {text!r}")
    return z.real if z.imag == 0 else z


def positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def write_atomic(path, text):
    """Write via a temporary file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _config(args):
    return {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k != "func"}


def envelope(args, payload):
    out = {
        "tool": "spmor",
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "metadata": {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()},
    }
    out.update(payload)
    return out


def emit(args, obj, path=None):
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def load_input(path):
    """Return ``(system, netlist_or_None)`` for a netlist or JSON model file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            return model_from_dict(json.loads(text)), None
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{path}: bad model file: {exc}") from None
    nl = parse_netlist(text)
    return mna_to_second_order(assemble_mna(nl)), nl


def _reduce(method, sys_, fo, lmap, basis, tol):
    if method == "prima":
        return prima_reduce(fo, basis)
    if method == "sprim":
        if not isinstance(sys_, SpecialSecondOrderSystem):
            raise InputError("sprim needs a special second-order system (netlist or second_order model)")
        return sprim_reduce(sys_, fo, lmap, basis, tol)
    if not isinstance(sys_, HigherOrderSystem):
        raise InputError("higher needs a higher_order model file")
    return higher_order_reduce(sys_, fo, basis, tol)


def _basis(fo, s0, n, tol):
    return build_basis(make_operator(fo, s0), target_n=n, tol=tol)


def _match_tol(model, s0, args):
    if args.match_tol is not None:
        return args.match_tol
    doubled = model.hermitian_source and np.imag(s0) == 0 and model.kind != "prima"
    return DOUBLED_MATCH_TOL if doubled else MATCH_TOL


def _structure_checks(model):
    out = {"state_dim": model.state_dim, "first_order_dim": model.system.N1}
    if model.kind != "prima":
        out["hermitian"] = bool(is_hermitian(model.structured))
    return out


def cmd_parse(args):
    sys_, nl = load_input(args.input)
    if nl is None:
        raise InputError("parse expects a netlist file")
    kinds = {k: len(nl.of_kind(k)) for k in ("R", "C", "L", "K", "I")}
    summary = {
        "N": sys_.N,
        "N0": sys_.N0,
        "m": sys_.m,
        "hermitian": bool(is_hermitian(sys_)),
        "nodes": len(nl.nodes),
        "elements": kinds,
    }
    emit(args, envelope(args, summary), args.out)
    return EXIT_OK


def cmd_reduce(args):
    sys_, _ = load_input(args.input)
    fo, lmap = linearize(sys_)
    basis = _basis(fo, args.s0, args.n, args.tol)
    model = _reduce(args.method, sys_, fo, lmap, basis, args.tol)
    report = {
        "requested_n": args.n,
        "achieved_n": basis.n,
        "basis": basis.stats(),
        "structure": _structure_checks(model),
        "provenance": model.provenance(),
    }
    if args.k:
        rep = match_report(fo, model, args.s0, args.k, _match_tol(model, args.s0, args))
        report["match"] = rep.to_dict()
    out = envelope(args, model_to_dict(model))
    out["report"] = report
    emit(args, out, args.out)
    if args.report:
        emit(args, envelope(args, {"report": report}), args.report)
    return EXIT_OK


def cmd_moments(args):
    sys_, _ = load_input(args.input)
    fo, _ = linearize(sys_)
    table = compute_moments(fo, args.s0, args.k)
    emit(args, envelope(args, {"moments": table.to_dict()}), args.out)
    return EXIT_OK


def _entries(text):
    if not text:
        return None
    out = []
    for part in text.split(";"):
        i, j = part.split(",")
        out.append((int(i), int(j)))
    return out


def cmd_sweep(args):
    sys_, _ = load_input(args.input)
    f = frequency_grid(args.fmin, args.fmax, args.points, args.scale)
    resp = sweep_points(sys_, f, workers=args.workers)
    try:
        entries = _entries(args.entries)
    except ValueError:
        raise InputError(f"bad --entries {args.entries!r}; use 'i,j;i,j'") from None
    text = resp.to_csv(entries)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if resp.failed:
        sys.stderr.write(f"{len(resp.failed)} sample point(s) failed (near a pole)\n")
    return EXIT_OK


def cmd_compare(args):
    sys_, _ = load_input(args.input)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if not methods or bad:
        raise InputError(f"--methods must be a non-empty subset of {METHODS}, got {args.methods!r}")
    fo, lmap = linearize(sys_)
    basis = _basis(fo, args.s0, args.n, args.tol)
    f = frequency_grid(args.fmin, args.fmax, args.points, args.scale)
    exact = sweep_points(sys_, f, workers=args.workers)
    results, columns = {}, {}
    for method in methods:
        model = _reduce(method, sys_, fo, lmap, basis, args.tol)
        k = args.k or 2 * basis.j + 2
        rep = match_report(fo, model, args.s0, k, _match_tol(model, args.s0, args))
        err = sweep_error(exact, sweep_points(model, f, workers=args.workers))
        results[method] = {
            "match": rep.to_dict(),
            "sweep_error": err.to_dict(),
            "structure": _structure_checks(model),
        }
        columns[method] = err.per_point
    payload = {
        "requested_n": args.n,
        "achieved_n": basis.n,
        "basis": basis.stats(),
        "results": results,
    }
    os.makedirs(args.out_dir, exist_ok=True)
    emit(args, envelope(args, payload), os.path.join(args.out_dir, "compare.json"))
    lines = ["f_hz," + ",".join(f"err_{m}" for m in methods)]
    for idx, fk in enumerate(f):
        lines.append(",".join([repr(float(fk))] + [repr(float(columns[m][idx])) for m in methods]))
    write_atomic(os.path.join(args.out_dir, "sweep_error.csv"), "\n".join(lines) + "\n")
    summary = {m: {"matched": r["match"]["matched_count"], "max_err": r["sweep_error"]["max"]}
               for m, r in results.items()}
    sys.stdout.write(json.dumps({"achieved_n": basis.n, "j": basis.j, "summary": summary}) + "\n")
    return EXIT_OK


def cmd_check(args):
    sys_, nl = load_input(args.input)
    checks, ok = {}, True
    if isinstance(sys_, FirstOrderSystem):
        raise InputError("check needs a second-order or higher-order system")
    herm = is_hermitian(sys_)
    checks["hermitian"] = {"ok": herm.ok, "failures": herm.failures}
    ok &= herm.ok
    if herm.ok and np.imag(args.s0) == 0:
        fo, _ = linearize(sys_)
        try:
            res = verify_j_relations(fo, hermitian_structure(sys_, float(np.real(args.s0))), args.s0)
            checks["j_relations"] = {"ok": True, "residuals": res}
        except RelationViolated as exc:
            checks["j_relations"] = {"ok": False, "error": str(exc)}
            ok = False
    else:
        checks["j_relations"] = {"ok": None, "skipped": "needs a Hermitian system and real s0"}
    if nl is not None:
        rng = np.random.default_rng(args.seed)
        scale = abs(args.s0) if args.s0 else 1.0
        pts = scale * (rng.uniform(0.01, 10.0, args.samples) + 1j * rng.uniform(-10.0, 10.0, args.samples))
        rep = passivity_sample(sys_, pts)
        checks["passivity"] = rep.to_dict()
        ok &= rep.ok
    emit(args, envelope(args, {"ok": bool(ok), "checks": checks}), args.out)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_gen(args):
    if args.kind == "rc-ladder":
        if args.couplings:
            raise InputError("--couplings applies to rlc-ladder only")
        text = rc_ladder(args.sections, args.seed)
    else:
        text = rlc_ladder(args.sections, args.seed, args.couplings)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="spmor", description="Structure-preserving Krylov model-order reduction")
    p.add_argument("--version", action="version", version=f"spmor {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, s0=True, out=True):
        sp.add_argument("input", help="netlist or JSON model file")
        if s0:
            sp.add_argument("--s0", type=parse_s0, default=S0_PRESETS["peec"],
                            help="expansion point: number, a+bi, or peec|package|shaft (default peec)")
        if out:
            sp.add_argument("--out", help="output file (default stdout)")

    sp = sub.add_parser("parse", help="parse a netlist and summarize it")
    common(sp, s0=False)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("reduce", help="build a reduced model")
    common(sp)
    sp.add_argument("--method", choices=METHODS, default="sprim")
    sp.add_argument("--n", type=positive_int, required=True, help="target dimension (snapped up to a block boundary)")
    sp.add_argument("--tol", type=positive_float, default=DEFAULT_TOL, help="deflation and rank tolerance")
    sp.add_argument("--k", type=int, default=0, help="also report the first k moments' match")
    sp.add_argument("--match-tol", type=positive_float, default=None)
    sp.add_argument("--report", help="also write the run report to this file")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("moments", help="moments about s0")
    common(sp)
    sp.add_argument("--k", type=int, default=4)
    sp.set_defaults(func=cmd_moments)

    def grid(sp):
        sp.add_argument("--fmin", type=positive_float, default=1e8)
        sp.add_argument("--fmax", type=positive_float, default=1e10)
        sp.add_argument("--points", type=int, default=200)
        sp.add_argument("--scale", choices=("log", "linear"), default="log")
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("sweep", help="frequency response CSV")
    common(sp, s0=False)
    grid(sp)
    sp.add_argument("--entries", help="1-based entries 'i,j;i,j' (default all)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("compare", help="reduce with several methods from one shared basis")
    common(sp, out=False)
    sp.add_argument("--n", type=positive_int, required=True)
    sp.add_argument("--methods", default="prima,sprim")
    sp.add_argument("--tol", type=positive_float, default=DEFAULT_TOL)
    sp.add_argument("--k", type=int, default=0, help="moments compared (default 2j+2)")
    sp.add_argument("--match-tol", type=positive_float, default=None)
    sp.add_argument("--out-dir", required=True)
    grid(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("check", help="Hermitian structure, J-relations and passivity samples")
    common(sp)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("gen", help="write a synthetic netlist")
    sp.add_argument("--kind", choices=("rc-ladder", "rlc-ladder"), required=True)
    sp.add_argument("--sections", type=positive_int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--couplings", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)
    return p


def _fail(code, message, payload=None):
    err = {"error": message, "exit_code": code}
    if payload:
        err.update(payload)
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except TargetUnreachable as exc:
        return _fail(EXIT_NUMERIC, str(exc), {"target_n": exc.target_n, "basis": exc.basis.stats()})
    except (ParseError, ValidationError, InputError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    except (SingularMatrix, RelationViolated) as exc:
        return _fail(EXIT_NUMERIC, f"{type(exc).__name__}: {exc}")
    except SpmorError as exc:
        return _fail(EXIT_NUMERIC, f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        return _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())
