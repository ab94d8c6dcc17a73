"""Command-line front end.

Subcommands: ``kernel eval|sweep``, ``correlator``, ``oracle`` and
``verify``.  Exit codes: 0 success, 1 verification failure, 2 usage error,
3 runtime or domain error.
"""

from __future__ import annotations

import argparse
import configparser
import inspect
import itertools
import json
import math
import sys
from pathlib import Path

from . import kernels, oracles
from .correlators import euclidean_correlator, lorentzian_correlator, torus_correlator
from .errors import ConfigError, LiouvilleError
from .io import load_spec, make_manifest, torus_from_dict, write_csv, write_json
from .kernels import TorusSpec
from .quadrature import QuadratureConfig
from .verification import SUITE_DEFAULTS, SUITES

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# kernel table: name -> (parameters, evaluator)


def _torus_green(T, t, x):
    return kernels.torus_green(TorusSpec(T), (t, x), (0.0, 0.0))


def _torus_green_truncated(T, N, t, x):
    return kernels.torus_green_truncated(TorusSpec(T, int(N)), (t, x), (0.0, 0.0))


KERNELS = {
    "green_euclidean": (("t", "x"), lambda t, x: kernels.green_euclidean((t, x))),
    "green_boundary": (("t", "x"), kernels.green_boundary),
    "green_analytic": (("tau_re", "tau_im", "x"), lambda a, b, x: kernels.green_analytic(complex(a, b), x)),
    "green_reflected": (("tau_re", "tau_im", "x"), lambda a, b, x: kernels.green_reflected(complex(a, b), x)),
    "lightcone_distance": (("tau_re", "tau_im", "x"), lambda a, b, x: float(kernels.lightcone_distance(complex(a, b), x))),
    "lattice_sum_1d": (("a", "theta"), kernels.lattice_sum_1d),
    "zeta_cos_identity": (("theta",), kernels.zeta_cos_identity),
    "heat_kernel": (("T", "s", "x", "y"), lambda T, s, x, y: kernels.heat_kernel(TorusSpec(T), s, x, y)),
    "torus_green": (("T", "t", "x"), _torus_green),
    "torus_green_truncated": (("T", "N", "t", "x"), _torus_green_truncated),
}


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# configuration


def _config(args, base=None):
    """Merge suite/base defaults, the config file and explicit flags."""
    data = (base or QuadratureConfig()).to_dict()
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        if not parser.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        if "quadrature" not in parser:
            raise ConfigError(f"{args.config} has no [quadrature] section")
        data.update(dict(parser["quadrature"]))
    for flag, key in (
        ("rel_tol", "rel_tol"),
        ("abs_tol", "abs_tol"),
        ("seed", "mc_seed"),
        ("mc_samples", "mc_samples"),
        ("delta_lc", "delta_lc"),
        ("max_evals", "max_evals"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            data[key] = v
    return QuadratureConfig.from_mapping(data)


def _emit(payload, args, text_lines):
    """Print human-readable lines, or JSON if requested; write ``--out``."""
    if args.format == "json":
        text = write_json(payload)
        if args.out:
            Path(args.out).write_text(text + "\n")
        else:
            print(text)
        if args.out:
            for line in text_lines:
                print(line)
        return
    for line in text_lines:
        print(line)
    if args.out:
        write_json(payload, args.out)


def _fmt_complex(z):
    z = complex(z)
    if z.imag == 0.0:
        return f"{z.real:.15g}"
    return f"{z.real:.15g}{z.imag:+.15g}j"


# ---------------------------------------------------------------------------
# kernel


def _kernel_grid(args):
    names, fn = KERNELS[args.fn]
    values = []
    for name in names:
        v = getattr(args, name)
        if v is None:
            raise UsageError(f"--fn {args.fn} needs --{name.replace('_', '-')}")
        values.append(v)
    return names, fn, values


def _kernel_rows(args):
    names, fn, values = _kernel_grid(args)
    rows = []
    for combo in itertools.product(*values):
        val = complex(fn(*combo))
        row = dict(zip(names, combo))
        row.update(re=val.real, im=val.imag)
        if args.fn in ("torus_green", "torus_green_truncated"):
            T, t, x = row["T"], row["t"], row["x"]
            cyl = kernels.green_euclidean((t, x))
            row["renormalized"] = val.real - math.pi * T / 6.0
            row["cylinder"] = cyl
            row["abs_error"] = abs(row["renormalized"] - cyl)
        rows.append(row)
    cols = list(names) + ["re", "im"]
    if args.fn in ("torus_green", "torus_green_truncated"):
        cols += ["renormalized", "cylinder", "abs_error"]
    return rows, cols


def cmd_kernel(args):
    rows, cols = _kernel_rows(args)
    manifest = make_manifest(f"kernel {args.action} --fn {args.fn}", out=args.out)
    if args.action == "eval":
        lines = []
        for r in rows:
            inputs = ", ".join(f"{k}={r[k]:.12g}" for k in KERNELS[args.fn][0])
            lines.append(f"{args.fn}({inputs}) = {_fmt_complex(complex(r['re'], r['im']))}")
        _emit({"manifest": manifest, "fn": args.fn, "records": rows}, args, lines)
        return EXIT_OK
    fmt = args.format or "csv"
    if fmt == "json":
        text = write_json({"manifest": manifest, "fn": args.fn, "columns": cols, "records": rows}, args.out)
        if not args.out:
            print(text)
        return EXIT_OK
    if args.out:
        write_csv(rows, cols, args.out, manifest)
        summary = {"manifest": manifest, "fn": args.fn, "rows": len(rows)}
        if "abs_error" in cols:
            summary["max_abs_error"] = max(r["abs_error"] for r in rows)
        write_json(summary, str(args.out) + ".summary.json")
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        import csv

        print(f"# manifest: {json.dumps(manifest)}")
        w = csv.writer(sys.stdout)
        w.writerow(cols)
        for r in rows:
            w.writerow([r[c] for c in cols])
    return EXIT_OK


# ---------------------------------------------------------------------------
# correlator


def cmd_correlator(args):
    spec, extras = load_spec(args.spec)
    if args.b is not None or args.mu is not None:
        raise UsageError("--b/--mu are taken from the spec file for `correlator`")
    cfg = _config(args, QuadratureConfig.from_mapping(extras.get("config", {})))
    if args.mode == "euclidean":
        res = euclidean_correlator(spec, cfg)
    elif args.mode == "lorentzian":
        res = lorentzian_correlator(spec, cfg)
    else:
        torus = torus_from_dict(extras.get("torus"))
        if args.T is not None:
            torus = TorusSpec(args.T, args.N if args.N is not None else (torus.N if torus else 64))
        if torus is None:
            raise UsageError("torus mode needs --T or a 'torus' entry in the spec file")
        res = torus_correlator(spec, torus, cfg, truncated=args.truncated)
    manifest = make_manifest(f"correlator --mode {args.mode}", spec.params, cfg, spec, args.out)
    manifest["spec_path"] = str(args.spec)
    lines = [
        f"value = {_fmt_complex(res.value)} +/- {res.error_estimate:.3e}",
        f"evals = {res.evals}  converged = {res.converged}  w = {res.w}  method = {res.method}",
    ]
    _emit({"manifest": manifest, "result": res.to_dict()}, args, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle(args):
    what = args.which
    b = 0.3 if args.b is None else args.b
    mu = 1.0 if args.mu is None else args.mu
    if what in ("two-point", "commutator") and (args.alpha is None or args.t is None or args.x is None):
        raise UsageError(f"{what} needs --alpha, --t and --x")
    if what == "tadpole":
        ib = oracles.tadpole_Ib(b)
        rec = {"b": b, "mu": mu, "I_b": ib, "c_b": -mu * ib}
        lines = [f"I_b(b={b}) = {ib:.15g}", f"c_b = -mu I_b = {-mu * ib:.15g}"]
        if args.integrals:
            cfg = _config(args, QuadratureConfig(rel_tol=1e-11, abs_tol=1e-13))
            ti = oracles.tadpole_t_integral(b, cfg)
            yi = oracles.tadpole_y_integral(b, cfg)
            rec.update(t_integral=ti.value.real, t_error=ti.error_estimate,
                       y_integral=yi.value.real, y_error=yi.error_estimate)
            lines += [f"t-integral = {ti.value.real:.15g} +/- {ti.error_estimate:.2e}",
                      f"y-integral = {yi.value.real:.15g} +/- {yi.error_estimate:.2e}"]
    elif what == "two-point":
        v = oracles.neutral_two_point(args.alpha, args.t, args.x, order=args.order, b=args.b)
        rec = {"alpha": args.alpha, "t": args.t, "x": args.x, "order": args.order, "value": v}
        lines = [f"two-point[{args.order}](alpha={args.alpha}, t={args.t}, x={args.x}) = {_fmt_complex(v)}"]
    elif what == "commutator":
        v = oracles.vacuum_commutator(args.alpha, args.t, args.x)
        rec = {"alpha": args.alpha, "t": args.t, "x": args.x, "value": v}
        lines = [f"commutator(alpha={args.alpha}, t={args.t}, x={args.x}) = {_fmt_complex(v)}"]
    else:
        if args.top is None or args.bottom is None or args.z is None:
            raise UsageError("pfq needs --top, --bottom and --z")
        spec = oracles.HypergeometricSpec(tuple(args.top), tuple(args.bottom), args.z)
        v = oracles.hypergeometric_pFq(spec)
        rec = {"top": args.top, "bottom": args.bottom, "z": args.z, "value": v}
        lines = [f"{len(args.top)}F{len(args.bottom)} = {v:.15g}"]
    manifest = make_manifest(f"oracle {what}", {"b": b, "mu": mu}, out=args.out)
    _emit({"manifest": manifest, "result": rec}, args, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    suite = SUITES[args.suite]
    cfg = _config(args, SUITE_DEFAULTS[args.suite])
    kwargs = {"cfg": cfg}
    if args.b is not None:
        kwargs["b"] = args.b
    if args.mu is not None:
        kwargs["mu"] = args.mu
    for name in ("w", "eps", "n_pairs", "margin", "n_shifts"):
        v = getattr(args, name, None)
        if v is not None:
            kwargs[name] = v
    accepted = inspect.signature(suite).parameters
    unknown = [k for k in kwargs if k not in accepted]
    if unknown:
        raise UsageError(f"suite {args.suite} does not take {', '.join('--' + u.replace('_', '-') for u in unknown)}")
    try:
        checks = suite(**kwargs)
    except ValueError as exc:
        if isinstance(exc, LiouvilleError):
            raise
        raise UsageError(str(exc)) from None
    passed = all(c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{args.suite}: {'PASS' if passed else 'FAIL'} ({sum(c.passed for c in checks)}/{len(checks)} checks)")
    params = {k: kwargs.get(k) for k in ("b", "mu") if k in kwargs}
    manifest = make_manifest(f"verify {args.suite}", params or None, cfg, out=args.out)
    payload = {
        "manifest": manifest,
        "suite": args.suite,
        "passed": passed,
        "checks": [vars(c) for c in checks],
    }
    _emit(payload, args, lines)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and quadrature")
    g.add_argument("--b", type=float, help="coupling b")
    g.add_argument("--mu", type=float, help="cosmological constant")
    g.add_argument("--rel-tol", type=float)
    g.add_argument("--abs-tol", type=float)
    g.add_argument("--max-evals", type=int)
    g.add_argument("--seed", type=int, help="Monte Carlo seed (also seeds random configurations)")
    g.add_argument("--mc-samples", type=int)
    g.add_argument("--delta-lc", type=float, help="light-cone and singular-point exclusion radius")
    g.add_argument("--config", help="INI file with a [quadrature] section")
    g.add_argument("--out", help="output file")
    g.add_argument("--format", choices=("csv", "json"), help="output format")

    p = _Parser(prog="liouville-cyl", description="Timelike Liouville correlators on the cylinder.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", parents=[common], help="evaluate Green's functions and lattice sums")
    k.add_argument("action", choices=("eval", "sweep"))
    k.add_argument("--fn", required=True, choices=sorted(KERNELS))
    for name in ("t", "x", "tau-re", "tau-im", "a", "theta", "T", "N", "s", "y"):
        k.add_argument(f"--{name}", type=_float_list, help="number or comma-separated list")
    k.set_defaults(handler=cmd_kernel)

    c = sub.add_parser("correlator", parents=[common], help="evaluate a correlator from a JSON spec file")
    c.add_argument("--spec", required=True)
    c.add_argument("--mode", choices=("euclidean", "lorentzian", "torus"), default="euclidean")
    c.add_argument("--T", type=float, help="torus period (torus mode)")
    c.add_argument("--N", type=int, help="Fourier cutoff (torus mode with --truncated)")
    c.add_argument("--truncated", action="store_true", help="use the truncated torus Green's function")
    c.set_defaults(handler=cmd_correlator)

    o = sub.add_parser("oracle", parents=[common], help="closed-form reference values")
    o.add_argument("which", choices=("tadpole", "two-point", "commutator", "pfq"))
    o.add_argument("--alpha", type=float)
    o.add_argument("--t", type=float)
    o.add_argument("--x", type=float)
    o.add_argument("--order", type=int, choices=(12, 21), default=12)
    o.add_argument("--top", type=_float_list)
    o.add_argument("--bottom", type=_float_list)
    o.add_argument("--z", type=float)
    o.add_argument("--integrals", action="store_true", help="tadpole: also evaluate both integral forms")
    o.set_defaults(handler=cmd_oracle)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--w", type=int, help="screening number (locality)")
    v.add_argument("--eps", type=_float_list, help="bump widths (indefiniteness)")
    v.add_argument("--n-pairs", type=int, help="random spacelike pairs (locality)")
    v.add_argument("--margin", type=float, help="light-cone margin (locality)")
    v.add_argument("--n-shifts", type=int, help="random translations (translation)")
    v.set_defaults(handler=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LiouvilleError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # anything else is an infrastructure failure
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
