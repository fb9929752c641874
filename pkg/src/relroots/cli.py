"""Command-line interface: ``relroots <command> ...``.

Machine-readable results go to stdout (or ``--out``); diagnostics go to
stderr. Exit status is 0 when every requested check passed, 1 when a check
failed and 2 on invalid input or other errors. Each invocation also writes a
JSON run manifest (flags, versions, cache checksums).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import platform
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import gmpy2
import mpmath
import numpy as np

from . import __version__, kernels
from .asympt import convergence_scan
from .density import (
    SUMMARY_HEADER,
    DensityConfig,
    NotFound,
    bundle_density_crosscheck,
    grid_targets,
    locate_many,
    locate_real_root_near,
    root_near_minus_one,
)
from .errors import InvalidInput, RelRootsError
from .graphs import (
    Multigraph,
    TwoTerminalGraph,
    bundle,
    complete_gadget,
    complete_graph,
    cycle,
    cycle_of_cliques,
    parse_graph_text,
    path,
    path_gadget,
)
from .kncache import KnCache, set_default_cache
from .polyalg import IntPolynomial, format_poly_text, parse_poly_text
from .relcore import (
    exact_value,
    monte_carlo_rel,
    rel_bruteforce,
    rel_complete,
    rel_cycle_gadget,
    rel_deletion_contraction,
    rel_substituted,
    reliability,
    srel_bruteforce,
    srel_by_identification,
    srel_complete,
)
from .rootfind import (
    all_roots,
    conjugate_symmetric,
    roots_to_csv,
    roots_to_svg,
    vieta_check,
    zero_counting_summary,
)

log = logging.getLogger("relroots")

FAMILY_ARITY = {"K": 1, "cycle": 1, "bundle": 1, "path": 1, "cycle-gadget": 2}
BRUTE_CROSSCHECK_SLOTS = 20
DC_CROSSCHECK_SLOTS = 40


@dataclass
class Run:
    args: argparse.Namespace
    cache: KnCache
    checks: dict[str, bool] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def check(self, name: str, ok: bool) -> None:
        self.checks[name] = bool(ok)
        if not ok:
            log.error("check failed: %s", name)

    def write(self, path: str | os.PathLike, text: str) -> None:
        write_atomic(path, text)
        self.outputs.append(str(path))

    def emit(self, text: str) -> None:
        """Send ``text`` to --out if given, else stdout."""
        out = getattr(self.args, "out", None)
        if out:
            self.write(out, text)
        else:
            sys.stdout.write(text)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- inputs -------------------------------------------------------------------

def _family(spec: list[str]) -> tuple[str, list[int]]:
    name, *rest = spec
    if name not in FAMILY_ARITY:
        raise InvalidInput(f"unknown family {name!r}; choose from {', '.join(FAMILY_ARITY)}")
    if len(rest) != FAMILY_ARITY[name]:
        raise InvalidInput(f"family {name} takes {FAMILY_ARITY[name]} integer argument(s)")
    try:
        return name, [int(x) for x in rest]
    except ValueError:
        raise InvalidInput(f"family arguments must be integers, got {rest}") from None


def _graph(args) -> tuple[Multigraph, tuple[str, list[int]] | None]:
    if args.file:
        return parse_graph_text(Path(args.file).read_text()), None
    if not args.family:
        raise InvalidInput("give --family or --file")
    name, a = _family(args.family)
    build = {
        "K": lambda: complete_graph(a[0]),
        "cycle": lambda: cycle(a[0]),
        "bundle": lambda: bundle(a[0]).graph,
        "path": lambda: path(a[0]),
        "cycle-gadget": lambda: cycle_of_cliques(a[0], a[1]),
    }
    return build[name](), (name, a)


def _gadget(args) -> tuple[TwoTerminalGraph, tuple[str, list[int]] | None]:
    if args.file:
        u, v = args.terminals
        return TwoTerminalGraph(parse_graph_text(Path(args.file).read_text()), u, v), None
    if not args.family:
        raise InvalidInput("give --family or --file")
    name, a = _family(args.family)
    build = {"K": complete_gadget, "bundle": bundle, "path": path_gadget}
    if name not in build:
        raise InvalidInput(f"family {name} is not a two-terminal gadget")
    return build[name](a[0]), (name, a)


def _parse_poly_arg(text: str) -> IntPolynomial:
    try:
        return IntPolynomial(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise InvalidInput(f"--poly expects comma-separated integer coefficients, got {text!r}") from None


def _complex_arg(text: str) -> complex:
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise InvalidInput(f"expected 're,im', got {text!r}") from None


def _grid_arg(text: str) -> tuple[int, int]:
    try:
        r, a = text.lower().split("x")
        return int(r), int(a)
    except ValueError:
        raise InvalidInput(f"expected RxA such as 3x8, got {text!r}") from None


# -- commands -----------------------------------------------------------------

def _cross_check(run: Run, g: Multigraph, result: IntPolynomial, primary: str) -> None:
    if primary != "brute" and g.slot_count <= BRUTE_CROSSCHECK_SLOTS:
        run.check("matches brute force", rel_bruteforce(g) == result)
    if primary != "dc" and g.slot_count <= DC_CROSSCHECK_SLOTS:
        run.check("matches deletion-contraction", rel_deletion_contraction(g) == result)


def cmd_rel(run: Run) -> None:
    args = run.args
    g, fam = _graph(args)
    if args.engine == "brute":
        result = rel_bruteforce(g)
    elif args.engine == "dc":
        result = rel_deletion_contraction(g)
    else:
        primary = "structure"
        if fam and fam[0] == "K":
            result = rel_complete(fam[1][0], run.cache)
        elif fam and fam[0] == "cycle-gadget":
            m, n = fam[1]
            result = rel_cycle_gadget(m, n, run.cache)
            if g.slot_count <= DC_CROSSCHECK_SLOTS * 4:
                run.check("matches composition", rel_substituted(cycle(m), complete_gadget(n + 1), run.cache) == result)
        else:
            primary = "brute" if g.slot_count <= BRUTE_CROSSCHECK_SLOTS else "dc"
            result = reliability(g, primary)
        _cross_check(run, g, result, primary)
    run.emit(format_poly_text(result))


def cmd_srel(run: Run) -> None:
    args = run.args
    h, fam = _gadget(args)
    if args.engine == "brute":
        result = srel_bruteforce(h)
    elif args.engine == "dc":
        result = srel_by_identification(h)
    else:
        if fam and fam[0] == "K":
            result = srel_complete(fam[1][0], run.cache)
        elif h.graph.slot_count <= BRUTE_CROSSCHECK_SLOTS:
            result = srel_bruteforce(h)
        else:
            result = srel_by_identification(h)
        if h.graph.slot_count <= BRUTE_CROSSCHECK_SLOTS:
            run.check("matches brute force", srel_bruteforce(h) == result)
        if h.graph.slot_count <= DC_CROSSCHECK_SLOTS:
            run.check("matches Rel(H/uv) - Rel(H)", srel_by_identification(h) == result)
    run.emit(format_poly_text(result))


def _poly_source(run: Run) -> IntPolynomial:
    args = run.args
    if args.poly:
        return _parse_poly_arg(args.poly)
    if args.poly_file:
        return parse_poly_text(Path(args.poly_file).read_text())
    return _rel_of(run, *_graph(args))


def _rel_of(run: Run, g: Multigraph, fam) -> IntPolynomial:
    if fam and fam[0] == "K":
        return rel_complete(fam[1][0], run.cache)
    if fam and fam[0] == "cycle-gadget":
        return rel_cycle_gadget(*fam[1], run.cache)
    return reliability(g)


def cmd_roots(run: Run) -> None:
    args = run.args
    p = _poly_source(run)
    tol = args.tol
    rs = all_roots(p, precision=args.precision or 256, tol=tol, deflate_unit=args.deflate_unit)
    summary = zero_counting_summary(rs) if rs.roots or rs.deflated_unit_multiplicity else None
    run.check("residuals within tolerance", all(r <= tol for r in rs.residuals))
    run.check("vieta", vieta_check(p, rs, args.vieta_tol))
    run.check("conjugate symmetry", conjugate_symmetric(rs, 10 * tol))
    if args.csv:
        run.write(args.csv, roots_to_csv(rs))
    if args.svg:
        run.write(args.svg, roots_to_svg(rs))
    report = {
        "degree": p.degree,
        "deflated_unit_roots": rs.deflated_unit_multiplicity,
        "roots": len(rs.roots),
        "precision": rs.precision,
        "iterations": rs.iterations,
        "max_residual": float(rs.max_residual()),
        "max_modulus": summary.max_modulus_nonunit if summary else None,
        "min_modulus": summary.min_modulus if summary else None,
        "clustered_roots": sum(1 for k in rs.multiplicity if k > 1),
        "checks": run.checks,
    }
    run.emit(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _density_config(args) -> DensityConfig:
    return DensityConfig(
        eps=args.eps,
        tol=args.tol,
        boundary_samples=args.samples,
        n_max=args.n_max,
        precision=args.precision,
    )


def cmd_density(run: Run) -> None:
    args = run.args
    config = _density_config(args)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if args.real is not None:
        certs = [locate_real_root_near(args.real, config=config, cache=run.cache)]
    else:
        if args.grid:
            rings, angles = _grid_arg(args.grid)
            targets = grid_targets(tuple(round(0.9 * (k + 1) / rings, 12) for k in range(rings)), angles)
        elif args.target:
            targets = [_complex_arg(args.target)]
        else:
            raise InvalidInput("give --target, --real or --grid")
        if args.family == "bundle":
            certs = []
            for t in targets:
                try:
                    certs.append(bundle_density_crosscheck(t, config=config, cache=run.cache))
                except NotFound as exc:
                    certs.append(exc)
        else:
            certs = locate_many(targets, config, jobs=args.jobs, cache=run.cache)
    rows = [SUMMARY_HEADER]
    for i, c in enumerate(certs):
        if isinstance(c, NotFound):
            run.check(f"target {i} found", False)
            log.error("%s", c)
            continue
        problems = c.problems()
        for p in problems:
            log.error("target %d: %s", i, p)
        run.check(f"target {i} certificate", not problems)
        rows.append(c.summary_row())
        if out_dir is not None:
            run.write(out_dir / f"certificate_{i:03d}.json", c.to_json())
    text = "\n".join(rows) + "\n"
    if out_dir is not None:
        run.write(out_dir / "summary.csv", text)
    sys.stdout.write(text)


def cmd_converge(run: Run) -> None:
    args = run.args
    report = convergence_scan(
        args.rho,
        args.n_max,
        sample_count=args.samples,
        precision=args.precision or 128,
        n_min=args.n_min,
        alpha_tol=args.alpha_tol,
        beta_tol=args.beta_tol,
        cache=run.cache,
        jobs=args.jobs,
    )
    if args.alpha_tol is not None or args.beta_tol is not None:
        run.check("converged", report.converged)
    run.emit(report.to_csv())


def cmd_mc(run: Run) -> None:
    args = run.args
    g, fam = _graph(args)
    est, se = monte_carlo_rel(g, args.q, args.trials, args.seed, jobs=args.jobs)
    report = {"estimate": est, "stderr": se, "q": args.q, "trials": args.trials, "seed": args.seed}
    if args.exact:
        exact = exact_value(_rel_of(run, g, fam), args.q)
        report["exact"] = exact
        report["z"] = (est - exact) / se if se > 0 else (0.0 if est == exact else math.inf)
        run.check("within 3 standard errors", abs(est - exact) <= 3 * se)
    report["checks"] = run.checks
    run.emit(json.dumps(report, indent=2, sort_keys=True) + "\n")


def cmd_near_minus_one(run: Run) -> None:
    args = run.args
    config = DensityConfig(tol=args.tol, n_max=args.n_max)
    b = root_near_minus_one(args.q_target, config, run.cache)
    run.check("sign change", b.sign_lo * b.sign_hi < 0 or b.lo == b.hi)
    report = {
        "n": b.n,
        "lo": str(b.lo),
        "hi": str(b.hi),
        "lo_float": float(b.lo),
        "hi_float": float(b.hi),
        "width": float(b.width),
        "sign_lo": b.sign_lo,
        "sign_hi": b.sign_hi,
        "checks": run.checks,
    }
    run.emit(json.dumps(report, indent=2, sort_keys=True) + "\n")


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", default="./kn-cache", help="directory for cached Rel/sRel(K_n)")
    common.add_argument("--no-cache", action="store_true", help="keep the K_n cache in memory only")
    common.add_argument("--precision", type=int, default=None, help="working precision in bits")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--manifest", default="relroots-manifest.json", help="run manifest path")
    common.add_argument("--no-manifest", action="store_true")
    common.add_argument("-v", "--verbose", action="count", default=0)

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--family", nargs="+", metavar="SPEC", help="K n | cycle m | bundle n | path k | cycle-gadget m n")
    source.add_argument("--file", help="graph file: 'V E' then E lines 'a b [mult]'")

    parser = argparse.ArgumentParser(prog="relroots", description="Reliability polynomials and their roots.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rel", parents=[common, source], help="all-terminal reliability polynomial")
    p.add_argument("--engine", choices=("brute", "dc", "auto"), default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rel)

    p = sub.add_parser("srel", parents=[common, source], help="split reliability of a two-terminal gadget")
    p.add_argument("--engine", choices=("brute", "dc", "auto"), default="auto")
    p.add_argument("--terminals", nargs=2, type=int, default=(0, 1), metavar=("U", "V"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_srel)

    p = sub.add_parser("roots", parents=[common, source], help="all complex roots of a polynomial")
    p.add_argument("--poly", help="comma-separated coefficients c0,c1,...")
    p.add_argument("--poly-file", help="polynomial text file")
    p.add_argument("--deflate-unit", type=int, default=0, metavar="K")
    p.add_argument("--tol", type=float, default=1e-20)
    p.add_argument("--vieta-tol", type=float, default=1e-15)
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("density", parents=[common], help="certified roots near targets in the unit disk")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", help="re,im")
    g.add_argument("--real", type=float, help="real target in (-1, 0)")
    g.add_argument("--grid", help="RxA: moduli 0.9k/R for k=1..R times A equally spaced angles")
    p.add_argument("--family", choices=("K", "bundle"), default="K")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=1e-20)
    p.add_argument("--samples", type=int, default=64, help="boundary samples for the Rouche check")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--out", dest="out_dir", help="directory for certificate JSON files and summary.csv")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("converge", parents=[common], help="convergence of Rel(K_n) and sRel(K_n) inside the disk")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--alpha-tol", type=float)
    p.add_argument("--beta-tol", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("mc", parents=[common, source], help="Monte Carlo reliability estimate")
    p.add_argument("--q", type=float, required=True, help="edge failure probability")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="also compute the exact value and check 3 sigma")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("near-minus-one", parents=[common], help="root of Rel(K_n) in (-1, q_target)")
    p.add_argument("--q-target", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12, help="bracket width")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_near_minus_one)
    return parser


def _manifest(run: Run, argv: list[str], status: int, error: str | None) -> dict:
    args = vars(run.args).copy()
    args.pop("func", None)
    return {
        "argv": argv,
        "args": args,
        "exit_status": status,
        "error": error,
        "checks": run.checks,
        "outputs": run.outputs,
        "versions": {
            "relroots": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "mpmath": mpmath.__version__,
            "gmpy2": gmpy2.version(),
        },
        "kernel_backend": kernels.BACKEND,
        "cache_checksums": run.cache.checksums(),
    }


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    cache = KnCache(None if args.no_cache else args.cache_dir)
    set_default_cache(cache)
    run = Run(args, cache)
    error = None
    try:
        args.func(run)
        status = 0 if all(run.checks.values()) else 1
    except (RelRootsError, OSError, ValueError) as exc:
        error = f"{type(exc).__name__}: {exc}"
        print(f"error: {exc}", file=sys.stderr)
        status = 2
    if not args.no_manifest:
        try:
            write_atomic(args.manifest, json.dumps(_manifest(run, argv, status, error), indent=2, sort_keys=True, default=str) + "\n")
        except OSError as exc:
            print(f"error: cannot write manifest: {exc}", file=sys.stderr)
            status = max(status, 2)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
