"""Command line front end.

Every subcommand writes one JSON report (to ``--out`` or stdout) that
embeds a manifest: the command, the resolved arguments, the verbatim
contents of every input file, the resolved configuration and the package
version. A report can be passed back wherever the input it embeds was
expected.

Exit codes: 0 success, 1 a checked inequality failed, 2 input error or
unmet hypothesis, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SweepConfig, ToleranceConfig
from .convexfn import BoxRegion, function_from_json, holder_stability_check
from .errors import InputError, LipmodError, NumericalError
from .estimate import empirical_lip
from .hulls import excess, hausdorff
from .indexation import calmness_indexation, exterior_samples, pair_indexation, projection_family
from .indexation import sup_distance as family_distance
from .linearize import (
    ConvexInstance,
    convex_lipschitz_check,
    gap_bound_check,
    kappa0,
    linearize,
    safe_radius,
    slater_margin,
)
from .linsys import lipschitz_modulus, ssc_margin
from .norms import L2, NormSpec
from .serialize import (
    as_float,
    cloud_from_json,
    dumps,
    load_json,
    parse_vector,
    system_from_json,
    system_to_json,
)

log = logging.getLogger("lipmod")

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
FILE_OPTIONS = ("system", "a", "b", "instance", "config")
EXTERIOR_SAMPLES = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class Context:
    """Resolved inputs of one invocation."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}
        self.replayed = {}
        for name in FILE_OPTIONS:
            path = getattr(args, name, None)
            if path is None:
                continue
            data = load_json(path)
            if isinstance(data, dict) and "manifest" in data:
                man = data["manifest"]
                entry = man.get("inputs", {}).get(name)
                if entry is None:
                    raise InputError(f"report {path} carries no '{name}' input")
                data = entry["content"]
                self.replayed.update(man.get("args", {}))
            self.inputs[name] = {"path": str(path), "content": data}
        for key, value in self.replayed.items():
            if key in FILE_OPTIONS or key == "command":
                continue
            if getattr(args, key, None) is None:
                setattr(args, key, value)
        cfg = self.content("config") or {}
        if not isinstance(cfg, dict):
            raise InputError("config files must be JSON objects")
        self.tol = ToleranceConfig.from_dict(cfg.get("tolerance"))
        sweep = dict(cfg.get("sweep") or {})
        if getattr(args, "seed", None) is not None:
            sweep["seed"] = args.seed
        if getattr(args, "samples", None) is not None:
            sweep["samples_per_delta"] = args.samples
        if getattr(args, "deltas", None) is not None:
            sweep["deltas"] = _deltas(args.deltas)
        if getattr(args, "mode", None) is not None:
            sweep["mode"] = args.mode
        self.sweep = SweepConfig.from_dict(sweep)

    def content(self, name):
        entry = self.inputs.get(name)
        return None if entry is None else entry["content"]

    def require(self, name):
        data = self.content(name)
        if data is None:
            raise InputError(f"--{name} is required for this command")
        return data

    def vector(self, name):
        value = getattr(self.args, name, None)
        if value is None:
            raise InputError(f"--{name.replace('_', '-')} is required for this command")
        return parse_vector(value)

    def number(self, name):
        value = getattr(self.args, name, None)
        if value is None:
            raise InputError(f"--{name} is required for this command")
        return as_float(value)

    def manifest(self) -> dict:
        args = {k: v for k, v in vars(self.args).items() if k not in ("out", "csv", "handler")}
        return {
            "command": self.args.command,
            "args": args,
            "inputs": self.inputs,
            "config": {"tolerance": self.tol.to_dict(), "sweep": self.sweep.to_dict()},
            "version": __version__,
        }


def _deltas(value):
    if isinstance(value, (list, tuple)):
        return [as_float(v) for v in value]
    text = str(value).strip()
    if text.startswith("["):
        return [float(v) for v in parse_vector(text)]
    return [float(v) for v in text.split(",") if v.strip()]


def _system(ctx):
    return system_from_json(ctx.require("system"))


def _instance(ctx):
    data = dict(ctx.require("instance"))
    if ctx.args.grid is not None:
        data["grid"] = ctx.args.grid
    return ConvexInstance.from_json(data, ctx.tol)


def _function_entry(ctx, name):
    """A function file: ``{"f": <function>, "box": {...}, ...}`` or a bare
    function."""
    data = ctx.require(name)
    if isinstance(data, dict) and "f" in data:
        box = BoxRegion.from_json(data["box"]) if "box" in data else None
        return function_from_json(data["f"]), box
    return function_from_json(data), None


def _grid(ctx, default=41):
    return ctx.args.grid if ctx.args.grid is not None else default


def cmd_modulus(ctx):
    sys_ = _system(ctx)
    rep = lipschitz_modulus(sys_, ctx.vector("x0"), ctx.tol)
    return "lip-formula", rep.to_dict(), True


def cmd_hausdorff(ctx):
    A, sa = cloud_from_json(ctx.require("a"))
    B, sb = cloud_from_json(ctx.require("b"))
    spec = NormSpec.parse(ctx.args.norm) if ctx.args.norm else (sa or sb or L2)
    metric = ctx.args.metric
    return "hausdorff-distance", {
        "d_h": hausdorff(A, B, spec, metric),
        "excess_ab": excess(A, B, spec, metric),
        "excess_ba": excess(B, A, spec, metric),
        "norm": spec.name,
        "metric": metric,
    }, True


def cmd_ssc(ctx):
    sys_ = _system(ctx)
    box = ctx.args.box_radius if ctx.args.box_radius is not None else 1e6
    res = ssc_margin(sys_, box, ctx.tol)
    return "strong-slater", {
        "margin": res.margin,
        "holds": res.margin > 0,
        "point": res.point,
        "box_radius": res.box_radius,
        "box_binding": res.box_binding,
    }, True


def cmd_indexation(ctx):
    sys0 = _system(ctx)
    spec = sys0.spec
    U0 = sys0.U
    U1, _ = cloud_from_json(ctx.require("a"))
    U2, _ = cloud_from_json(ctx.require("b"))
    rng = np.random.default_rng(ctx.sweep.seed)
    ext = exterior_samples([U0, U1, U2], EXTERIOR_SAMPLES, rng)
    Tp = U0.union(U1, U2, ext)
    s1, s2 = pair_indexation(U1, U2, U0, Tp, spec)
    s0 = projection_family(U0, Tp, spec)
    d12 = family_distance(s1, s2, spec)
    h12 = hausdorff(U1, U2, spec)
    bound = 3.0 * max(hausdorff(U1, U0, spec), hausdorff(U2, U0, spec))
    far = max(family_distance(s1, s0, spec), family_distance(s2, s0, spec))
    calm = family_distance(calmness_indexation(U1, U0, Tp, spec), s0, spec)
    h10 = hausdorff(U1, U0, spec)
    ok = abs(d12 - h12) <= 1e-12 and far <= bound + 1e-12 and abs(calm - h10) <= 1e-12
    return "indexation-identities", {
        "sup_distance_pair": d12,
        "d_h_pair": h12,
        "sup_distance_to_nominal": far,
        "three_max_bound": bound,
        "sup_distance_calmness": calm,
        "d_h_calmness": h10,
        "index_set_size": len(Tp),
        "holds": ok,
    }, ok


def cmd_linearize(ctx):
    inst = _instance(ctx)
    sys_ = linearize(inst.f0, inst.E0_box, inst.grid, ctx.tol, extra_points=inst.x0)
    return "linearization", {
        **system_to_json(sys_),
        "region": inst.E0_box.to_json(),
        "grid": inst.grid,
    }, True


def cmd_kappa0(ctx):
    inst = _instance(ctx)
    res = kappa0(inst, ctx.tol)
    margin, witness = slater_margin(inst.f0, inst.E0_box, inst.grid)
    return "convex-lip-constant", {
        "kappa0": res.kappa0,
        "slater_margin": margin,
        "slater_witness": witness,
        "system": system_to_json(res.system),
        "modulus_report": res.report.to_dict(),
    }, True


def cmd_safe_radius(ctx):
    inst = _instance(ctx)
    eta = safe_radius(inst, ctx.tol)
    return "safe-radius", {"eta": eta, "m": 4.0 * eta, "alpha0": inst.alpha0}, True


def _report_check(res):
    out = res.to_dict()
    out["note"] = "balls are replaced by boxes of the same half-width"
    return out


def cmd_gap_check(ctx):
    f1, K1 = _function_entry(ctx, "a")
    f2, K2 = _function_entry(ctx, "b")
    if K1 is None or K2 is None:
        raise InputError("gap-check needs a 'box' in both function files")
    res = gap_bound_check(f1, f2, K1, K2, _grid(ctx), ctx.tol)
    return "linearization-gap", _report_check(res), res.holds


def cmd_convex_check(ctx):
    inst = _instance(ctx)
    f1, _ = _function_entry(ctx, "a")
    f2, _ = _function_entry(ctx, "b")
    x1 = ctx.vector("x1") if ctx.args.x1 is not None else inst.x0
    kappa = ctx.number("kappa")
    res = convex_lipschitz_check(inst, kappa, f1, f2, x1, ctx.number("delta"), ctx.tol,
                                 differentiable=bool(ctx.args.differentiable))
    return "convex-lipschitz-estimate", _report_check(res), res


def cmd_subdiff_check(ctx):
    f1, _ = _function_entry(ctx, "a")
    f2, _ = _function_entry(ctx, "b")
    res = holder_stability_check(f1, f2, ctx.vector("x0"), ctx.number("alpha"),
                                 ctx.number("delta"), ctx.tol, _grid(ctx))
    return "subdifferential-stability", _report_check(res), res


def cmd_estimate(ctx):
    sys_ = _system(ctx)
    x0 = ctx.vector("x0")
    cfg = SweepConfig(**{**ctx.sweep.to_dict(), "threads": ctx.args.threads or 1})
    res = empirical_lip(sys_, x0, cfg, ctx.tol)
    out = res.to_dict()
    try:
        out["analytic_modulus"] = lipschitz_modulus(sys_, x0, ctx.tol).modulus
    except NumericalError as exc:
        out["analytic_modulus"] = None
        out["analytic_error"] = str(exc)
    if ctx.args.csv:
        Path(ctx.args.csv).write_text(res.to_csv(), encoding="utf-8")
    return "lip-limsup", out, True


COMMANDS = {
    "modulus": (cmd_modulus, "exact Lipschitz modulus at (U, x0)"),
    "hausdorff": (cmd_hausdorff, "Hausdorff distance between two clouds"),
    "ssc": (cmd_ssc, "strong Slater margin"),
    "indexation-check": (cmd_indexation, "Chebyshev/Hausdorff indexation identities"),
    "linearize": (cmd_linearize, "linearize f0 <= 0 over the E0 box"),
    "kappa0": (cmd_kappa0, "Lipschitz constant of the linearized nominal system"),
    "safe-radius": (cmd_safe_radius, "safe perturbation radius eta"),
    "gap-check": (cmd_gap_check, "linearization gap bound"),
    "convex-check": (cmd_convex_check, "Lipschitz estimate for perturbed convex inequalities"),
    "estimate": (cmd_estimate, "Monte Carlo modulus estimate"),
    "subdiff-check": (cmd_subdiff_check, "subdifferential stability inclusion"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lipmod",
                description="Lipschitz moduli of feasible-set mappings and their convex applications.")
    p.add_argument("--version", action="version", version=f"lipmod {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_, description=help_)
        s.add_argument("--system", help="system JSON {n, norm, points}")
        s.add_argument("--a", help="first cloud or function file")
        s.add_argument("--b", help="second cloud or function file")
        s.add_argument("--x0", help="nominal point as JSON, e.g. '[1]'")
        s.add_argument("--instance", help="convex instance JSON")
        s.add_argument("--config", help="JSON with 'tolerance' and 'sweep' sections")
        s.add_argument("--out", help="report path (default: stdout)")
        s.add_argument("--seed", type=int)
        s.add_argument("--deltas", help="comma separated or JSON list of radii")
        s.add_argument("--samples", type=int, help="samples per radius")
        s.add_argument("--grid", type=int, help="grid points per axis")
        if name == "hausdorff":
            s.add_argument("--norm", choices=["l1", "l2", "linf"])
            s.add_argument("--metric", choices=["coeff", "primal", "dual"], default="coeff")
        if name == "ssc":
            s.add_argument("--box-radius", type=float, dest="box_radius")
        if name in ("convex-check", "subdiff-check"):
            s.add_argument("--delta", help="perturbation size")
        if name == "convex-check":
            s.add_argument("--kappa", help="constant to test (must exceed kappa0)")
            s.add_argument("--x1", help="feasible point of f1 near x0 (default x0)")
            s.add_argument("--differentiable", action="store_true", default=None,
                           help="drop the sqrt(delta) enlargement (smooth f0)")
        if name == "subdiff-check":
            s.add_argument("--alpha", help="radius of the comparison ball")
        if name == "estimate":
            s.add_argument("--mode", choices=["lip", "calm"])
            s.add_argument("--csv", help="write per-radius rows as CSV here")
            s.add_argument("--threads", type=int)
    return p


def _exit_status(result) -> int:
    if result is True:
        return EXIT_OK
    if result is False:
        return EXIT_VIOLATED
    if not result.hypotheses_met:
        return EXIT_INPUT
    return EXIT_OK if result.holds else EXIT_VIOLATED


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    handler = COMMANDS[args.command][0]
    try:
        ctx = Context(args)
        theorem, body, result = handler(ctx)
    except InputError as exc:
        print(f"lipmod {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"lipmod {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LipmodError as exc:  # pragma: no cover - defensive
        print(f"lipmod {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report = {"theorem": theorem, **body, "manifest": ctx.manifest()}
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    status = _exit_status(result)
    if status == EXIT_INPUT:
        print(f"lipmod {args.command}: hypotheses not met: {result.violations}", file=sys.stderr)
    return status


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
