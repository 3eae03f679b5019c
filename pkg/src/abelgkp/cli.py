"""Command-line front end. Exit codes: 0 success, 1 computation failure, 2 input error."""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .concat import concatenate
from .decode import NoiseModel, robustness_mc, robustness_quadrature
from .errors import ComputationError, InputError, TrivialCode
from .gallery import gallery_code, gallery_entry, gallery_ids
from .io import (REPORT_SCHEMA, code_document, code_from_document, dumps, load_document,
                 stabilizer_from_document, turns_str)
from .svp import systole_report
from .symmetry import induced_action, passive_automorphisms, sp_k_image, u_shift
from .theta import default_grid, isometry_sweep


class UsageError(InputError):
    pass


def _float_list(text: str) -> List[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}")
    if not vals:
        raise UsageError("empty number list")
    return vals


def _sigma_range(text: str) -> List[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--sigma-range expects lo:hi:steps")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"malformed --sigma-range {text!r}")
    if steps < 1:
        raise UsageError("--sigma-range needs at least one step")
    return [float(x) for x in np.linspace(lo, hi, steps)]


def load_code(ref: str):
    if ref.startswith("gallery:"):
        return gallery_code(ref[len("gallery:"):])
    if not Path(ref).exists() and ref in gallery_ids():
        return gallery_code(ref)
    return code_from_document(load_document(ref))


def _report(command: str, **fields) -> dict:
    return {"schema": REPORT_SCHEMA, "command": command, **fields}


def _emit(args, lines: Sequence[dict]) -> None:
    text = "".join(dumps(obj) + "\n" for obj in lines)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _int_matrix(m) -> list:
    return [[int(x) for x in row] for row in m]


def cmd_analyze(args) -> int:
    code = load_code(args.code)
    out = _report("analyze", type=list(code.divisors), det=float(code.lattice.covolume),
                  pfaffian=code.type.pfaffian, order_K=code.order_K, exponent=code.exponent,
                  gram_E=_int_matrix(code.lattice.gram_E))
    try:
        rep = systole_report(code)
    except TrivialCode as exc:
        out.update(warning=str(exc), systole=None, count=0, minimizers=[])
    else:
        out.update(systole=rep.ell, count=rep.count, lambda1_lattice=rep.lambda1_lattice,
                   lambda1_dual=rep.lambda1_dual, minimizers=[list(k) for k in rep.minimizers],
                   minimizer_vectors=[[float(x) for x in v] for v in rep.minimizer_vectors])
    _emit(args, [out])
    return 0


_CSV_FIELDS = ["schema", "command", "status", "decoder", "method", "noise", "sigma", "estimate",
               "ci_low", "ci_high", "half_width", "fragility", "analytic_bound", "leading_term",
               "samples_or_grid", "seed", "error"]


def cmd_decode_sim(args) -> int:
    code = load_code(args.code)
    decoders = [d.strip() for d in args.decoder.split(",") if d.strip()]
    for d in decoders:
        if d not in ("mld", "med"):
            raise UsageError(f"unknown decoder {d!r}")
        if args.method == "quad" and d != "mld":
            raise UsageError("quadrature computes the optimal (mld) robustness only")
    if args.noise == "uniform":
        sigmas: List[Optional[float]] = [None]
    elif args.sigma_range:
        sigmas = _sigma_range(args.sigma_range)
    elif args.sigma:
        sigmas = _float_list(args.sigma)
    else:
        raise UsageError("gaussian noise needs --sigma or --sigma-range")
    if any(s is not None and not s > 0 for s in sigmas):
        raise UsageError("sigma values must be positive")
    if args.method == "mc" and args.samples < 1000:
        raise UsageError("--samples must be at least 1000")
    lines = []
    failed = False
    for s in sigmas:
        noise = NoiseModel.uniform() if s is None else NoiseModel.gaussian(s)
        for d in decoders:
            base = _report("decode-sim", decoder=d, method=args.method, noise=noise.kind, sigma=s)
            try:
                if args.method == "quad":
                    rep = robustness_quadrature(code, noise=noise, grid=args.grid, workers=args.workers)
                else:
                    rep = robustness_mc(code, noise, d, args.samples, args.seed, workers=args.workers)
            except ComputationError as exc:
                failed = True
                lines.append({**base, "status": "failed", "error": f"{type(exc).__name__}: {exc}"})
                continue
            row = rep.to_dict()
            row.update(base, status="ok", decoder=d, half_width=rep.half_width, fragility=rep.fragility)
            lines.append(row)
    _emit(args, lines)
    if args.csv:
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in lines:
            w.writerow({k: ("" if row.get(k) is None else repr(row[k]) if isinstance(row.get(k), float)
                            else row[k]) for k in _CSV_FIELDS if k in row})
        Path(args.csv).write_text(buf.getvalue())
    return 1 if failed else 0


def cmd_isometry(args) -> int:
    code = load_code(args.code)
    betas = _float_list(args.betas)
    if any(b <= 0 for b in betas):
        raise UsageError("betas must be positive")
    grid = args.grid or default_grid(code.n)
    rows = isometry_sweep(code, betas, grid=grid)
    _emit(args, [_report("isometry", grid=grid, rows=rows)])
    return 0


def cmd_autgroup(args) -> int:
    code = load_code(args.code)
    autos = passive_automorphisms(code)
    action = sp_k_image(code, autos)
    elements = []
    for a in autos:
        _, shift = u_shift(code, a)
        elements.append({"u": _int_matrix(a.u_matrix),
                         "sp_k": _int_matrix(induced_action(code, a)),
                         "u_shift_dual": [turns_str(x) for x in shift]})
    _emit(args, [_report("autgroup", type=list(code.divisors), order=len(autos),
                         image_order=action.image_order, kernel_order=action.kernel_order,
                         elements=elements)])
    return 0


def cmd_concat(args) -> int:
    code = load_code(args.code)
    stab = stabilizer_from_document(load_document(args.stab), code)
    rep = concatenate(code, stab)
    _emit(args, [_report("concat", old_type=list(rep.old_type.divisors),
                         new_type=list(rep.new_type.divisors), index=rep.index,
                         kernel_divisors=list(rep.kernel_divisors),
                         dual_coords=[list(c) for c in rep.dual_coords],
                         code=code_document(rep.new_code))])
    return 0


def cmd_gallery(args) -> int:
    if args.action == "list":
        _emit(args, [_report("gallery", entries=[
            {"id": g, "description": gallery_entry(g).description} for g in gallery_ids()])])
        return 0
    if not args.id:
        raise UsageError("gallery export needs an entry id")
    text = json.dumps(code_document(gallery_code(args.id)), sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abelgkp", description="GKP code analysis toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, code=True):
        if code:
            sp.add_argument("--code", required=True, help="file path, gallery:<id> or a gallery id")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--workers", type=int, default=1, help="worker threads")

    sp = sub.add_parser("analyze", help="type, logical group and systolic data")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("decode-sim", help="robustness estimates per (sigma, decoder)")
    common(sp)
    sp.add_argument("--decoder", default="mld", help="mld, med or a comma list")
    sp.add_argument("--method", choices=["mc", "quad"], default="mc")
    sp.add_argument("--noise", choices=["gaussian", "uniform"], default="gaussian")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--sigma", help="comma-separated noise widths")
    g.add_argument("--sigma-range", help="lo:hi:steps")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--csv", help="also write a CSV projection")
    sp.set_defaults(func=cmd_decode_sim)

    sp = sub.add_parser("isometry", help="envelope Gram versus theta Gram over beta")
    common(sp)
    sp.add_argument("--betas", default="0.4,0.2,0.1")
    sp.add_argument("--grid", type=int, default=None)
    sp.set_defaults(func=cmd_isometry)

    sp = sub.add_parser("autgroup", help="passive automorphisms and their action on K")
    common(sp)
    sp.set_defaults(func=cmd_autgroup)

    sp = sub.add_parser("concat", help="extend the lattice by a stabilizer group")
    common(sp)
    sp.add_argument("--stab", required=True, help="gkp-stab/v1 file")
    sp.set_defaults(func=cmd_concat)

    sp = sub.add_parser("gallery", help="canonical example codes")
    common(sp, code=False)
    sp.add_argument("action", choices=["list", "export"])
    sp.add_argument("id", nargs="?")
    sp.set_defaults(func=cmd_gallery)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ComputationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (InputError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
