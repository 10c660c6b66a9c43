"""Command-line front end: ``pfcoset <command> --u U --v V [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from fractions import Fraction

import mpmath

from . import affine as af
from . import coset as cs
from . import extension as ex
from . import minmod
from . import modcheck as mc
from .fusion import FusionElement
from .level import InvalidLevel, Level
from .qseries import QSeries

VERIFY_KINDS = {
    "theta-s": "theta_s",
    "std-s": "std_s",
    "gamma-s": "gamma_s",
    "t": "t_phase",
    "lemma": "lemma_A",
    "resolutions": "resolutions",
    "twistrules": "twistrules",
    "two-route": "two_route",
}
_NUMERIC_TOL = {"t_phase": 1e-30}
_KAC_RE = re.compile(r"^\(?\s*(\d+)\s*,\s*(\d+)\s*\)?$")


class UsageError(Exception):
    pass


# -- parsing helpers -------------------------------------------------------------


def _tau(text: str) -> complex:
    try:
        re_, im = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None
    if im <= 0:
        raise argparse.ArgumentTypeError(f"tau must lie in the upper half plane, got {text!r}")
    return complex(re_, im)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational a/b, got {text!r}") from None


def _label(text: str):
    """Parse any label and report which layer it belongs to."""
    t = text.strip()
    try:
        if t.startswith("B."):
            return "ext", ex.parse_label(t)
        bare = t.startswith(("L[", "D+[", "D-[", "Estd+[", "Estd-[")) and ";" not in t
        if t.startswith("sf^") or bare:
            return "affine", af.parse_label(t)
        return "coset", cs.parse_label(t)
    except ValueError as err:
        raise UsageError(str(err)) from err


def _kac(text: str):
    m = _KAC_RE.match(text.strip())
    return (int(m[1]), int(m[2])) if m else None


# -- output -----------------------------------------------------------------------


def _emit(args, payload, rows=None, text=None):
    """Write ``payload`` as JSON, ``rows`` as CSV, or ``text`` verbatim."""
    out = sys.stdout
    if args.format == "json":
        json.dump(payload, out, indent=2, default=str)
        out.write("\n")
    elif args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        for row in rows if rows is not None else [[k, v] for k, v in payload.items()]:
            writer.writerow([str(x) for x in row])
    else:
        if text is None:
            text = "\n".join(f"{k}: {v}" for k, v in payload.items())
        out.write(text.rstrip("\n") + "\n")


def _series_rows(series: QSeries, prefix=()):
    return [[*prefix, e, c] for e, c in series.items()]


def _element_payload(elem: FusionElement):
    items = elem.sorted_items()
    return {"terms": [[str(lab), n] for lab, n in items], "notes": sorted(elem.notes)}


def _matrix_rows(m, digits):
    return [[mpmath.nstr(m[i, j], digits) for j in range(m.cols)] for i in range(m.rows)]


# -- commands ---------------------------------------------------------------------


def cmd_info(args, level):
    info = level.info()
    payload = {k: str(v) for k, v in info.items()}
    _emit(args, payload)


def cmd_kac(args, level):
    labels = minmod.kac_table(level.u, level.v)
    rows = [[lab.r, lab.s, minmod.h(level.u, level.v, lab.r, lab.s)] for lab in labels]
    payload = {"u": level.u, "v": level.v, "labels": [[r, s, str(h)] for r, s, h in rows]}
    text = "\n".join(f"({r},{s})  h = {h}" for r, s, h in rows)
    _emit(args, payload, [["r", "s", "h"], *rows], text)


def cmd_enumerate(args, level):
    if args.coset:
        fams = cs.enumerate_families(level)
        lines = [f.describe() for f in fams]
        _emit(args, {"families": lines}, [[x] for x in lines], "\n".join(lines))
        return
    mods = ex.enumerate_modules(level)
    rows = [[str(m), ex.conformal_weight(level, m)] for m in mods]
    c, d, e = ex.counts(level)
    payload = {"counts": {"C": c, "D": d, "E": e}, "modules": [[lab, str(h)] for lab, h in rows]}
    text = "\n".join(f"{lab}  h = {h}" for lab, h in rows) + f"\ncounts: C={c} D={d} E={e}"
    _emit(args, payload, [["label", "h"], *rows], text)


def cmd_char(args, level):
    layer, lab = _label(args.label)
    order = args.order
    if layer == "affine":
        window = af.support_window(level, lab, args.center, args.window)
        chi = af.weighted_char(level, lab, window, order)
        payload = {"label": str(lab), "components": {str(nu): s.to_json_obj() for nu, s in chi.components.items()}}
        rows = [["weight", "exponent", "coeff"]]
        for nu, s in chi.components.items():
            rows += _series_rows(s, (nu,))
        text = "\n".join(f"[{nu}] {s!r}" for nu, s in chi.components.items())
        _emit(args, payload, rows, text)
        return
    series = ex.character(level, lab, order) if layer == "ext" else cs.character(level, lab, order)
    payload = {"label": str(lab), "series": series.to_json_obj()}
    _emit(args, payload, [["exponent", "coeff"], *_series_rows(series)], repr(series))


def cmd_fuse(args, level):
    ka, kb = _kac(args.a), _kac(args.b)
    if ka and kb:
        res = minmod.fusion_coeffs(level.u, level.v, ka, kb)
        items = sorted((str(lab), n) for lab, n in res.items())
        payload = {"terms": [[lab, n] for lab, n in items]}
        _emit(args, payload, [["label", "mult"], *items], " + ".join(f"{n}*{lab}" if n > 1 else lab for lab, n in items))
        return
    (la, a), (lb, b) = _label(args.a), _label(args.b)
    if la != "coset" or lb != "coset":
        raise UsageError("fuse takes two Kac labels (r,s) or a coset C label and another coset label")
    if a.kind != "C" and b.kind == "C":
        a, b = b, a
    if a.kind != "C":
        raise UsageError("genuine fusion is only available with a C label; use gfuse for Grothendieck products")
    res = cs.fuse_with_C(level, cs.canonical(level, a), cs.canonical(level, b))
    _emit(args, _element_payload(res), [["label", "mult"], *res.sorted_items()], repr(res))


def cmd_gfuse(args, level):
    (la, a), (lb, b) = _label(args.a), _label(args.b)
    if la != lb:
        raise UsageError(f"cannot fuse a {la} label with a {lb} label")
    fuse = {"coset": cs.gr_fuse, "affine": af.gr_fuse_affine, "ext": ex.gr_fuse_ext}[la]
    canon = {"coset": cs.canonical, "affine": af.canonical, "ext": ex.canonical}[la]
    res = fuse(level, canon(level, a), canon(level, b))
    _emit(args, _element_payload(res), [["label", "mult"], *res.sorted_items()], repr(res))


def cmd_theta(args, level):
    series = ex.theta(level, args.mu, args.order, deriv=args.deriv)
    _emit(args, {"mu": str(args.mu), "deriv": args.deriv, "series": series.to_json_obj()},
          [["exponent", "coeff"], *_series_rows(series)], repr(series))


def cmd_gamma(args, level):
    series = ex.gamma(level, args.mu, args.r, args.order)
    _emit(args, {"mu": str(args.mu), "r": args.r, "series": series.to_json_obj()},
          [["exponent", "coeff"], *_series_rows(series)], repr(series))


def cmd_smatrix(args, level):
    idx, m = ex.smatrix(level, args.kind, args.digits)
    rows = _matrix_rows(m, args.digits)
    labels = [str(x) for x in idx]
    payload = {"kind": args.kind, "index": labels, "matrix": rows}
    text = "\n".join(f"{lab}: " + "  ".join(row) for lab, row in zip(labels, rows))
    _emit(args, payload, [["index", *labels], *([lab, *row] for lab, row in zip(labels, rows))], text)


def cmd_basis(args, level):
    basis = ex.basis_Bk(level)
    std, b, total = mc.rep_dimension_report(level)
    payload = {"basis": [[m, r] for m, r in basis], "size": b, "closed_form": str(ex.dim_bound(level)),
               "standard_count": std, "total": total}
    text = "\n".join(f"({m};{r})" for m, r in basis) + f"\n|B| = {b}, standard = {std}, total <= {total}"
    _emit(args, payload, [["mu", "r"], *basis], text)


def cmd_verify(args, level):
    kinds = list(VERIFY_KINDS.values()) if args.kind == "all" else [VERIFY_KINDS[args.kind]]
    taus = args.tau or list(mc.DEFAULT_TAUS)
    reports = []
    for kind in kinds:
        tol = args.tol if args.tol is not None else _NUMERIC_TOL.get(kind, 1e-20)
        reports.append(mc.verify(kind, level, taus=taus, order=args.order, digits=args.digits, tol=tol))
    if args.format == "json":
        for rep in reports:
            sys.stdout.write(rep.to_json() + "\n")
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["check", "u", "v", "order", "identities", "residual", "passed"])
        for rep in reports:
            writer.writerow([rep.name, rep.u, rep.v, rep.order, rep.identities, rep.residual, rep.passed])
    else:
        for rep in reports:
            sys.stdout.write(rep.summary() + "\n")
    return 0 if all(rep.passed for rep in reports) else 1


# -- argument parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--u", type=int, required=True)
    common.add_argument("--v", type=int, required=True)
    common.add_argument("--order", type=_fraction, default=Fraction(10), help="truncation order N")
    common.add_argument("--window", type=int, default=9, help="number of weights for affine characters")
    common.add_argument("--center", type=_fraction, default=Fraction(0), help="window centre for affine characters")
    common.add_argument("--digits", type=int, default=30)
    common.add_argument("--tau", type=_tau, action="append", help="evaluation point 're,im' (repeatable)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--tol", type=float, default=None)

    parser = argparse.ArgumentParser(prog="pfcoset", description="Parafermion coset characters, fusion and modular data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    add("info", cmd_info, "level data")
    add("kac", cmd_kac, "minimal-model Kac table with conformal weights")
    p = add("enumerate", cmd_enumerate, "list irreducible modules")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--coset", action="store_true", help="coset families")
    g.add_argument("--extended", action="store_true", help="extended modules (default)")
    p = add("char", cmd_char, "character of a coset, affine or extended label")
    p.add_argument("label")
    p = add("fuse", cmd_fuse, "genuine fusion: Kac labels or a C label times anything")
    p.add_argument("a")
    p.add_argument("b")
    p = add("gfuse", cmd_gfuse, "Grothendieck fusion")
    p.add_argument("a")
    p.add_argument("b")
    p = add("theta", cmd_theta, "lattice theta function")
    p.add_argument("mu", type=_fraction)
    p.add_argument("--deriv", action="store_true")
    p = add("gamma", cmd_gamma, "weight-one part of an atypical character")
    p.add_argument("mu", type=_fraction)
    p.add_argument("r", type=int)
    p = add("smatrix", cmd_smatrix, "modular S-matrix")
    p.add_argument("kind", choices=("typ", "theta", "vir", "gamma"))
    add("basis", cmd_basis, "spanning set of weight-one parts")
    p = add("verify", cmd_verify, "run verification checks")
    p.add_argument("kind", choices=(*VERIFY_KINDS, "all"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        level = Level(args.u, args.v)
        return args.func(args, level) or 0
    except (UsageError, InvalidLevel, ValueError) as err:
        print(f"pfcoset: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
