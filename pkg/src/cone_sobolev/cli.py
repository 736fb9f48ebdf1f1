"""Batch command-line front end.

Subcommands: constants (tabulate optimal constants), verify (sharpness and
special-function checks), blowdown (volume-ratio experiments), rearrange
(profile rearrangement from CSV), report (consolidated acceptance document).
Exit codes: 0 success, 1 verification failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional

import numpy as np

from . import SCHEMA, acceptance
from . import blowdown as bd
from . import catalog
from .catalog import Family, cd_constant, extremizer, make_spec, optimal_constant, sharpness_sweep
from .model_cone import check_extremal_asymptotics
from .rearrange import rearrangement, random_monotone_profiles, polya_szego_check
from .spaces import builtin_space, load_volume_csv

_FAMILY_ALIASES = {
    "gns1": "GNS1", "gns2": "GNS2", "sobolev": "SOBOLEV", "nash": "NASH",
    "logsob": "LOG_SOBOLEV", "log_sobolev": "LOG_SOBOLEV",
    "morrey": "MORREY", "fk1": "FABER_KRAHN_1", "faber_krahn_1": "FABER_KRAHN_1",
    "fk2": "FABER_KRAHN_2", "faber_krahn_2": "FABER_KRAHN_2",
    "mt": "MOSER_TRUDINGER", "moser_trudinger": "MOSER_TRUDINGER",
    "ckn": "CKN", "hpw": "HPW", "hardy": "HARDY",
}


class ConfigError(Exception):
    """Raised for malformed run configurations; maps to exit code 2."""


def _parse_family(name: str) -> Family:
    key = name.strip().lower()
    if key not in _FAMILY_ALIASES:
        raise ConfigError(f"unknown family {name!r}; expected one of {sorted(_FAMILY_ALIASES)}")
    return Family(_FAMILY_ALIASES[key])


def _parse_space(descriptor: str, fallback_N: Optional[float] = None):
    if ":" not in descriptor:
        raise ConfigError(f"space descriptor {descriptor!r} needs the form kind:key=value,...")
    kind, _, rest = descriptor.partition(":")
    kind = kind.strip().lower()
    if kind in ("csv",):
        if fallback_N is None:
            raise ConfigError("csv spaces need --N to fix the dimension parameter")
        return load_volume_csv(rest, fallback_N)
    params = {}
    for item in rest.split(","):
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"malformed space parameter {item!r}")
        key, _, value = item.partition("=")
        params[key.strip()] = float(value)
    if kind in ("euclid", "euclidean"):
        return builtin_space("euclidean", **params)
    return builtin_space(kind, **params)


def _resolve_constant(raw: str, auto_value: float) -> float:
    token = raw.strip().lower()
    if token in ("auto", "crit"):
        return auto_value
    if "x" in token:
        factor, _, tail = token.partition("x")
        if tail not in ("auto", "crit"):
            raise ConfigError(f"cannot parse constant spec {raw!r}")
        return float(factor) * auto_value
    return float(token)


def _floats(text: str):
    return [float(x) for x in text.split(",") if x]


def _spec_from_args(family: Family, args) -> catalog.InequalitySpec:
    kwargs = {"N": args.N}
    if family in (Family.GNS1, Family.GNS2):
        kwargs.update(p=args.p, alpha=args.alpha)
    elif family in (Family.SOBOLEV, Family.MORREY, Family.FABER_KRAHN_1,
                    Family.FABER_KRAHN_2, Family.LOG_SOBOLEV, Family.HARDY):
        kwargs.update(p=args.p)
    elif family == Family.CKN:
        kwargs.update(p=args.p, q=args.q, r=args.r, theta=args.theta,
                      alpha=args.ckn_alpha, beta=args.ckn_beta, gamma=args.ckn_gamma)
    for key, val in list(kwargs.items()):
        if val is None:
            raise ConfigError(f"family {family.value} needs --{key}")
    return make_spec(family, **kwargs)


def _dump_json(payload: dict, out: Optional[str]):
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _figdir(args) -> Optional[str]:
    if not getattr(args, "figures", True):
        return None
    if getattr(args, "figdir", None):
        os.makedirs(args.figdir, exist_ok=True)
        return args.figdir
    if getattr(args, "out", None):
        d = os.path.dirname(os.path.abspath(args.out)) or "."
        return d
    return None


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args) -> int:
    family = _parse_family(args.family)
    rows = []
    Ns = _floats(args.N) if args.N else [None]
    ps = _floats(args.p) if args.p else [None]
    alphas = _floats(args.alpha) if args.alpha else [None]
    for N in Ns:
        for p in ps:
            for alpha in alphas:
                kwargs = {"N": N}
                if p is not None:
                    kwargs["p"] = p
                if alpha is not None:
                    kwargs["alpha"] = alpha
                try:
                    spec = make_spec(family, **{k: v for k, v in kwargs.items() if v is not None})
                except (ValueError, TypeError) as exc:
                    raise ConfigError(str(exc)) from exc
                res = optimal_constant(spec)
                label = f"{family.value}(" + ",".join(
                    f"{k}={v:g}" for k, v in kwargs.items() if v is not None) + ")"
                rows.append({"label": label, "family": family.value, "N": N, "p": p,
                             "alpha": alpha, "k_opt": res.value, "provenance": res.provenance})
    if args.format == "json":
        _dump_json({"schema": SCHEMA, "constants": rows}, args.out)
    elif args.format == "csv":
        writer = csv.writer(sys.stdout if not args.out else open(args.out, "w", newline=""),
                            lineterminator="\n")
        writer.writerow(["label", "k_opt", "provenance"])
        for r in rows:
            writer.writerow([r["label"], "%.17g" % r["k_opt"], r["provenance"]])
    else:
        for r in rows:
            print(f"{r['label']:40s} K_opt = {r['k_opt']:.6g}   [{r['provenance']}]")
    figdir = _figdir(args)
    if figdir:
        from . import figures
        figures.constants_figure(rows, os.path.join(figdir, "constants.png"))
    return 0


def cmd_verify(args) -> int:
    checks = []
    if args.prop == "bessel":
        for nu in _floats(args.nu or "0,0.5,1,2.5"):
            ok, worst = catalog.specfun.bessel_inequality_check(nu, args.samples)
            checks.append({"check": f"bessel_bound(nu={nu:g})", "ok": bool(ok), "margin": worst})
    elif args.family:
        family = _parse_family(args.family)
        if family == Family.HARDY:
            rep = catalog.hardy_sweep(args.p, args.N)
            ok = rep["below_target"] and rep["monotone_increase"]
            checks.append({"check": f"hardy(p={args.p:g},N={args.N:g})", "ok": ok,
                           "margin": rep["target"] - rep["sup_estimate"],
                           "note": rep["note"]})
        else:
            spec = _spec_from_args(family, args)
            k = optimal_constant(spec).value
            prof = extremizer(spec)
            gate = check_extremal_asymptotics(prof, spec)
            checks.append({"check": "extremal_asymptotics", "ok": gate.passed,
                           "margin": 0.0 if gate.passed else -1.0,
                           "failed": [c.name for c in gate.failed_clauses()]})
            sweep = sharpness_sweep(spec)
            if family == Family.LOG_SOBOLEV:
                checks.append({"check": "sweep_defect_min", "ok": sweep.ok, "margin": sweep.best_value})
            else:
                rel = sweep.best_value / k - 1.0
                checks.append({"check": "sweep_max_vs_k_opt", "ok": sweep.ok and rel >= -1e-8,
                               "margin": rel, "argmax": sweep.best_label})
    else:
        raise ConfigError("verify needs --family or --prop")
    all_ok = all(c["ok"] for c in checks)
    payload = {"schema": SCHEMA, "checks": checks, "passed": all_ok}
    if args.format == "json":
        _dump_json(payload, args.out)
    else:
        for c in checks:
            state = "PASS" if c["ok"] else "FAIL"
            extra = f"  ({c['note']})" if c.get("note") else ""
            print(f"[{state}] {c['check']}: margin {c['margin']:.6g}{extra}")
    return 0 if all_ok else 1


def cmd_blowdown(args) -> int:
    family = _parse_family(args.family)
    space = _parse_space(args.space, fallback_N=args.N)
    if family == Family.MOSER_TRUDINGER:
        n = int(round(args.N if args.N is not None else space.N))
        threshold = (space.avr or 1.0) ** (1.0 / (n - 1.0)) * catalog.mt_critical_exponent(n)
        c = _resolve_constant(args.c, threshold)
        rep = bd.mt_blowdown(space, n, c)
        payload = {"schema": SCHEMA, "kind": "mt_blowdown", **{k: v for k, v in rep.items()}}
        verdict = rep["verdict"]
        print(f"verdict: {verdict} (threshold {threshold:.6g}, c {c:.6g})")
        if args.out:
            _dump_json(payload, args.out)
        figdir = _figdir(args)
        if figdir:
            from . import figures
            figures.mt_divergence_figure(rep, os.path.join(figdir, "mt_blowdown.png"))
        return 1 if verdict == "violated" else 0
    if family == Family.LOG_SOBOLEV:
        spec = _spec_from_args(family, args)
        auto = cd_constant(spec, space.avr) if space.avr else optimal_constant(spec).value
        c = _resolve_constant(args.c, auto)
        rep = bd.log_sobolev_blowdown(space, spec.p, spec.N, c)
        print(f"avr_bound: {rep['avr_bound']:.6g}  measured: {rep['avr_bound_measured']:.6g}  "
              f"verdict: {rep['verdict']}")
        if args.out:
            _dump_json({"schema": SCHEMA, "kind": "log_sobolev_blowdown", **rep}, args.out)
        return 1 if rep["verdict"] == "violated" else 0
    spec = _spec_from_args(family, args)
    auto = cd_constant(spec, space.avr) if space.avr else optimal_constant(spec).value
    c = _resolve_constant(args.c, auto)
    res = bd.end_to_end_blowdown(space, spec, c=c)
    print(f"avr_bound: {res.bound:.6g}  attained_avr: {res.attained_avr:.6g}  verdict: {res.verdict}")
    if args.out:
        _dump_json(res.report.to_json_dict(), args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(res.report.to_csv())
    figdir = _figdir(args)
    if figdir:
        from . import figures
        figures.blowdown_figure(res.report, os.path.join(figdir, "blowdown.png"))
    return 1 if res.verdict == "violated" else 0


def cmd_rearrange(args) -> int:
    space = _parse_space(args.space, fallback_N=args.N)
    if not args.profile.startswith("csv:"):
        raise ConfigError("profile must be given as csv:PATH with columns 't,u'")
    path = args.profile[4:]
    ts, us = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if row:
                ts.append(float(row[0]))
                us.append(float(row[1]))
    if len(ts) < 3:
        raise ConfigError("profile CSV needs at least 3 samples")
    from scipy.interpolate import PchipInterpolator

    interp = PchipInterpolator(np.asarray(ts), np.asarray(us), extrapolate=False)
    g = lambda t: float(np.nan_to_num(interp(min(max(t, ts[0]), ts[-1])), nan=0.0)) \
        if np.ndim(t) == 0 else np.nan_to_num(interp(np.clip(t, ts[0], ts[-1])), nan=0.0)
    star = rearrangement(g, space, r_cap=ts[-1])
    out = args.out or "rearranged.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["s", "u_star"])
        for s, v in zip(star.grid, star.values):
            writer.writerow(["%.17g" % s, "%.17g" % v])
    print(f"wrote {out} ({star.grid.size} samples)")
    figdir = _figdir(args)
    if figdir:
        from . import figures
        tg = np.linspace(ts[0], ts[-1], 400)
        figures.rearrangement_figure(tg, interp(tg), star, os.path.join(figdir, "rearrangement.png"))
    return 0


_REPORT_SECTIONS = ("constants", "sweeps", "criteria")


def _section_constants():
    rows = []
    for fam, kwargs in [("NASH", {"N": 2}), ("NASH", {"N": 3}), ("NASH", {"N": 4}),
                        ("GNS1", {"N": 3, "p": 2, "alpha": 2}),
                        ("SOBOLEV", {"N": 4, "p": 2}),
                        ("LOG_SOBOLEV", {"N": 3, "p": 2}),
                        ("MORREY", {"N": 2, "p": 4}),
                        ("FABER_KRAHN_1", {"N": 3, "p": 2}),
                        ("FABER_KRAHN_2", {"N": 3, "p": 2}),
                        ("MOSER_TRUDINGER", {"N": 2}),
                        ("HPW", {"N": 3}), ("HARDY", {"N": 4, "p": 2})]:
        spec = make_spec(fam, **kwargs)
        res = optimal_constant(spec)
        label = f"{fam}(" + ",".join(f"{k}={v:g}" for k, v in kwargs.items()) + ")"
        rows.append({"label": label, "k_opt": res.value, "provenance": res.provenance})
    return rows


def _section_sweeps(seed: int):
    out = []
    for fam, kwargs in [("GNS1", {"N": 3, "p": 2, "alpha": 2}), ("NASH", {"N": 3}),
                        ("LOG_SOBOLEV", {"N": 3, "p": 2})]:
        spec = make_spec(fam, **kwargs)
        sweep = sharpness_sweep(spec)
        out.append({"family": fam, "ok": sweep.ok, "best": sweep.best_label,
                    "best_value": sweep.best_value, "k_opt": sweep.k_opt})
    space = builtin_space("cone", N=3, a=0.5)
    worst = 0.0
    for (label, g, dg, decay) in random_monotone_profiles(seed, 8):
        rep = polya_szego_check(g, dg, space, 2.0, decay=decay)
        worst = min(worst, rep.rel_margin)
    out.append({"family": "polya_szego(seed)", "ok": worst >= -1e-5, "worst_rel_margin": worst,
                "seed": seed})
    return out


def cmd_report(args) -> int:
    sections = list(_REPORT_SECTIONS) if args.all or not args.only else [args.only]
    for s in sections:
        if s not in _REPORT_SECTIONS:
            raise ConfigError(f"unknown report section {s!r}")
    doc = {"schema": SCHEMA, "seed": args.seed}
    failed = False
    criteria_rows = None
    if "constants" in sections:
        doc["constants"] = _section_constants()
    if "sweeps" in sections:
        doc["sweeps"] = _section_sweeps(args.seed)
        failed = failed or not all(r["ok"] for r in doc["sweeps"])
    if "criteria" in sections:
        results = acceptance.run_all(verbose=True)
        criteria_rows = [r.row() for r in results]
        doc["criteria"] = criteria_rows
        failed = failed or not all(r.passed for r in results)
    _dump_json(doc, args.out)
    figdir = _figdir(args)
    if figdir:
        from . import figures
        if criteria_rows:
            figures.criteria_figure(criteria_rows, os.path.join(figdir, "criteria.png"))
        if "constants" in doc:
            figures.constants_figure(doc["constants"], os.path.join(figdir, "constants.png"))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cone-sobolev",
        description="Sharp Sobolev-type inequalities on the weighted half-line cone")
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("constants", help="tabulate optimal constants")
    pc.add_argument("--family", required=True)
    pc.add_argument("--N", "--n", dest="N")
    pc.add_argument("--p")
    pc.add_argument("--alpha")
    pc.add_argument("--format", choices=("json", "csv", "text"), default="text")
    pc.add_argument("--out")
    pc.add_argument("--figdir")
    pc.add_argument("--no-figures", dest="figures", action="store_false")

    pv = sub.add_parser("verify", help="run verification checks")
    pv.add_argument("--family")
    pv.add_argument("--prop", choices=("bessel",))
    pv.add_argument("--nu")
    pv.add_argument("--samples", type=int, default=1000)
    _family_value_args(pv)
    pv.add_argument("--format", choices=("json", "text"), default="text")
    pv.add_argument("--out")

    pb = sub.add_parser("blowdown", help="volume-ratio blow-down experiment")
    pb.add_argument("--space", required=True)
    pb.add_argument("--family", required=True)
    _family_value_args(pb)
    pb.add_argument("--c", default="auto")
    pb.add_argument("--out")
    pb.add_argument("--csv")
    pb.add_argument("--figdir")
    pb.add_argument("--no-figures", dest="figures", action="store_false")

    pr = sub.add_parser("rearrange", help="rearrange a sampled radial profile")
    pr.add_argument("--space", required=True)
    pr.add_argument("--profile", required=True)
    pr.add_argument("--N", type=float)
    pr.add_argument("--out")
    pr.add_argument("--fig", dest="figdir")
    pr.add_argument("--no-figures", dest="figures", action="store_false")

    pp = sub.add_parser("report", help="consolidated verification report")
    pp.add_argument("--all", action="store_true")
    pp.add_argument("--only", choices=_REPORT_SECTIONS)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--out")
    pp.add_argument("--figdir")
    pp.add_argument("--no-figures", dest="figures", action="store_false")
    return parser


def _family_value_args(subparser):
    subparser.add_argument("--N", "--n", dest="N", type=float)
    subparser.add_argument("--p", type=float)
    subparser.add_argument("--alpha", type=float)
    subparser.add_argument("--q", type=float)
    subparser.add_argument("--r", type=float)
    subparser.add_argument("--theta", type=float)
    subparser.add_argument("--ckn-alpha", type=float, default=0.0)
    subparser.add_argument("--ckn-beta", type=float, default=0.0)
    subparser.add_argument("--ckn-gamma", type=float, default=0.0)


_DISPATCH = {
    "constants": cmd_constants,
    "verify": cmd_verify,
    "blowdown": cmd_blowdown,
    "rearrange": cmd_rearrange,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
