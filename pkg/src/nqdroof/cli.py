"""Command-line front end.

Subcommands: catalog, verify, roof, check-roof, growth, tracts, grid, run.
Exit codes: 0 pass, 1 fail, 2 unconverged numerics, 3 input error.
Reports are written as canonical JSON / CSV so identical configurations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import RunConfig
from .errors import ConfigError, DomainError, MalformedCurveError, NqdRoofError
from .geometry import CATALOG_INFO, load_domain
from .roof import build_roof, check_roof
from .tracts import (RoofSampler, analyze_tracts, growth_ratio,
                     pl_lower_bound, three_tract_certificate)
from .verify import default_dictionary, verify_nqd

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNCONVERGED = 2
EXIT_INPUT = 3

HHP_REGION = "-pi/2 - cosh(x) < y < pi/2 + cosh(x)"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_report(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))


def write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                             for x in row) + "\n")


# ------------------------------------------------------------- subcommands

def cmd_catalog(args) -> int:
    entries = []
    for name, info in CATALOG_INFO.items():
        entry = {"name": name, "params": info["params"],
                 "classification": info["classification"]}
        if name == "hhp":
            entry["region"] = HHP_REGION
        entries.append(entry)
    if args.name:
        entries = [e for e in entries if e["name"] == args.name]
        if not entries:
            print(f"unknown catalog name {args.name!r}", file=sys.stderr)
            return EXIT_INPUT
    if args.json:
        print(canonical_json(entries), end="")
    else:
        for e in entries:
            print(f"{e['name']}: params [{e['params']}]")
            print(f"    {e['classification']}")
            if "region" in e:
                print(f"    region: {e['region']}")
    return EXIT_PASS


def _load(args):
    return load_domain(args.domain)


def _config(args) -> RunConfig:
    flags = {}
    for key in ("tol", "n_closed", "n_unbounded", "seed", "grid_spacing",
                "m_ang", "out_dir", "standoff", "station_span"):
        if hasattr(args, key) and getattr(args, key) is not None:
            flags[key] = getattr(args, key)
    if getattr(args, "radii", None):
        r0, r1, n = args.radii.split(":")
        flags["radii"] = (float(r0), float(r1), int(n))
    if getattr(args, "grid_box", None):
        flags["grid_box"] = tuple(float(x) for x in args.grid_box.split(","))
    return RunConfig.from_sources(getattr(args, "config", None), **flags)


def _dictionary(domain, cfg: RunConfig, spec=None):
    if spec and spec != "grid":
        from .verify import TestFunction
        with open(spec) as fh:
            data = json.load(fh)
        return [TestFunction(complex(p[0], p[1]), int(k)) for p, k in data]
    return default_dictionary(domain, standoff=cfg.standoff, orders=cfg.orders,
                              min_size=cfg.dict_min, max_size=cfg.dict_max)


def cmd_verify(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    dictionary = _dictionary(domain, cfg, args.dict)
    report = verify_nqd(domain, dictionary, tol=cfg.tol, standoff=cfg.standoff,
                        n_closed=cfg.n_closed, n_unbounded=cfg.n_unbounded,
                        n_max=cfg.n_max, t_schedule=cfg.t_schedule)
    payload = report.to_dict()
    payload["config"] = cfg.to_dict()
    out = os.path.join(cfg.out_dir, "verification.json")
    write_report(out, payload)
    print(f"{domain.name}: verdict={report.verdict} "
          f"max|residual|={report.max_abs_residual:.3e} ({len(report.rows)} tests)")
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL,
            "unconverged": EXIT_UNCONVERGED}[report.verdict]


def _build(domain, cfg: RunConfig):
    return build_roof(domain, n_closed=cfg.n_closed, n_unbounded=cfg.n_unbounded,
                      T=cfg.t_build, station_count=cfg.station_count,
                      station_span=cfg.station_span)


def cmd_roof(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    cand = _build(domain, cfg)
    payload = cand.to_dict()
    payload["config"] = cfg.to_dict()
    out = args.out or os.path.join(cfg.out_dir, "roof.json")
    write_report(out, payload)
    print(f"{domain.name}: C={cand.C:.6g} "
          f"constants={['%.6g' % c for c in cand.boundary_constants]} "
          f"periods={['%.6g%+.2ej' % (p.real, p.imag) for p in cand.periods]}")
    return EXIT_PASS


def cmd_check_roof(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    cand = _build(domain, cfg)
    dictionary = _dictionary(domain, cfg)
    report = check_roof(cand, tol=cfg.tol, dictionary=dictionary,
                        station_count=cfg.station_count,
                        station_span=cfg.station_span, rng_seed=cfg.seed)
    for c in report.checks:
        print(f"  {c.name:22s} {'pass' if c.passed else 'FAIL':4s} "
              f"value={c.value:.3e} threshold={c.threshold:.1e}")
    out = os.path.join(cfg.out_dir, "roof_checks.json")
    write_report(out, {"domain": domain.name, "config": cfg.to_dict(),
                       **report.to_dict()})
    return EXIT_PASS if report.passed else EXIT_FAIL


def _growth_slope(report) -> float:
    good = np.isfinite(report.max_abs) & (report.max_abs > 0)
    if good.sum() < 2:
        return np.nan
    return float(np.polyfit(np.log(report.radii[good]),
                            np.log(report.max_abs[good]), 1)[0])


def cmd_growth(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    cand = _build(domain, cfg)
    sampler = RoofSampler(cand)
    report = growth_ratio(sampler, cfg.radius_schedule(), m_ang=cfg.m_ang_roof,
                          candidate=cand)
    rows = [(r["r"], r["max_abs_u"], r["ratio"]) for r in report.to_rows()]
    out = os.path.join(cfg.out_dir, "growth.csv")
    write_csv(out, ["r", "max_abs_u", "ratio"], rows)
    slope = _growth_slope(report)
    print(f"{domain.name}: max ratio={report.max_ratio:.4f} "
          f"log-log slope={slope:.3f} sup|grad|={report.sup_grad}")
    return EXIT_PASS if (np.isfinite(slope) and slope <= 1.15) else EXIT_FAIL


def _tract_rows(tract_report):
    rows = []
    for arcs, r in zip(tract_report.arcs, tract_report.radii):
        for a in arcs:
            ts, th = tract_report.theta_table(a.tract_id)
            good = np.isfinite(th) & (ts <= r + 1e-12)
            if good.sum() >= 2:
                try:
                    plb = pl_lower_bound(ts[good], th[good], r)
                except NqdRoofError:
                    plb = float("nan")
            else:
                plb = float("nan")
            rows.append((float(r), a.tract_id, a.theta, a.max_abs, plb))
    return rows


def cmd_tracts(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    cand = _build(domain, cfg)
    sampler = RoofSampler(cand)
    radii = cfg.radius_schedule()
    level = max(c + cand.C for c in cand.boundary_constants)
    neg = analyze_tracts(sampler, radii, ("below", 0.0), cfg.m_ang_roof)
    pos = analyze_tracts(sampler, radii, ("above", level), cfg.m_ang_roof)
    cert = three_tract_certificate(sampler, radii, cfg.m_ang_roof,
                                   candidate=cand)
    rows = _tract_rows(neg) + _tract_rows(pos)
    out = os.path.join(cfg.out_dir, args.emit or "tracts.csv")
    write_csv(out, ["t", "tract_id", "theta", "Mk", "pl_bound"], rows)
    print(f"{domain.name}: certificate={cert.verdict} "
          f"(theta-sum ok: {neg.theta_sum_ok and pos.theta_sum_ok})")
    return EXIT_PASS if cert.verdict == "positive-on-grid" else EXIT_FAIL


def _grid_points(domain, cand, cfg: RunConfig):
    if cfg.grid_box:
        x0, x1, y0, y1 = cfg.grid_box
    else:
        ref = domain.ref
        core = ref.nodes[np.abs(ref.nodes) <= 10 * np.median(np.abs(ref.nodes))]
        pad = ref.scale
        cap = 4.0 * ref.scale
        x0, x1 = max(core.real.min() - pad, -cap), min(core.real.max() + pad, cap)
        y0, y1 = max(core.imag.min() - pad, -cap), min(core.imag.max() + pad, cap)
    # keep the dump tractable on large default boxes
    spacing = max(cfg.grid_spacing, max(x1 - x0, y1 - y0) / 128)
    xs = np.arange(x0, x1 + 0.5 * spacing, spacing)
    ys = np.arange(y0, y1 + 0.5 * spacing, spacing)
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    pts = pts[np.abs(pts) < 0.9 * cand.ext.r_safe]
    inside = domain.contains_many(pts)
    return pts[inside]


def grid_dump(cand, points) -> list:
    """Rows (re, im, u, grad_abs, extrapolated) for in-domain grid points.

    Collar points are evaluated by one-sided extrapolation along the nearest
    node's inward normal and flagged.
    """
    margin, dist, idx = cand.ext.clearance(points)
    rows = []
    safe = margin > 0
    if safe.any():
        vals = cand.eval_u(points[safe])
        grads = cand.grad_u(points[safe])
        for p, u, g in zip(points[safe], vals, grads):
            rows.append((p.real, p.imag, float(u), float(abs(g)), 0))
    collar_idx = np.nonzero(~safe)[0]
    if len(collar_idx):
        nodes = cand.ext.nodes[idx[collar_idx]]
        colls = cand.ext.collar[idx[collar_idx]]
        dzs = cand.rule.dz[idx[collar_idx]]
        nrms = 1j * dzs / np.abs(dzs)
        anchors = nodes + 1.05 * colls * nrms
        ua = cand.eval_u(anchors)
        ga = cand.grad_u(anchors)
        for j, a, u, g in zip(collar_idx, anchors, ua, ga):
            p = points[j]
            u_est = float(u + np.real(np.conj(g) * (p - a)))
            rows.append((p.real, p.imag, u_est, float(abs(g)), 1))
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


def cmd_grid(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    cand = _build(domain, cfg)
    pts = _grid_points(domain, cand, cfg)
    rows = grid_dump(cand, pts)
    out = os.path.join(cfg.out_dir, args.emit or "grid.csv")
    write_csv(out, ["re", "im", "u", "grad_abs", "extrapolated"], rows)
    if not rows:
        print("warning: grid entirely inside the collar; empty output")
    print(f"{domain.name}: {len(rows)} grid points -> {out}")
    return EXIT_PASS


def cmd_run(args) -> int:
    cfg = _config(args)
    domain = _load(args)
    os.makedirs(cfg.out_dir, exist_ok=True)

    dictionary = _dictionary(domain, cfg)
    vrep = verify_nqd(domain, dictionary, tol=cfg.tol, standoff=cfg.standoff,
                      n_closed=cfg.n_closed, n_unbounded=cfg.n_unbounded,
                      n_max=cfg.n_max, t_schedule=cfg.t_schedule)
    vpayload = vrep.to_dict()
    vpayload["config"] = cfg.to_dict()
    write_report(os.path.join(cfg.out_dir, "verification.json"), vpayload)
    print(f"verify: {vrep.verdict} (max |residual| = {vrep.max_abs_residual:.3e})")

    cand = _build(domain, cfg)
    write_report(os.path.join(cfg.out_dir, "roof.json"),
                 {**cand.to_dict(), "config": cfg.to_dict()})

    crep = check_roof(cand, tol=cfg.tol, dictionary=dictionary,
                      station_count=cfg.station_count,
                      station_span=cfg.station_span, rng_seed=cfg.seed)
    print(f"check-roof: {'pass' if crep.passed else 'FAIL'} "
          f"({', '.join(crep.failed_names()) or 'all checks pass'})")

    sampler = RoofSampler(cand)
    radii = cfg.radius_schedule()
    grep = growth_ratio(sampler, radii, m_ang=cfg.m_ang_roof, candidate=cand)
    slope = _growth_slope(grep)
    growth_ok = np.isfinite(slope) and slope <= 1.15
    print(f"growth: max ratio {grep.max_ratio:.3f}, slope {slope:.3f} "
          f"({'pass' if growth_ok else 'FAIL'})")

    neg = analyze_tracts(sampler, radii, ("below", 0.0), cfg.m_ang_roof)
    cert = three_tract_certificate(sampler, radii, cfg.m_ang_roof, candidate=cand)
    write_csv(os.path.join(cfg.out_dir, "tracts.csv"),
              ["t", "tract_id", "theta", "Mk", "pl_bound"], _tract_rows(neg))
    print(f"tracts: certificate {cert.verdict}")

    pts = _grid_points(domain, cand, cfg)
    write_csv(os.path.join(cfg.out_dir, "grid.csv"),
              ["re", "im", "u", "grad_abs", "extrapolated"], grid_dump(cand, pts))

    if vrep.verdict == "unconverged":
        return EXIT_UNCONVERGED
    ok = (vrep.verdict == "pass" and crep.passed and growth_ok
          and cert.verdict == "positive-on-grid")
    return EXIT_PASS if ok else EXIT_FAIL


# ------------------------------------------------------------------- parser

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nqdroof",
        description="Arclength null-quadrature testing and roof-function "
                    "construction for planar domains")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, domain=True):
        if domain:
            sp.add_argument("domain", help="catalog name (e.g. hhp, "
                            "ellipse-exterior:2,1) or domain JSON file")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--n-closed", dest="n_closed", type=int)
        sp.add_argument("--n-unbounded", dest="n_unbounded", type=int)
        sp.add_argument("--standoff", type=float)
        sp.add_argument("--station-span", dest="station_span", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out-dir", dest="out_dir")
        sp.add_argument("--radii", help="r0:r1:count geometric schedule")
        sp.add_argument("--grid-box", dest="grid_box", help="x0,x1,y0,y1")
        sp.add_argument("--grid-spacing", dest="grid_spacing", type=float)
        sp.add_argument("--m-ang", dest="m_ang", type=int)

    sp = sub.add_parser("catalog", help="list built-in domains")
    sp.add_argument("name", nargs="?", help="show one entry")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_catalog)

    sp = sub.add_parser("verify", help="null-quadrature residual test")
    add_common(sp)
    sp.add_argument("--dict", help="'grid' (default) or JSON pole file")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("roof", help="construct the roof candidate")
    add_common(sp)
    sp.add_argument("--out", help="output JSON path")
    sp.set_defaults(fn=cmd_roof)

    sp = sub.add_parser("check-roof", help="verify roof-function properties")
    add_common(sp)
    sp.set_defaults(fn=cmd_check_roof)

    sp = sub.add_parser("growth", help="linear growth ratio table")
    add_common(sp)
    sp.set_defaults(fn=cmd_growth)

    sp = sub.add_parser("tracts", help="tract lengths and positivity certificate")
    add_common(sp)
    sp.add_argument("--emit", help="CSV output filename")
    sp.set_defaults(fn=cmd_tracts)

    sp = sub.add_parser("grid", help="dump u and |grad u| on a grid")
    add_common(sp)
    sp.add_argument("--emit", help="CSV output filename")
    sp.set_defaults(fn=cmd_grid)

    sp = sub.add_parser("run", help="full pipeline with report files")
    add_common(sp)
    sp.set_defaults(fn=cmd_run)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DomainError, MalformedCurveError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NqdRoofError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED


if __name__ == "__main__":
    sys.exit(main())
