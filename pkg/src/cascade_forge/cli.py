"""Command-line front end: ``cascade-forge <command> [options]``.

Commands
    certify   run the horseshoe checks at A1 and the emptiness check at A0
    count     print the two-shift census table
    census    solve every cycle at A1 and compare counts, coding and parity
    trace     write branch polylines and event lists for cascades
    cascade   build one cascade per even cycle, write JSON plus a summary table
    report    collect the files in the output directory into report.txt

census, trace and cascade refuse to run unless ``certify`` has passed for the
same configuration (recorded in ``certify.stamp``); ``--force`` overrides this
and leaves a warning line in the report.

Exit status: 0 on success, 2 for an invalid configuration or a failed
inequality, 1 for other computational failures.  Errors are also written to
stderr as one line of JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import io as cfio
from .cascade import build_cascade, theorem1_census
from .config import load_config
from .continuation import continue_branch
from .errors import CascadeForgeError, ConfigError, ThresholdViolationError
from .family import geometry_for
from .horseshoe import a0_threshold, census_at_A1, certify
from .orbit import newton_solve
from .symbolic import SymbolCycle, census, enumerate_cycles, is_even, seed_points

__all__ = ["main", "build_parser"]

log = logging.getLogger("cascade_forge")

STAMP = "certify.stamp"
WARNINGS = "warnings.txt"


class _Failure(Exception):
    def __init__(self, status, payload):
        super().__init__(payload.get("message", ""))
        self.status = status
        self.payload = payload


def _error_payload(exc):
    d = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ThresholdViolationError):
        d["inequality"] = exc.inequality
    return d


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    return load_config(args.config, out=args.out)


def _out_dir(args, cfg=None):
    if args.out:
        return Path(args.out)
    return Path(cfg.out if cfg is not None else "results")


def _require_stamp(cfg, out, force, command):
    stamp = out / STAMP
    ok = stamp.is_file() and stamp.read_text(encoding="utf-8").strip() == cfg.digest()
    if ok:
        return
    if not force:
        raise _Failure(
            2,
            {
                "error": "NotCertified",
                "message": f"no passing certification for this configuration in {out}; run certify or pass --force",
            },
        )
    line = f"warning: {command} ran with --force without a passing certification for config {cfg.digest()[:12]}"
    log.warning(line)
    path = out / WARNINGS
    lines = set(path.read_text(encoding="utf-8").splitlines()) if path.is_file() else set()
    lines.add(line)
    _write(path, "".join(f"{ln}\n" for ln in sorted(lines)))


def _family_and_geometry(cfg):
    spec = cfg.family()
    return spec, geometry_for(spec, cfg.A1)


# -- commands -----------------------------------------------------------------


def cmd_certify(args):
    cfg = _load(args)
    out = _out_dir(args, cfg)
    stamp = out / STAMP
    if stamp.exists():
        stamp.unlink()
    spec, geo = _family_and_geometry(cfg)
    A0, _ = cfg.window(spec)
    report = certify(spec, geo, A0, grid=cfg.grid)
    d = report.to_dict()
    d["config_digest"] = cfg.digest()
    d["a0_threshold"] = a0_threshold(spec, geo)
    _write(out / "certify.json", cfio.dumps_json(d))
    if not report.ok:
        failed = []
        if not report.f1_ok:
            failed.append("F1: strip between J1 and J2 maps outside E")
        if not report.f3_ok:
            failed.append("F3: strips stretched monotonically across L")
        if not report.cone_ok:
            failed.append("cones: DF(S+_1) in S+_N and DF^-1(S-_1) in S-_N1")
        if not report.a0_ok:
            failed.append("A0 < -(beta+(|B|+1)Q+beta^2/4)")
        raise _Failure(
            2,
            {"error": "CertificationFailed", "message": "; ".join(failed), "inequality": failed[0], "failed": failed},
        )
    _write(stamp, cfg.digest() + "\n")
    print(f"certified: A1={cfg.A1!r} A0={A0!r} B={cfg.B!r}")
    return 0


def cmd_count(args):
    kmax = args.kmax
    if kmax is None:
        kmax = _load(args).kmax if args.config else 8
    if not 0 <= kmax <= 24:
        raise ConfigError("kmax must lie in 0..24")
    text = cfio.shift_census_csv([census(k) for k in range(1, kmax + 1)])
    if args.out:
        _write(Path(args.out) / "shift_census.csv", text)
    sys.stdout.write(text)
    return 0


def cmd_census(args):
    cfg = _load(args)
    out = _out_dir(args, cfg)
    _require_stamp(cfg, out, args.force, "census")
    spec, geo = _family_and_geometry(cfg)
    rows, orbits = census_at_A1(
        spec, geo, cfg.kmax, jobs=args.jobs, strict=False, tol=cfg.tol_newton, point_tol=cfg.tol_point
    )
    _write(out / "horseshoe_census.csv", cfio.horseshoe_census_csv(rows))
    listing = {f"{cfio.file_stem(c)}": o.to_dict() for c, o in sorted(orbits.items())}
    _write(out / "orbits_at_A1.json", cfio.dumps_json(listing))
    bad = [r.k for r in rows if not r.ok]
    if bad:
        raise _Failure(1, {"error": "CensusMismatchError", "message": f"census mismatch for k={bad}", "k": bad})
    print(cfio.horseshoe_census_csv(rows), end="")
    return 0


def _trace_cycle(spec, geo, cycle, window, cfg):
    anchor = newton_solve(spec, geo.A1, seed_points(cycle, geo), tol=cfg.tol_newton, warn=False)
    if anchor.flip is False:
        c = build_cascade(spec, anchor, window, depth=cfg.depth, cycle=cycle, localize_tol=cfg.tol_bifurcation)
        return c.segments
    return [continue_branch(spec, anchor, window, -1, localize_tol=cfg.tol_bifurcation)]


def cmd_trace(args):
    cfg = _load(args)
    out = _out_dir(args, cfg)
    _require_stamp(cfg, out, args.force, "trace")
    spec, geo = _family_and_geometry(cfg)
    window = cfg.window(spec)
    if args.cycle:
        cycles = [SymbolCycle.from_label(args.cycle)]
    else:
        cycles = [c for k in range(1, cfg.kmax + 1) for c in enumerate_cycles(k) if is_even(c)]
    for cycle in cycles:
        segments = _trace_cycle(spec, geo, cycle, window, cfg)
        stem = cfio.file_stem(cycle)
        _write(out / "branches" / f"{stem}.csv", cfio.branch_csv(segments))
        events = {
            "cycle": cycle.label(),
            "segments": [
                {"k": s.k, "start": s.start_status, "end": s.end_status, "events": [e.to_dict() for e in s.events]}
                for s in segments
            ],
        }
        _write(out / "branches" / f"{stem}_events.json", cfio.dumps_json(events))
    print(f"traced {len(cycles)} cycle(s) into {out / 'branches'}")
    return 0


def cmd_cascade(args):
    cfg = _load(args)
    out = _out_dir(args, cfg)
    _require_stamp(cfg, out, args.force, "cascade")
    spec, geo = _family_and_geometry(cfg)
    A0, _ = cfg.window(spec)
    result = theorem1_census(
        spec,
        geo,
        cfg.kmax,
        depth=cfg.depth,
        A0=A0,
        jobs=args.jobs,
        tol=cfg.tol_point,
        newton_tol=cfg.tol_newton,
        localize_tol=cfg.tol_bifurcation,
    )
    for c in result.cascades:
        _write(out / "cascades" / f"{cfio.file_stem(c.cycle)}.json", cfio.dumps_json(c.to_dict()))
    _write(out / "cascade_summary.csv", cfio.summary_csv(result.rows))
    if not result.ok:
        raise _Failure(1, {"error": "CascadeCensusFailed", "message": "; ".join(result.violations)})
    print(cfio.summary_csv(result.rows), end="")
    return 0


def cmd_report(args):
    out = _out_dir(args, _load(args) if args.config else None)
    lines = [f"report for {out}"]
    cert = out / "certify.json"
    if cert.is_file():
        d = json.loads(cert.read_text(encoding="utf-8"))
        lines.append(f"certify: {'pass' if d['ok'] else 'FAIL'}")
        for key in ("f1", "f3", "cone", "a0"):
            lines.append(f"  {key}: ok={d[key + '_ok']} margin={d[key + '_margin']!r}")
    else:
        lines.append("certify: not run")
    census_file = out / "horseshoe_census.csv"
    if census_file.is_file():
        rows = cfio.read_horseshoe_census_csv(census_file.read_text(encoding="utf-8"))
        lines.append(f"census: {'pass' if all(r.ok for r in rows) else 'FAIL'} for k=1..{len(rows)}")
        for r in rows:
            lines.append(f"  k={r.k} found={r.found}/{r.expected_orbits} nonflip={r.nonflip}/{r.expected_even}")
    summary = out / "cascade_summary.csv"
    if summary.is_file():
        rows = cfio.read_summary_csv(summary.read_text(encoding="utf-8"))
        lines.append(f"cascades: {sum(r[2] for r in rows)} built")
        for k, expected, built, unique in rows:
            lines.append(f"  k={k} expected={expected} built={built} verified_unique={str(unique).lower()}")
    cdir = out / "cascades"
    if cdir.is_dir():
        for path in sorted(cdir.glob("*.json")):
            d = json.loads(path.read_text(encoding="utf-8"))
            lines.append(f"  {path.stem}: periods={d['periods_seen']} status={d['status']}")
    warn = out / WARNINGS
    if warn.is_file():
        lines.extend(warn.read_text(encoding="utf-8").splitlines())
    text = "\n".join(lines) + "\n"
    _write(out / "report.txt", text)
    sys.stdout.write(text)
    return 0


COMMANDS = {
    "certify": cmd_certify,
    "count": cmd_count,
    "census": cmd_census,
    "trace": cmd_trace,
    "cascade": cmd_cascade,
    "report": cmd_report,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes (default 1)")
    common.add_argument("--force", action="store_true", help="run without a passing certification")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    parser = argparse.ArgumentParser(prog="cascade-forge", description="Period-doubling cascades of perturbed Henon maps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=fn.__doc__)
        if name == "count":
            p.add_argument("--kmax", type=int, help="largest period (default: config or 8)")
        if name == "trace":
            p.add_argument("--cycle", help="trace only this cycle, written with + and - symbols")
    return parser


def main(argv=None):
    level = os.environ.get("CASCADE_FORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        args.jobs = 1
    try:
        return COMMANDS[args.command](args)
    except _Failure as exc:
        payload, status = exc.payload, exc.status
    except (ConfigError, ThresholdViolationError) as exc:
        payload, status = _error_payload(exc), 2
    except (CascadeForgeError, ValueError, OSError) as exc:
        payload, status = _error_payload(exc), 1
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
