"""Command line interface: construct | verify | catalog.

Exit statuses: 0 pass, 1 verification failure, 2 inconclusive verdict,
3 usage or configuration error, 4 numeric or pipeline error. Unknown flags
are errors. All configuration happens through flags; no environment
variables are consulted.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .catalog import CATALOG, ParameterError, UnknownEntryError, catalog_lookup
from .constructor import (
    AmbientKind,
    PatternChangeError,
    lift_palmer,
    product_lifts,
    space_form_lifts,
    thread_root_fields,
    SPACE_FORM_FAMILY,
)
from .core import DEFAULTS, GeometryError
from .reporting import IngestError, read_mesh, render_report, write_mesh
from .verifier import assemble_report

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_PIPELINE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    entry: str = ""
    params: dict = field(default_factory=dict)
    ambient: Optional[AmbientKind] = None
    grid: Optional[tuple] = None
    step: Optional[float] = None
    tol_marginal: Optional[float] = None
    out_dir: Path = Path(".")
    root_index: Optional[int] = None
    mesh: Optional[Path] = None

    def validate(self):
        if self.grid is not None and any(g < 3 for g in self.grid):
            raise UsageError("grid resolutions must be at least 3")
        if self.step is not None and self.step <= 0:
            raise UsageError("step must be positive")
        if self.tol_marginal is not None and self.tol_marginal <= 0:
            raise UsageError("tolerances must be positive")


def _parse_params(text: Optional[str]) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"--params items must look like key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value.strip()
    return out


def _parse_grid(text: Optional[str]) -> Optional[tuple]:
    if text is None:
        return None
    parts = text.lower().split("x")
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--grid expects NxM, got {text!r}")
    if len(vals) == 1:
        vals = (vals[0], vals[0])
    return vals


def _parse_ambient(text: Optional[str]) -> Optional[AmbientKind]:
    if text is None:
        return None
    try:
        return AmbientKind(text)
    except ValueError:
        names = ", ".join(k.value for k in AmbientKind)
        raise UsageError(f"unknown ambient {text!r}; choose from {names}")


def _config_echo(cfg: RunConfig, root_index=None) -> str:
    grid = "default" if cfg.grid is None else "x".join(str(g) for g in cfg.grid)
    parts = [
        f"grid={grid}",
        f"step={cfg.step if cfg.step is not None else DEFAULTS.step_h:g}",
        f"tol_marginal={cfg.tol_marginal if cfg.tol_marginal is not None else DEFAULTS.tol_marginal:g}",
    ]
    if cfg.ambient is not None:
        parts.append(f"ambient={cfg.ambient.value}")
    if root_index is not None:
        parts.append(f"root_index={root_index}")
    if cfg.params:
        items = ",".join(f"{k}={v}" for k, v in sorted(cfg.params.items()))
        parts.append(f"params={items}")
    return " ".join(parts)


def _report_exit(report, expected: Optional[str]) -> int:
    if report.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    if expected is not None:
        return EXIT_PASS if report.verdict == expected else EXIT_FAIL
    return EXIT_PASS if report.verdict == "marginally_trapped" else EXIT_FAIL


def _mesh_rows(lift, report):
    chart_pts, ambient_pts, residuals = [], [], []
    width = lift.ambient.container_dim
    for rec in report.records:
        chart_pts.append(rec.x)
        res = math.nan
        pos = None
        if not rec.excluded:
            res = min(rec.null_residual_primary, rec.null_residual_opposite)
            pos = rec.position
        if pos is None or len(pos) != width:
            try:
                pos = tuple(lift(np.asarray(rec.x)))
            except GeometryError:
                pos = (math.nan,) * width
        ambient_pts.append(pos)
        residuals.append(res)
    return np.array(chart_pts), np.array(ambient_pts), np.array(residuals)


def _write_report_file(cfg: RunConfig, lift, report, root_index, entry_name,
                       stem=None):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if stem is None:
        suffix = "" if root_index is None else f"-root{root_index}"
        stem = f"{entry_name}-{lift.ambient.kind.value}{suffix}"
    report_path = cfg.out_dir / f"{stem}.report.txt"
    echo = _config_echo(cfg, root_index)
    report_path.write_text(render_report(report, echo, entry=entry_name))
    return report_path


def _write_outputs(cfg: RunConfig, lift, report, root_index, entry_name):
    report_path = _write_report_file(cfg, lift, report, root_index, entry_name)
    ambient = lift.ambient.kind.value
    suffix = "" if root_index is None else f"-root{root_index}"
    mesh_path = cfg.out_dir / f"{entry_name}-{ambient}{suffix}.mesh.txt"
    grid = report_grid(cfg, lift)
    metadata = {
        "entry": entry_name,
        "ambient": ambient,
        "params": ",".join(f"{k}={v}" for k, v in sorted(cfg.params.items())),
        "root_index": "" if root_index is None else str(root_index),
        "grid": "x".join(str(g) for g in grid),
        "step": f"{cfg.step if cfg.step is not None else DEFAULTS.step_h:g}",
        "verdict": report.verdict,
    }
    chart_pts, ambient_pts, residuals = _mesh_rows(lift, report)
    write_mesh(mesh_path, metadata, chart_pts, ambient_pts, residuals)
    return report_path, mesh_path


def report_grid(cfg: RunConfig, lift) -> tuple:
    return cfg.grid if cfg.grid is not None else tuple(lift.chart.resolution)


def _lifts_for(cfg: RunConfig, entry, built):
    if entry.kind == "support":
        if cfg.ambient not in (None, AmbientKind.MINKOWSKI):
            raise UsageError("support entries lift into the flat Lorentzian space")
        return [(None, lift_palmer(built))]
    if entry.kind != "hypersurface":
        raise UsageError(
            f"entry {entry.name!r} is already a lift; use 'verify' instead")
    if cfg.ambient is None:
        raise UsageError("construct needs --ambient for hypersurface entries")
    thread_root_fields(built, cfg.ambient,
                       resolution=tuple(min(9, r) for r in built.chart.resolution),
                       h=cfg.step)
    if cfg.ambient in SPACE_FORM_FAMILY:
        lifts = space_form_lifts(built, cfg.ambient, h=cfg.step)
    else:
        lifts = product_lifts(built, cfg.ambient, h=cfg.step)
    if cfg.root_index is not None:
        if not 0 <= cfg.root_index < len(lifts):
            raise UsageError(
                f"--root-index {cfg.root_index} out of range, {len(lifts)} root(s)")
        return [(cfg.root_index, lifts[cfg.root_index])]
    return list(enumerate(lifts))


def cmd_construct(cfg: RunConfig) -> int:
    entry, built = catalog_lookup(cfg.entry, cfg.params)
    indexed = _lifts_for(cfg, entry, built)
    if not indexed:
        print(f"warning: entry {cfg.entry!r} admits no lifts in "
              f"{cfg.ambient.value} (umbilic or minimal spectrum)", file=sys.stderr)
        return EXIT_PASS
    status = EXIT_PASS
    for idx, lift in indexed:
        report = assemble_report(lift, resolution=cfg.grid, h=cfg.step,
                                 tol_marginal=cfg.tol_marginal)
        rpath, mpath = _write_outputs(cfg, lift, report, idx, cfg.entry)
        print(f"root {idx if idx is not None else 0}: verdict={report.verdict} "
              f"report={rpath} mesh={mpath}")
        if report.verdict == "inconclusive":
            status = max(status, EXIT_INCONCLUSIVE)
        elif report.verdict != "marginally_trapped":
            status = max(status, EXIT_FAIL)
    return status


def _verify_mesh(cfg: RunConfig) -> int:
    mesh_path = cfg.mesh
    metadata, chart_pts, ambient_pts, _ = read_mesh(mesh_path)
    name = metadata.get("entry", "")
    params = _parse_params(metadata.get("params", ""))
    entry, built = catalog_lookup(name, params)
    cfg = RunConfig(entry=name, params=params,
                    ambient=_parse_ambient(metadata.get("ambient") or None),
                    grid=_parse_grid(metadata.get("grid") or None),
                    step=float(metadata["step"]) if metadata.get("step") else None,
                    tol_marginal=cfg.tol_marginal, out_dir=cfg.out_dir,
                    root_index=int(metadata["root_index"])
                    if metadata.get("root_index") else None,
                    mesh=mesh_path)
    if entry.kind == "lift":
        lift = built
    elif entry.kind == "support":
        lift = lift_palmer(built)
    else:
        indexed = _lifts_for(cfg, entry, built)
        wanted = cfg.root_index if cfg.root_index is not None else 0
        lift = dict(indexed).get(wanted) if indexed and indexed[0][0] is not None \
            else (indexed[0][1] if indexed else None)
        if lift is None:
            raise IngestError(f"mesh names root {wanted} but the entry has none")
    # ingest sanity: the stored coordinates must match the rebuilt lift
    sample = chart_pts[:: max(1, len(chart_pts) // 16)]
    stored = ambient_pts[:: max(1, len(chart_pts) // 16)]
    for x, amb in zip(sample, stored):
        if np.any(np.isnan(amb)):
            continue
        got = lift(x)
        if np.max(np.abs(got - amb)) > 1e-8 * (1.0 + np.max(np.abs(amb))):
            raise IngestError(
                f"mesh row at chart {tuple(x)} disagrees with the rebuilt "
                f"entry by {np.max(np.abs(got - amb)):.3e}")
    report = assemble_report(lift, resolution=cfg.grid, h=cfg.step,
                             tol_marginal=cfg.tol_marginal)
    _write_report_file(cfg, lift, report, cfg.root_index, name,
                       stem=f"{cfg.mesh.stem}.verify")
    print(f"verdict={report.verdict} (round-trip of {cfg.mesh})")
    return _report_exit(report, metadata.get("verdict") or entry.expected_verdict)


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.mesh is not None:
        return _verify_mesh(cfg)
    entry, built = catalog_lookup(cfg.entry, cfg.params)
    if entry.kind == "lift":
        lift = built
    elif entry.kind == "support":
        lift = lift_palmer(built)
    else:
        raise UsageError(
            f"entry {cfg.entry!r} is a hypersurface; 'verify' checks lifted "
            "entries (use 'construct' to build and check its lifts)")
    report = assemble_report(lift, resolution=cfg.grid, h=cfg.step,
                             tol_marginal=cfg.tol_marginal)
    rpath = _write_report_file(cfg, lift, report, cfg.root_index, cfg.entry)
    print(f"entry={cfg.entry} verdict={report.verdict} "
          f"expected={entry.expected_verdict or 'n/a'} report={rpath}")
    return _report_exit(report, entry.expected_verdict)


def cmd_catalog() -> int:
    width = max(len(n) for n in CATALOG) + 2
    for name, entry in CATALOG.items():
        params = entry.params_doc or "none"
        expected = entry.expected_verdict or "-"
        print(f"{name:<{width}} {entry.kind:<13} expected={expected}")
        print(f"{'':<{width}} params: {params}")
        print(f"{'':<{width}} {entry.citation}")
    return EXIT_PASS


def build_parser() -> _Parser:
    parser = _Parser(prog="marlift",
                     description="construct and verify marginally trapped lifts")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--entry", default="")
        p.add_argument("--params", default=None,
                       help="comma-separated key=value entry parameters")
        p.add_argument("--ambient", default=None,
                       help="minkowski | desitter | antidesitter | "
                            "sphere-product | hyperbolic-product")
        p.add_argument("--grid", default=None, help="sampling resolution NxM")
        p.add_argument("--step", type=float, default=None,
                       help="finite difference step")
        p.add_argument("--tol-marginal", type=float, default=None)
        p.add_argument("--out-dir", default=".")
        p.add_argument("--root-index", type=int, default=None)

    add_common(sub.add_parser("construct", help="build lifts and verify them"))
    pv = sub.add_parser("verify", help="verify a lifted entry or a mesh file")
    add_common(pv)
    pv.add_argument("--mesh", default=None, help="re-verify a constructed mesh")
    sub.add_parser("catalog", help="list the example catalog")
    return parser


def _config_from(args) -> RunConfig:
    cfg = RunConfig(
        entry=args.entry,
        params=_parse_params(args.params),
        ambient=_parse_ambient(args.ambient),
        grid=_parse_grid(args.grid),
        step=args.step,
        tol_marginal=args.tol_marginal,
        out_dir=Path(args.out_dir),
        root_index=args.root_index,
        mesh=Path(args.mesh) if getattr(args, "mesh", None) else None,
    )
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "catalog":
            return cmd_catalog()
        cfg = _config_from(args)
        if args.command == "construct":
            if not cfg.entry:
                raise UsageError("construct needs --entry")
            return cmd_construct(cfg)
        if not cfg.entry and cfg.mesh is None:
            raise UsageError("verify needs --entry or --mesh")
        return cmd_verify(cfg)
    except (UsageError, UnknownEntryError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestError as exc:
        print(f"ingest error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except PatternChangeError as exc:
        print(f"pipeline error (root threading): {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except GeometryError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
