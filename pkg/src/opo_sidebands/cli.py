"""Command-line entry point: ``opo-sidebands {covariance,sweep,validate}``.

Exit codes are a stable contract::

    0  success
    1  validation failure (or an unphysical covariance)
    2  configuration error; nothing is written
    3  operating point at or beyond the oscillation boundary

Numbers are written with 17 significant digits, so re-parsing any output
recovers the in-memory doubles exactly.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cavity import OscillationBoundaryError
from .config import OUTPUT_FORMATS, ConfigError, load_config, reference_config
from .covariance import PhysicalityError, output_covariance, physicality_report, sa_labels, to_sa_blocks
from .validation import run_suite, suite_passed

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_BOUNDARY = 3

logger = logging.getLogger("opo_sidebands")

# Names of the S/A-block entries in the resonant pattern, including the terms
# that only appear with phonons. A leading '-' marks an entry equal to minus
# the named term; "0" marks an entry that vanishes in both patterns.
VS_SYMBOLS = (
    ("rho_0", "e1", "mu_01", "e2", "mu_02", "e3"),
    ("e1", "beta_0", "e4", "nu_01", "e5", "nu_02"),
    ("mu_01", "e4", "rho_1", "e6", "zeta_12", "e7"),
    ("e2", "nu_01", "e6", "beta_1", "e8", "epsilon_12"),
    ("mu_02", "e5", "zeta_12", "e8", "rho_2", "e9"),
    ("e3", "nu_02", "e7", "epsilon_12", "e9", "beta_2"),
)
CSA_SYMBOLS = (
    ("delta_0", "0", "h1", "-kappa_01", "h2", "-kappa_02"),
    ("0", "delta_0", "lambda_01", "h3", "lambda_02", "h4"),
    ("h3", "kappa_01", "delta_1", "0", "h5", "-varrho_12"),
    ("-lambda_01", "h1", "0", "delta_1", "eta_12", "h6"),
    ("h4", "kappa_02", "h6", "varrho_12", "delta_2", "0"),
    ("-lambda_02", "h2", "-eta_12", "h5", "0", "delta_2"),
)


def _va_symbol(i, j):
    # V_a is V_s under p_s -> q_a, q_s -> -p_a
    si, sj = i ^ 1, j ^ 1
    sign = -1 if (i % 2) != (j % 2) else 1
    name = VS_SYMBOLS[si][sj]
    return name if sign > 0 else f"-{name}"


def entry_symbol(block, i, j):
    if block == "V_s":
        return VS_SYMBOLS[i][j]
    if block == "V_a":
        return _va_symbol(i, j)
    return CSA_SYMBOLS[i][j]


def fmt(x) -> str:
    return format(float(x), ".17g")


def parse_grid(text):
    """``"start:stop:count"`` to an inclusive linear grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--grid", "expected start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError("--grid", f"cannot parse {text!r}") from None
    if count < 1:
        raise ConfigError("--grid", "count must be at least 1")
    if not (np.isfinite(start) and np.isfinite(stop)):
        raise ConfigError("--grid", "bounds must be finite")
    return np.linspace(start, stop, count)


def _switch(value):
    return None if value is None else value == "on"


def resolve_config(args):
    cfg = load_config(args.config) if args.config else reference_config()
    changes = {}
    if getattr(args, "phonons", None) is not None:
        changes["phonons_enabled"] = _switch(args.phonons)
    if getattr(args, "detection", None) is not None:
        changes["detection_enabled"] = _switch(args.detection)
    if getattr(args, "format", None) is not None:
        changes["output_format"] = args.format
    return cfg.replace(**changes) if changes else cfg


# ---------------------------------------------------------------- rendering


def matrix_csv(matrix, labels) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["", *labels])
    for lab, row in zip(labels, matrix):
        w.writerow([lab, *(fmt(x) for x in row)])
    return buf.getvalue()


def blocks_csv(blocks) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["block", "i", "j", "symbol", "value"])
    for name, m in _block_items(blocks):
        for i in range(6):
            for j in range(6):
                w.writerow([name, i, j, entry_symbol(name, i, j), fmt(m[i, j])])
    return buf.getvalue()


def report_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "value"])
    w.writerow(["min_eigenvalue", fmt(report.min_eigenvalue)])
    w.writerow(["purity", fmt(report.purity)])
    for k, nu in enumerate(report.symplectic_eigenvalues):
        w.writerow([f"symplectic_eigenvalue_{k}", fmt(nu)])
    w.writerow(["physical", str(report.passed()).lower()])
    return buf.getvalue()


def _block_items(blocks):
    return (("V_s", blocks.V_s), ("V_a", blocks.V_a), ("C_sa", blocks.C_sa))


def _matrix_list(m):
    return [[float(x) for x in row] for row in m]


def covariance_document(cfg, cov, blocks, report) -> dict:
    return {
        "generator": f"opo-sidebands {__version__}",
        "config": cfg.to_dict(),
        "labels": list(cov.labels),
        "covariance": _matrix_list(cov.matrix),
        "sa_labels": list(sa_labels()),
        "sa_blocks": {name: _matrix_list(m) for name, m in _block_items(blocks)},
        "physicality": report.to_dict(),
    }


def matrix_table(matrix, labels, width=10) -> str:
    head = " " * 6 + "".join(f"{lab:>{width}}" for lab in labels)
    rows = [f"{lab:<6}" + "".join(f"{x:>{width}.5f}" for x in row) for lab, row in zip(labels, matrix)]
    return "\n".join([head, *rows])


def covariance_table(cov, blocks, report) -> str:
    sa = sa_labels()
    parts = [
        "Output covariance, frequency basis (shot-noise units)",
        matrix_table(cov.matrix, cov.labels),
        "",
        "V_s",
        matrix_table(blocks.V_s, sa[:6]),
        "",
        "V_a",
        matrix_table(blocks.V_a, sa[6:]),
        "",
        "C_sa (rows S, columns A)",
        matrix_table(blocks.C_sa, sa[:6]),
        "",
        f"min eigenvalue of V + i Omega: {report.min_eigenvalue:.3e}",
        f"purity: {report.purity:.6f}",
        "symplectic eigenvalues: " + " ".join(f"{nu:.6f}" for nu in report.symplectic_eigenvalues),
        f"physical: {'yes' if report.passed() else 'no'}",
    ]
    return "\n".join(parts) + "\n"


def _write(out_dir, files):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text, encoding="utf-8")
        logger.info("wrote %s", out_dir / name)


# ---------------------------------------------------------------- commands


def cmd_covariance(args) -> int:
    cfg = resolve_config(args)
    cov = output_covariance(cfg)
    blocks = to_sa_blocks(cov)
    report = physicality_report(cov)
    fmt_ = cfg.output_format
    if fmt_ == "csv":
        files = {
            "covariance.csv": matrix_csv(cov.matrix, cov.labels),
            "sa_blocks.csv": blocks_csv(blocks),
            "physicality.csv": report_csv(report),
        }
    elif fmt_ == "json":
        files = {"covariance.json": json.dumps(covariance_document(cfg, cov, blocks, report), indent=2) + "\n"}
    else:
        files = {"covariance.txt": covariance_table(cov, blocks, report)}
    if args.output is None:
        for text in files.values():
            sys.stdout.write(text)
    else:
        _write(Path(args.output), files)
    return EXIT_OK


SWEEP_COLUMNS = ["point", "sigma", "omega_analysis_hz", "status", "block", "i", "j", "symbol", "value"]


def sweep_rows(cfg, axis, grid):
    """Long-format rows of the S/A blocks at every grid point.

    A point that fails is recorded as a single row whose status names the
    failure; the sweep carries on.
    """
    field = "sigma" if axis == "sigma" else "omega_analysis_hz"
    rows = []
    for k, x in enumerate(grid):
        point = [k, None, None]
        try:
            pcfg = cfg.replace(**{field: float(x)})
            point[1:] = [pcfg.sigma, pcfg.omega_analysis_hz]
            blocks = to_sa_blocks(output_covariance(pcfg))
        except (ConfigError, OscillationBoundaryError, PhysicalityError) as exc:
            if point[1] is None:
                point[1:] = [cfg.sigma, cfg.omega_analysis_hz]
                point[1 if axis == "sigma" else 2] = float(x)
            kind = {ConfigError: "config-error", OscillationBoundaryError: "oscillation-boundary",
                    PhysicalityError: "unphysical"}[type(exc)]
            logger.warning("sweep point %d (%s = %s) failed: %s", k, field, fmt(x), exc)
            rows.append([*point, f"{kind}: {exc}", "", "", "", "", ""])
            continue
        for name, m in _block_items(blocks):
            for i in range(6):
                for j in range(6):
                    rows.append([*point, "ok", name, i, j, entry_symbol(name, i, j), m[i, j]])
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r[0], fmt(r[1]), fmt(r[2]), *r[3:8], "" if r[8] == "" else fmt(r[8])])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    grid = parse_grid(args.grid)
    rows = sweep_rows(cfg, args.axis, grid)
    if cfg.output_format == "json":
        doc = {"axis": args.axis, "grid": [float(x) for x in grid], "config": cfg.to_dict(),
               "columns": SWEEP_COLUMNS, "rows": [[_jsonable(v) for v in r] for r in rows]}
        files = {"sweep.json": json.dumps(doc, indent=2) + "\n"}
    elif cfg.output_format == "table":
        files = {"sweep.txt": _sweep_table(rows)}
    else:
        files = {"sweep.csv": sweep_csv(rows)}
    if args.output is None:
        for text in files.values():
            sys.stdout.write(text)
    else:
        _write(Path(args.output), files)
    return EXIT_OK


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _sweep_table(rows) -> str:
    lines = [f"{'point':>5} {'sigma':>8} {'omega/2pi [Hz]':>15} {'block':>5} {'i':>2} {'j':>2} {'symbol':>11} {'value':>12}"]
    for r in rows:
        if r[3] != "ok":
            lines.append(f"{r[0]:>5} {r[1]:>8.4f} {r[2]:>15.6g}  {r[3]}")
            continue
        lines.append(f"{r[0]:>5} {r[1]:>8.4f} {r[2]:>15.6g} {r[4]:>5} {r[5]:>2} {r[6]:>2} {r[7]:>11} {r[8]:>12.6f}")
    return "\n".join(lines) + "\n"


def report_table(reports) -> str:
    width = max(len(r.name) for r in reports)
    lines = [f"{'check':<{width}}  {'max abs error':>13}  {'tolerance':>9}  result"]
    for r in reports:
        verdict = "pass" if r.passed else ("FAIL" if r.gating else "fail (diagnostic)")
        line = f"{r.name:<{width}}  {r.max_abs_error:>13.3e}  {r.tolerance:>9.1e}  {verdict}"
        if r.detail and not r.passed:
            line += f"  [{r.detail}]"
        lines.append(line)
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    cfg = resolve_config(args)
    reports = run_suite(cfg)
    if args.format == "json":
        sys.stdout.write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    else:
        sys.stdout.write(report_table(reports))
    if suite_passed(reports):
        return EXIT_OK
    for r in reports:
        if r.gating and not r.passed:
            print(f"validation failed: {r.name}", file=sys.stderr)
    return EXIT_VALIDATION


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opo-sidebands",
        description="Sideband covariance of a triply resonant optical parametric oscillator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for numerics")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config; omitted keys use the reference values")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="output format (default: config value)")
    common.add_argument("--phonons", choices=("on", "off"), help="include the crystal phonon reservoir")
    common.add_argument("--detection", choices=("on", "off"), help="apply detection efficiencies")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("covariance", parents=[common], help="covariance, S/A blocks and physicality report")
    p.add_argument("--output", metavar="DIR", help="write files here instead of stdout")
    p.set_defaults(func=cmd_covariance)

    p = sub.add_parser("sweep", parents=[common], help="long-format S/A covariance over a parameter grid")
    p.add_argument("--axis", choices=("sigma", "omega"), required=True,
                   help="sigma (pump over threshold) or omega (analysis frequency in Hz)")
    p.add_argument("--grid", required=True, metavar="START:STOP:COUNT", help="inclusive linear grid")
    p.add_argument("--output", metavar="DIR", help="write files here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[common], help="run the invariant and oracle suite")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OscillationBoundaryError as exc:
        print(f"oscillation boundary: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except PhysicalityError as exc:
        print(f"unphysical result: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
