"""Command-line front end.

    collective-cqed <constants|coupling|eigenmap|spectrum|oracle> --config PATH --out PATH
                    [--threads K] [--threshold]

Exit status is 0 on success, 1 on a configuration or model error and 2 when
the oracle battery finds a deviation outside its tolerance. Every artifact is
written to a temporary file first and moved into place only once all
artifacts of the run are complete, so a failed run leaves nothing behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .atomic_data import build_dipole_table
from .config import ConfigError, RunConfig, load_config
from .coupling import effective_couplings
from .full_model import verification_battery
from .lineshape import ProbeSweep, spectrum_sweep
from .reduced_model import ReducedSystem, eigen_map

__all__ = ["SUBCOMMANDS", "run", "main"]

SUBCOMMANDS = ("constants", "coupling", "eigenmap", "spectrum", "oracle")

EXIT_OK, EXIT_ERROR, EXIT_ORACLE = 0, 1, 2


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _json(obj) -> str:
    # json uses repr for floats, which is the shortest round-trip form
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _csv(header: list[str], rows, metadata: dict) -> str:
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=False)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, (int, str)) else _fmt(v) for v in row])
    return buf.getvalue()


def _per_n_path(out: Path, n: float, multi: bool) -> Path:
    if not multi:
        return out
    return out.with_name(f"{out.stem}_N{_fmt(n)}{out.suffix}")


def _couplings(config: RunConfig):
    return effective_couplings(build_dipole_table(), config.mf_distribution, config.spatial)


def _template(config: RunConfig, n: float) -> ReducedSystem:
    return ReducedSystem.from_line(config.line, _couplings(config), n)


def _metadata(config: RunConfig, n: float | None = None) -> dict:
    meta = {"config": config.to_dict(), "couplings": _couplings(config).to_dict()}
    if n is not None:
        meta["atom_number"] = n
    return meta


def _constants(config: RunConfig, out: Path, threads):
    table = build_dipole_table()
    doc = {"dipole_table": table.to_dict(), "line_constants": config.line.to_dict()}
    return {out: _json(doc)}, EXIT_OK


def _coupling(config: RunConfig, out: Path, threads):
    doc = {"config": config.to_dict(), "effective_couplings": _couplings(config).to_dict()}
    return {out: _json(doc)}, EXIT_OK


def _eigenmap(config: RunConfig, out: Path, threads):
    artifacts = {}
    for n in config.atom_numbers:
        result = eigen_map(_template(config, n), config.cavity_grid.values(), threads=threads)
        rows = [
            (dc, k, mode.energy, mode.photonic_weight)
            for dc, modes in result
            for k, mode in enumerate(modes)
        ]
        path = _per_n_path(out, n, config.multi_n)
        if config.output_format == "json":
            doc = {"metadata": _metadata(config, n),
                   "columns": ["Δ_C_MHz", "mode_index", "energy_MHz", "photonic_weight"],
                   "rows": [[float(r[0]), r[1], float(r[2]), float(r[3])] for r in rows]}
            artifacts[path] = _json(doc)
        else:
            artifacts[path] = _csv(["Δ_C_MHz", "mode_index", "energy_MHz", "photonic_weight"],
                                   rows, _metadata(config, n))
    return artifacts, EXIT_OK


def _spectrum(config: RunConfig, out: Path, threads):
    artifacts = {}
    sweep = ProbeSweep(config.probe_grid.values())
    level = config.threshold_level if config.threshold else None
    for n in config.atom_numbers:
        grid = spectrum_sweep(_template(config, n), config.cavity_grid.values(), sweep,
                              threshold=level, threads=threads)
        rows = [
            (dc, dp, grid.values[i, j])
            for i, dc in enumerate(grid.cavity_detunings)
            for j, dp in enumerate(grid.probe_detunings)
        ]
        path = _per_n_path(out, n, config.multi_n)
        if config.output_format == "json":
            doc = {"metadata": _metadata(config, n),
                   "columns": ["Δ_C_MHz", "Δ_p_MHz", "n_norm"],
                   "rows": [[float(a), float(b), float(c)] for a, b, c in rows]}
            artifacts[path] = _json(doc)
        else:
            artifacts[path] = _csv(["Δ_C_MHz", "Δ_p_MHz", "n_norm"], rows, _metadata(config, n))
    return artifacts, EXIT_OK


def _oracle(config: RunConfig, out: Path, threads):
    report = verification_battery(build_dipole_table(), config.line)
    doc = {"line_constants": config.line.to_dict(), **report}
    return {out: _json(doc)}, (EXIT_OK if report["passed"] else EXIT_ORACLE)


_HANDLERS = {
    "constants": _constants,
    "coupling": _coupling,
    "eigenmap": _eigenmap,
    "spectrum": _spectrum,
    "oracle": _oracle,
}


def _commit(artifacts: dict[Path, str]) -> None:
    staged = []
    try:
        for path, text in artifacts.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise


def run(config: RunConfig, subcommand: str, out: str | os.PathLike, threads: int | None = None) -> int:
    """Execute one subcommand and write its artifacts; returns the exit status."""
    if subcommand not in _HANDLERS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    artifacts, status = _HANDLERS[subcommand](config, Path(out), threads)
    _commit(artifacts)
    return status


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collective-cqed", description="Multilevel collective cavity-QED spectra.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="YAML or JSON run configuration (defaults if omitted)")
    p.add_argument("--out", required=True, help="output file; multi-N runs append _N<value> to the stem")
    p.add_argument("--threads", type=int, default=None, help="worker threads for grid sweeps")
    p.add_argument("--threshold", action="store_true", help="zero spectrum values below threshold_level")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        config = load_config(args.config)
        if args.threshold:
            config = replace(config, threshold=True)
        return run(config, args.subcommand, args.out, args.threads)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # any model failure is a nonzero exit, never a partial file
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
