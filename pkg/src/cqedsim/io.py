"""Self-describing CSV artifacts and deterministic SVG plots.

Every CSV starts with ``#``-prefixed metadata lines (flattened key =
value) followed by a header row; a ``.meta`` sidecar carries the full
resolved configuration for reproducibility.  SVG output is pinned
(fixed size, no timestamps, fixed hash salt) so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import yaml

__all__ = ["write_csv", "read_csv", "write_meta", "read_meta", "emit_plot"]

_FLOAT_FMT = "%.12g"


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def write_csv(path, columns: dict, metadata: dict | None = None) -> None:
    """Write named columns with a '#'-prefixed metadata header block."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n = arrays[0].shape[0]
    if any(a.shape[0] != n for a in arrays):
        raise ValueError("all columns must have the same length")
    with path.open("w", newline="") as fh:
        for k, v in _flatten(metadata or {}).items():
            fh.write(f"# {k} = {v}\n")
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(n):
            w.writerow(
                [
                    _FLOAT_FMT % a[i] if np.issubdtype(a.dtype, np.floating) else a[i]
                    for a in arrays
                ]
            )


def read_csv(path) -> tuple[dict, dict]:
    """Read a CSV written by write_csv; returns (columns, metadata)."""
    path = Path(path)
    meta = {}
    rows = []
    header = None
    with path.open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if not line:
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
            else:
                rows.append(cells)
    if header is None:
        raise ValueError(f"{path}: empty CSV")
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return cols, meta


def write_meta(path, config: dict) -> None:
    """Write the fully resolved configuration as a YAML sidecar."""
    Path(path).write_text(yaml.safe_dump(config, sort_keys=True))


def read_meta(path) -> dict:
    return yaml.safe_load(Path(path).read_text())


PLOT_KINDS = ("heatmap", "trace", "iq", "rb")


def emit_plot(csv_path, kind: str, out_path=None) -> Path:
    """Render a CSV artifact to a deterministic SVG file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "cqedsim"

    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}")
    csv_path = Path(csv_path)
    cols, meta = read_csv(csv_path)
    if not cols or next(iter(cols.values())).size == 0:
        raise ValueError(f"{csv_path}: no data to plot")
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".svg")

    fig, ax = plt.subplots(figsize=(6, 4.5))
    try:
        if kind == "heatmap":
            _plot_heatmap(ax, fig, cols)
        elif kind == "trace":
            _require(cols, ("x", "p_e"))
            ax.plot(cols["x"] * 1e6, cols["p_e"], ".-")
            ax.set_xlabel("delay or duration (us)")
            ax.set_ylabel("P_e")
        elif kind == "iq":
            _require(cols, ("i", "q", "prep"))
            for label, color in (("state0", "tab:blue"), ("state1", "tab:red")):
                sel = cols["prep"] == label
                ax.plot(cols["i"][sel], cols["q"][sel], ".", ms=2, color=color, label=label)
            ax.set_xlabel("I")
            ax.set_ylabel("Q")
            ax.legend()
        elif kind == "rb":
            _require(cols, ("depth", "mean_fidelity"))
            ax.plot(cols["depth"], cols["mean_fidelity"], "o-")
            ax.set_xscale("log")
            ax.set_xlabel("Clifford depth")
            ax.set_ylabel("sequence fidelity")
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return out_path


def _require(cols: dict, names) -> None:
    missing = [n for n in names if n not in cols]
    if missing:
        raise ValueError(f"CSV columns do not match plot kind: missing {missing}")


def _plot_heatmap(ax, fig, cols: dict) -> None:
    keys = list(cols)
    if len(keys) < 3:
        raise ValueError("heatmap needs two axis columns and a value column")
    x, y = cols[keys[0]], cols[keys[1]]
    val_key = next((k for k in keys[2:] if k in ("mag2", "phase")), keys[2])
    v = cols[val_key]
    xu, yu = np.unique(x), np.unique(y)
    grid = np.full((yu.size, xu.size), np.nan)
    xi = np.searchsorted(xu, x)
    yi = np.searchsorted(yu, y)
    grid[yi, xi] = v
    im = ax.pcolormesh(xu, yu, grid, shading="nearest")
    fig.colorbar(im, ax=ax, label=val_key)
    ax.set_xlabel(keys[0])
    ax.set_ylabel(keys[1])
