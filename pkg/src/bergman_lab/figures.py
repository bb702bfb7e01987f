"""Render figures from the experiment CSV artifacts.

This module reads only the serialized CSV outputs of the command-line
runner — it has no imports from the rest of the package — so the main
suite runs without it and the figures can be regenerated from committed
data alone.

Invoked as a script::

    python3 figures.py --spec figure.json

The spec is a JSON object::

    {
      "kind": "zeros" | "decay" | "profile" | "raster",
      "input": "zeros.csv",
      "output": "zeros.png",
      "overlay": {                      # optional, used by "zeros"
        "corners": [[x, y], ...],
        "segments": [[[x1, y1], [x2, y2]], ...]
      },
      "title": "...",                   # optional
      "dpi": 150                        # optional
    }

Rendering is deterministic at fixed library versions: the Agg backend,
a fixed DPI, axis limits derived from the data bounding box plus a 10%
margin, and no timestamp or version metadata in the PNG.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

KINDS = ("zeros", "decay", "profile", "raster")

EXIT_OK = 0
EXIT_SPEC = 2


class FigureError(Exception):
    pass


@dataclass
class FigureSpec:
    kind: str
    input: str
    output: str
    corners: list = field(default_factory=list)
    segments: list = field(default_factory=list)
    title: str = ""
    dpi: int = 150

    @staticmethod
    def from_json(path: str) -> "FigureSpec":
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise FigureError(f"cannot read spec {path}: {e}")
        if not isinstance(raw, dict):
            raise FigureError("spec root must be a JSON object")
        for key in ("kind", "input", "output"):
            if key not in raw:
                raise FigureError(f"spec is missing required key {key!r}")
        kind = raw["kind"]
        if kind not in KINDS:
            raise FigureError(
                f"unknown figure kind {kind!r}; expected one of {KINDS}")
        overlay = raw.get("overlay", {})
        return FigureSpec(
            kind=kind,
            input=str(raw["input"]),
            output=str(raw["output"]),
            corners=[(float(x), float(y))
                     for (x, y) in overlay.get("corners", [])],
            segments=[((float(x1), float(y1)), (float(x2), float(y2)))
                      for ((x1, y1), (x2, y2))
                      in overlay.get("segments", [])],
            title=str(raw.get("title", "")),
            dpi=int(raw.get("dpi", 150)),
        )


def read_columns(path: str, columns: list[str]) -> dict[str, list[str]]:
    """Read the named columns from a CSV file, failing on absent names."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            header = reader.fieldnames or []
            for col in columns:
                if col not in header:
                    raise FigureError(
                        f"missing column {col!r} in {path} "
                        f"(found: {', '.join(header)})")
            out: dict[str, list[str]] = {c: [] for c in columns}
            for row in reader:
                for c in columns:
                    out[c].append(row[c])
    except OSError as e:
        raise FigureError(f"cannot read {path}: {e}")
    return out


def _limits(xs, ys):
    """Data bounding box expanded by a 10% margin on each side."""
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    mx = 0.1 * (x1 - x0) or 0.1
    my = 0.1 * (y1 - y0) or 0.1
    return (x0 - mx, x1 + mx), (y0 - my, y1 + my)


def _new_axes(title):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if title:
        ax.set_title(title)
    return fig, ax


def render_zeros(spec: FigureSpec):
    """Scatter of polynomial zeros with curve/segment overlays."""
    cols = read_columns(spec.input, ["n", "re", "im"])
    xs = [float(v) for v in cols["re"]]
    ys = [float(v) for v in cols["im"]]
    ns = [int(v) for v in cols["n"]]
    fig, ax = _new_axes(spec.title)
    for (a, b) in spec.segments:
        ax.plot([a[0], b[0]], [a[1], b[1]], color="0.6",
                linewidth=1.2, zorder=1)
    if spec.corners:
        cx, cy = zip(*spec.corners)
        ax.plot(cx, cy, linestyle="none", marker="s", markersize=5,
                color="black", zorder=2)
    scat = ax.scatter(xs, ys, c=ns, s=12, cmap="viridis", zorder=3)
    fig.colorbar(scat, ax=ax, label="degree n")
    all_x = xs + [p[0] for p in spec.corners] \
        + [q[0] for seg in spec.segments for q in seg]
    all_y = ys + [p[1] for p in spec.corners] \
        + [q[1] for seg in spec.segments for q in seg]
    (xlo, xhi), (ylo, yhi) = _limits(all_x, all_y)
    ax.set_xlim(xlo, xhi)
    ax.set_ylim(ylo, yhi)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    return fig


def render_decay(spec: FigureSpec):
    """Log-scale decay curves of n |A_n| / log n, one per sample point."""
    cols = read_columns(spec.input,
                        ["n", "re_z", "im_z", "regime", "abs_A_n"])
    groups: dict[tuple, list[tuple[int, float]]] = {}
    for n_s, re_s, im_s, reg, a_s in zip(
            cols["n"], cols["re_z"], cols["im_z"],
            cols["regime"], cols["abs_A_n"]):
        n = int(n_s)
        if n < 2:
            continue  # log n vanishes at n = 1
        key = (re_s, im_s, reg)
        groups.setdefault(key, []).append(
            (n, n * float(a_s) / math.log(n)))
    fig, ax = _new_axes(spec.title)
    for (re_s, im_s, reg) in sorted(groups):
        pts = sorted(groups[(re_s, im_s, reg)])
        ns = [p[0] for p in pts]
        vals = [max(p[1], 1e-300) for p in pts]
        label = f"z = {float(re_s):.3g} + {float(im_s):.3g}i ({reg})"
        ax.semilogy(ns, vals, marker="o", markersize=4, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel(r"n |A_n| / log n")
    ax.legend(fontsize=8)
    return fig


def render_profile(spec: FigureSpec):
    """n-th root profiles |p_n(z)|^(1/n) against the limit level r(z)."""
    cols = read_columns(spec.input, ["n", "nth_root", "r_z"])
    groups: dict[str, list[tuple[int, float]]] = {}
    for n_s, v_s, r_s in zip(cols["n"], cols["nth_root"], cols["r_z"]):
        groups.setdefault(r_s, []).append((int(n_s), float(v_s)))
    fig, ax = _new_axes(spec.title)
    for i, r_s in enumerate(sorted(groups)):
        pts = sorted(groups[r_s])
        ns = [p[0] for p in pts]
        vals = [p[1] for p in pts]
        color = f"C{i}"
        ax.plot(ns, vals, marker="o", markersize=4, color=color,
                label=f"r(z) = {float(r_s):.6g}")
        ax.axhline(float(r_s), color=color, linestyle="--", linewidth=1)
    ax.set_xlabel("n")
    ax.set_ylabel(r"|p_n(z)|^(1/n)")
    ax.legend(fontsize=8)
    return fig


def render_raster(spec: FigureSpec):
    """Two-color membership image of the analytic-continuation region."""
    cols = read_columns(spec.input, ["x", "y", "in_omega_star"])
    xs = [float(v) for v in cols["x"]]
    ys = [float(v) for v in cols["y"]]
    member = [v.strip() == "True" for v in cols["in_omega_star"]]
    ux = sorted(set(xs))
    uy = sorted(set(ys))
    xi = {v: i for i, v in enumerate(ux)}
    yi = {v: i for i, v in enumerate(uy)}
    grid = [[0] * len(ux) for _ in uy]
    for x, y, m in zip(xs, ys, member):
        grid[yi[y]][xi[x]] = 1 if m else 0
    fig, ax = _new_axes(spec.title)
    cmap = ListedColormap(["#f2f2f2", "#4878a8"])
    ax.imshow(grid, origin="lower", cmap=cmap, vmin=0, vmax=1,
              extent=(min(ux), max(ux), min(uy), max(uy)),
              interpolation="nearest")
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    return fig


_RENDERERS = {
    "zeros": render_zeros,
    "decay": render_decay,
    "profile": render_profile,
    "raster": render_raster,
}


def render(spec: FigureSpec) -> str:
    """Render the figure described by the spec; returns the output path."""
    fig = _RENDERERS[spec.kind](spec)
    fig.savefig(spec.output, dpi=spec.dpi, format="png",
                metadata={"Software": None})
    plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render a figure from experiment CSV artifacts.")
    parser.add_argument("--spec", required=True,
                        help="JSON figure spec (see module docstring)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec.from_json(args.spec)
        render(spec)
    except FigureError as e:
        print(f"figures: {e}", file=sys.stderr)
        return EXIT_SPEC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
