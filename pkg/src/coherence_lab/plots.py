"""Decorative SVG plots for emitted data files.

matplotlib is an optional dependency; install the ``plots`` extra.  The
SVG date metadata is pinned so plot files do not break byte-identical
reruns.
"""

from __future__ import annotations

from pathlib import Path

from .data import CurveData

_MPL_HINT = "plotting needs matplotlib; install the package with the [plots] extra"


def _pyplot():
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError(_MPL_HINT) from exc
    return plt


def plot_curve(curve: CurveData, path: str | Path, title: str = "") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    if curve.y_err.any():
        ax.errorbar(curve.x, curve.y, yerr=curve.y_err, fmt="o", ms=3, lw=1, capsize=2)
    else:
        ax.plot(curve.x, curve.y, "o-", ms=3, lw=1)
    ax.set_xlabel(curve.x_label)
    ax.set_ylabel(curve.y_label)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_report_curves(out_dir: str | Path) -> list[Path]:
    """Render an SVG next to every CSV artifact in the directory."""
    out = Path(out_dir)
    written = []
    for csv_path in sorted(out.glob("*.csv")):
        curve = CurveData.from_csv(csv_path)
        svg_path = csv_path.with_suffix(".svg")
        plot_curve(curve, svg_path, title=csv_path.stem.replace("_", " "))
        written.append(svg_path)
    return written
