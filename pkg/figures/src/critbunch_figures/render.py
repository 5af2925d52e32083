"""Batch renderers for the three standard panels.

Each figure is a pure function of its input CSV files: fixed size, fixed dpi,
no timestamps, so re-rendering identical inputs with identical tool versions
reproduces the image byte for byte.  Flagged g2 samples arrive as NaN and
simply break the curve; nothing is interpolated across them.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .io import Series, SeriesError, read_series

_DPI = 150
_TIME_LABEL = "t  (units of 1/B)"

# line styles keyed by the coupling they usually show, with a neutral fallback
_STYLES = {1.0: ("tab:blue", "--"), 0.1: ("tab:red", "-"), 2.0: ("tab:green", ":")}


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: inputs, layout, labels and reference lines.

    ``require`` lists cfg keys every input must carry with exactly that value
    (on top of the always-on hash integrity check performed by the reader).
    ``ref_lines`` maps panel index -> horizontal reference value.
    """

    inputs: tuple
    layout: tuple
    y_column: str
    y_label: str
    panel_titles: tuple = ()
    require: dict = field(default_factory=dict)
    ref_lines: dict = field(default_factory=dict)
    x_column: str = "t"
    x_label: str = _TIME_LABEL
    single_panel_legend: bool = False


def _load_checked(spec: FigureSpec) -> list[Series]:
    series = []
    for path in spec.inputs:
        s = read_series(path)
        for key, want in spec.require.items():
            got = s.cfg.get(key)
            if got != want:
                raise SeriesError(
                    f"{path}: cfg {key} = {got!r} does not match the figure spec ({want!r})"
                )
        # touch the needed columns so absences are reported by name up front
        s.column(spec.x_column)
        s.column(spec.y_column)
        series.append(s)
    return series


def build_figure(spec: FigureSpec) -> Figure:
    series = _load_checked(spec)
    rows, cols = spec.layout
    n_panels = rows * cols
    fig = Figure(figsize=(4.0 * cols, 2.8 * rows), dpi=_DPI)
    FigureCanvasAgg(fig)
    axes = fig.subplots(rows, cols, squeeze=False).ravel()

    if n_panels == 1:
        ax = axes[0]
        for s in series:
            lam = float(s.cfg.get("lambda", "nan"))
            color, style = _STYLES.get(lam, ("black", "-"))
            ax.plot(s.column(spec.x_column), s.column(spec.y_column),
                    style, color=color, linewidth=1.2,
                    label=rf"$\lambda = {lam:g}$")
        if spec.single_panel_legend:
            ax.legend(frameon=False)
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
    else:
        if len(series) != n_panels:
            raise SeriesError(
                f"figure wants {n_panels} panels but got {len(series)} input files"
            )
        for i, (ax, s) in enumerate(zip(axes, series)):
            ax.plot(s.column(spec.x_column), s.column(spec.y_column),
                    "-", color="tab:blue", linewidth=0.9)
            title = spec.panel_titles[i] if i < len(spec.panel_titles) else ""
            ax.set_title(title, fontsize=9, loc="left")
            ax.set_xlabel(spec.x_label)
            ax.set_ylabel(spec.y_label)
            if i in spec.ref_lines:
                ax.axhline(spec.ref_lines[i], color="red", linewidth=1.0)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec, out: str | Path) -> Path:
    fig = build_figure(spec)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=_DPI)
    return out


# --- the three standard figures -------------------------------------------------


def fig2_spec(csvs) -> FigureSpec:
    return FigureSpec(
        inputs=tuple(csvs),
        layout=(1, 1),
        y_column="r2",
        y_label=r"$|r^{(1,0)}_{(0,1)}(t)|^2$",
        require={"command": "rscan"},
        single_panel_legend=True,
    )


def _g2_titles(series_paths) -> tuple:
    titles = []
    for i, path in enumerate(series_paths):
        s = read_series(path)
        lam = float(s.cfg.get("lambda", "nan"))
        n = s.cfg.get("n", "?")
        state = s.cfg.get("state", "?")
        titles.append(f"({chr(97 + i)})  N={n}, $\\lambda$={lam:g}, {state}")
    return tuple(titles)


def fig3_spec(csvs) -> FigureSpec:
    return FigureSpec(
        inputs=tuple(csvs),
        layout=(3, 1),
        y_column="g2",
        y_label=r"$g^{(2)}(t)$",
        panel_titles=_g2_titles(csvs),
        require={"command": "g2scan"},
    )


def fig4_spec(csvs) -> FigureSpec:
    # panel (d) carries the horizontal reference at the initial value 1
    return FigureSpec(
        inputs=tuple(csvs),
        layout=(2, 2),
        y_column="g2",
        y_label=r"$g^{(2)}(t)$",
        panel_titles=_g2_titles(csvs),
        require={"command": "g2scan"},
        ref_lines={3: 1.0},
    )


def _script(spec_builder, n_inputs: int, default_out: str):
    def run(argv=None) -> int:
        parser = argparse.ArgumentParser()
        parser.add_argument("csvs", nargs="+", help="series files, panel order")
        parser.add_argument("-o", "--out", default=default_out)
        args = parser.parse_args(argv)
        if n_inputs and len(args.csvs) != n_inputs:
            print(f"error: expected {n_inputs} input files, got {len(args.csvs)}",
                  file=sys.stderr)
            return 1
        try:
            path = render(spec_builder(args.csvs), args.out)
        except (SeriesError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(path)
        return 0

    return run


main_fig2 = _script(fig2_spec, 0, "fig2.png")
main_fig3 = _script(fig3_spec, 3, "fig3.png")
main_fig4 = _script(fig4_spec, 4, "fig4.png")
