"""Figure rendering for the three experiment kinds.

Colors follow the source plots this tool reproduces: green sample dots,
orange concave maximum-entropy curve, red initial-state circle, dashed
blue free-energy line.  Rendering is deterministic: the same CSV and
style render to byte-identical images.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ergoplot"  # deterministic SVG element ids

import matplotlib.pyplot as plt

from .reader import DataFileError, ExperimentData, load


class FigureKind(str, enum.Enum):
    DIAGRAM = "diagram"
    SWEEP = "sweep"
    SCATTER = "scatter"


_KIND_BY_EXPERIMENT = {
    "energy_entropy_diagram": FigureKind.DIAGRAM,
    "beta_sweep": FigureKind.SWEEP,
    "entropy_gain_scatter": FigureKind.SCATTER,
}

DEFAULT_COLORS = {
    "initial": "red",
    "unital_sample": "forestgreen",
    "feedback_sample": "teal",
    "gibbs_curve": "darkorange",
    "gibbs_endpoint": "darkorange",
    "degenerate_border": "darkorange",
    "max_entropy_boundary": "darkorange",
    "max_entropy_boundary_endpoint": "darkorange",
    "ergotropy_line": "black",
    "charging_line": "black",
    "initial_entropy": "gray",
    "zero_entropy_gain": "gray",
    "free_energy_gain": "royalblue",
    "unital_lower": "black",
    "unital_upper": "black",
    "nonunital_lower": "crimson",
    "nonunital_upper": "crimson",
}


@dataclass
class FigureSpec:
    """What to render: input CSV, figure kind, output image, style knobs."""

    input_csv: str
    output_image: str
    figure_kind: FigureKind | None = None  # None: derive from the CSV metadata
    colors: dict = field(default_factory=dict)
    dpi: int = 150
    marker_size: float = 4.0


@dataclass(frozen=True)
class RenderResult:
    output_image: str
    figure_kind: FigureKind
    series_drawn: tuple


def _resolve_kind(spec: FigureSpec, data: ExperimentData) -> FigureKind:
    from_metadata = _KIND_BY_EXPERIMENT.get(data.kind)
    if from_metadata is None:
        raise DataFileError(f"unknown experiment kind {data.kind!r} in metadata")
    if spec.figure_kind is not None and spec.figure_kind is not from_metadata:
        raise DataFileError(
            f"figure kind {spec.figure_kind.value!r} does not match the file's experiment "
            f"kind {data.kind!r} (which renders as {from_metadata.value!r})"
        )
    return from_metadata


class _Canvas:
    """Tracks which series actually got drawn."""

    def __init__(self, ax, colors, marker_size):
        self.ax = ax
        self.colors = colors
        self.marker_size = marker_size
        self.drawn = []

    def color(self, series):
        return self.colors.get(series, "gray")

    def mark(self, series):
        if series not in self.drawn:
            self.drawn.append(series)

    def dots(self, data, series, zorder=2):
        rows = data.series(series)
        if not rows:
            return
        xs = [r.x for r in rows]
        ys = [r.y for r in rows]
        self.ax.scatter(xs, ys, s=self.marker_size, color=self.color(series), linewidths=0, zorder=zorder)
        self.mark(series)

    def curve(self, data, series, style="-", zorder=3):
        rows = data.series(series)
        if not rows:
            return
        xs = [r.x for r in rows]
        ys = [r.y for r in rows]
        self.ax.plot(xs, ys, style, color=self.color(series), zorder=zorder)
        self.mark(series)

    def vline(self, data, series, style=":", zorder=4):
        rows = data.series(series)
        if not rows:
            return
        for r in rows:
            self.ax.axvline(r.x, linestyle=style, color=self.color(series), linewidth=1.2, zorder=zorder)
        self.mark(series)

    def hline(self, data, series, style=":", zorder=4):
        rows = data.series(series)
        if not rows:
            return
        for r in rows:
            self.ax.axhline(r.y, linestyle=style, color=self.color(series), linewidth=1.2, zorder=zorder)
        self.mark(series)

    def markers(self, data, series, zorder=4):
        rows = data.series(series)
        if not rows:
            return
        xs = [r.x for r in rows]
        ys = [r.y for r in rows]
        self.ax.plot(xs, ys, "o", color=self.color(series), markersize=4, zorder=zorder)
        self.mark(series)


def _render_diagram(canvas: _Canvas, data: ExperimentData) -> None:
    canvas.dots(data, "unital_sample")
    canvas.dots(data, "feedback_sample")
    canvas.curve(data, "gibbs_curve")
    canvas.markers(data, "gibbs_endpoint")
    # the degenerate border is a vertical segment, drawn dashed to keep it
    # visually distinct from the boundary curve
    border = data.series("degenerate_border")
    for edge in ("low_energy", "high_energy"):
        seg = [r for r in border if r.extra == edge]
        if seg:
            canvas.ax.plot([r.x for r in seg], [r.y for r in seg], "--", color=canvas.color("degenerate_border"))
            canvas.mark("degenerate_border")
    canvas.vline(data, "ergotropy_line")
    canvas.vline(data, "charging_line")
    canvas.hline(data, "initial_entropy")
    initial = data.series("initial")
    if initial:
        canvas.ax.plot([initial[0].x], [initial[0].y], "o", color=canvas.color("initial"), markersize=7, zorder=5)
        canvas.mark("initial")
    canvas.ax.set_xlabel(r"$E$  ($\epsilon$)")
    canvas.ax.set_ylabel(r"$S$  (nats)")


def _render_sweep(canvas: _Canvas, data: ExperimentData) -> None:
    canvas.dots(data, "unital_sample")
    canvas.dots(data, "feedback_sample")
    canvas.curve(data, "free_energy_gain", style="--")
    canvas.curve(data, "unital_lower", style=":")
    canvas.curve(data, "unital_upper", style=":")
    canvas.curve(data, "nonunital_lower", style="-")
    canvas.curve(data, "nonunital_upper", style="-")
    canvas.ax.set_xscale("log")
    canvas.ax.set_xlabel(r"$\beta$  ($1/\epsilon$)")
    canvas.ax.set_ylabel(r"$\Delta E$  ($\epsilon$)")


def _render_scatter(canvas: _Canvas, data: ExperimentData) -> None:
    canvas.dots(data, "unital_sample")
    canvas.dots(data, "feedback_sample")
    canvas.curve(data, "max_entropy_boundary")
    canvas.markers(data, "max_entropy_boundary_endpoint")
    canvas.vline(data, "unital_lower")
    canvas.vline(data, "unital_upper")
    canvas.vline(data, "free_energy_gain", style="--")
    canvas.hline(data, "zero_entropy_gain")
    canvas.ax.set_xlabel(r"$\Delta E$  ($\epsilon$)")
    canvas.ax.set_ylabel(r"$\Delta S$  (nats)")


_RENDERERS = {
    FigureKind.DIAGRAM: _render_diagram,
    FigureKind.SWEEP: _render_sweep,
    FigureKind.SCATTER: _render_scatter,
}


def _stable_metadata(path: str) -> dict:
    # strip the writer fields that would embed a timestamp and break
    # byte-identical re-renders
    if path.endswith(".svg"):
        return {"Date": None, "Creator": "ergoplot"}
    if path.endswith(".pdf"):
        return {"CreationDate": None, "Creator": "ergoplot"}
    return {"Software": "ergoplot"}


def render(spec: FigureSpec) -> RenderResult:
    """Render one CSV to one image; returns which series were drawn.

    Raises DataFileError on kind mismatch or malformed input; the input
    file is only ever read.
    """
    data = load(spec.input_csv)
    kind = _resolve_kind(spec, data)
    colors = {**DEFAULT_COLORS, **spec.colors}
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    try:
        canvas = _Canvas(ax, colors, spec.marker_size)
        _RENDERERS[kind](canvas, data)
        ax.set_title(data.kind.replace("_", " "))
        fig.tight_layout()
        fig.savefig(spec.output_image, dpi=spec.dpi, metadata=_stable_metadata(spec.output_image))
    finally:
        plt.close(fig)
    return RenderResult(output_image=spec.output_image, figure_kind=kind, series_drawn=tuple(canvas.drawn))
