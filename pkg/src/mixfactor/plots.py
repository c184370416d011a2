"""Static SVG component maps.

Every plotted point is a ``<circle>`` carrying its data coordinates in
``data-x``/``data-y`` (shortest round-trip decimals) and its label in
``data-label``, so tests can compare plots structurally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import DimensionError

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
SIZE = 520
MARGIN = 60


@dataclass
class Scatter:
    title: str
    xlabel: str
    ylabel: str
    points: list = field(default_factory=list)  # (x, y, label, group, cls)
    segments: list = field(default_factory=list)  # (x0, y0, x1, y1, cls)
    unit_circle: bool = False
    arrows: bool = False
    labels: bool = True
    bounds: tuple | None = None

    def add(self, x, y, label="", group=None, cls="point"):
        self.points.append((float(x), float(y), str(label), group, cls))

    def segment(self, x0, y0, x1, y1, cls="link"):
        self.segments.append((float(x0), float(y0), float(x1), float(y1), cls))

    def _limits(self):
        if self.bounds is not None:
            return self.bounds
        xs = [p[0] for p in self.points] + [s[i] for s in self.segments for i in (0, 2)] + [0.0]
        ys = [p[1] for p in self.points] + [s[i] for s in self.segments for i in (1, 3)] + [0.0]
        if self.unit_circle:
            xs += [-1.0, 1.0]
            ys += [-1.0, 1.0]
        lo_x, hi_x = min(xs), max(xs)
        lo_y, hi_y = min(ys), max(ys)
        pad_x = 0.08 * (hi_x - lo_x or 1.0)
        pad_y = 0.08 * (hi_y - lo_y or 1.0)
        return lo_x - pad_x, hi_x + pad_x, lo_y - pad_y, hi_y + pad_y

    def to_svg(self) -> str:
        x0, x1, y0, y1 = self._limits()
        span = SIZE - 2 * MARGIN

        def px(x):
            return MARGIN + (x - x0) / (x1 - x0) * span

        def py(y):
            return SIZE - MARGIN - (y - y0) / (y1 - y0) * span

        def num(v):
            return f"{v:.3f}"

        groups = list(dict.fromkeys(p[3] for p in self.points if p[3] is not None))
        color = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(groups)}
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">',
            f"<title>{escape(self.title)}</title>",
            f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
            f'<text x="{SIZE / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="14">'
            f"{escape(self.title)}</text>",
            f'<text x="{SIZE / 2}" y="{SIZE - 15}" text-anchor="middle">{escape(self.xlabel)}</text>',
            f'<text x="15" y="{SIZE / 2}" text-anchor="middle" '
            f'transform="rotate(-90 15 {SIZE / 2})">{escape(self.ylabel)}</text>',
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="#444"/>',
        ]
        if x0 <= 0 <= x1:
            out.append(
                f'<line class="axis" x1="{num(px(0))}" y1="{MARGIN}" x2="{num(px(0))}" '
                f'y2="{SIZE - MARGIN}" stroke="#aaa" stroke-dasharray="4 3"/>'
            )
        if y0 <= 0 <= y1:
            out.append(
                f'<line class="axis" x1="{MARGIN}" y1="{num(py(0))}" x2="{SIZE - MARGIN}" '
                f'y2="{num(py(0))}" stroke="#aaa" stroke-dasharray="4 3"/>'
            )
        if self.unit_circle:
            rx = px(1) - px(0)
            ry = py(0) - py(1)
            out.append(
                f'<ellipse class="unit-circle" cx="{num(px(0))}" cy="{num(py(0))}" '
                f'rx="{num(rx)}" ry="{num(ry)}" fill="none" stroke="#444"/>'
            )
        for sx0, sy0, sx1, sy1, cls in self.segments:
            out.append(
                f'<line class="{cls}" x1="{num(px(sx0))}" y1="{num(py(sy0))}" '
                f'x2="{num(px(sx1))}" y2="{num(py(sy1))}" stroke="#888"/>'
            )
        for x, y, label, group, cls in self.points:
            fill = color.get(group, "#1f77b4")
            if self.arrows:
                out.append(
                    f'<line class="arrow" x1="{num(px(0))}" y1="{num(py(0))}" '
                    f'x2="{num(px(x))}" y2="{num(py(y))}" stroke="{fill}"/>'
                )
            attrs = f'class="{cls}" data-x="{x!r}" data-y="{y!r}" data-label={quoteattr(label)}'
            if group is not None:
                attrs += f" data-group={quoteattr(str(group))}"
            out.append(
                f'<circle {attrs} cx="{num(px(x))}" cy="{num(py(y))}" r="3" fill="{fill}"/>'
            )
            if self.labels and label:
                out.append(
                    f'<text x="{num(px(x) + 4)}" y="{num(py(y) - 4)}">{escape(label)}</text>'
                )
        for i, g in enumerate(groups):
            y = MARGIN + 14 + 14 * i
            out.append(
                f'<circle class="legend" cx="{SIZE - MARGIN - 90}" cy="{y - 4}" r="4" fill="{color[g]}"/>'
                f'<text x="{SIZE - MARGIN - 82}" y="{y}">{escape(str(g))}</text>'
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_svg(), encoding="utf-8")
        return path


def _check_axes(axes, ndim):
    i, j = axes
    if not (1 <= i <= ndim and 1 <= j <= ndim) or i == j:
        raise DimensionError(f"axes {i},{j} out of range for {ndim} components")
    return i - 1, j - 1


def _dim(i):
    return f"Dim {i + 1}"


def observation_map(F, row_ids, axes, title="Observations", color=None):
    i, j = axes
    s = Scatter(title, _dim(i), _dim(j), labels=len(row_ids) <= 60)
    for r, rid in enumerate(row_ids):
        s.add(F[r, i], F[r, j], rid, None if color is None else color[r])
    return s


def level_map(A_levels, names, axes, title="Levels"):
    i, j = axes
    s = Scatter(title, _dim(i), _dim(j))
    for r, name in enumerate(names):
        s.add(A_levels[r, i], A_levels[r, j], name)
    return s


def correlation_circle_plot(A_num, names, axes, title="Numerical variables", groups=None):
    i, j = axes
    s = Scatter(title, _dim(i), _dim(j), unit_circle=True, arrows=True)
    s.bounds = (-1.1, 1.1, -1.1, 1.1)
    for r, name in enumerate(names):
        s.add(A_num[r, i], A_num[r, j], name, None if groups is None else groups[r])
    return s


def sqload_map(sqload, names, kinds, axes, title="Squared loadings"):
    i, j = axes
    s = Scatter(title, _dim(i), _dim(j), arrows=True)
    for r, name in enumerate(names):
        s.add(sqload[r, i], sqload[r, j], name, kinds[r])
    return s


def plot_factor_model(out_dir, F, A_star, sqload, prep, axes=(1, 2), color_by=None, prefix=""):
    """Observation map, level map, correlation circle and squared-loadings map."""
    out_dir = Path(out_dir)
    ax = _check_axes(axes, F.shape[1])
    tag = "after rotation" if prefix else ""
    color = None
    if color_by is not None:
        if color_by not in prep.categorical_names:
            raise DimensionError(f"cannot color by {color_by}: not a categorical variable")
        j = prep.categorical_names.index(color_by)
        start = sum(len(prep.levels[c]) for c in prep.categorical_names[:j])
        levs = prep.levels[color_by]
        block = prep.Z[:, prep.p1 + start : prep.p1 + start + len(levs)]
        color = [levs[k] for k in np.argmax(block, axis=1)]
    paths = [
        observation_map(F, prep.row_ids, ax, f"Observations {tag}".strip(), color).write(
            out_dir / f"{prefix}ind.svg"
        )
    ]
    if prep.m:
        paths.append(
            level_map(A_star[prep.p1 :], prep.level_names, ax, f"Levels {tag}".strip()).write(
                out_dir / f"{prefix}levels.svg"
            )
        )
    if prep.p1:
        paths.append(
            correlation_circle_plot(
                A_star[: prep.p1], prep.numeric_names, ax, f"Numerical variables {tag}".strip()
            ).write(out_dir / f"{prefix}cor.svg")
        )
    paths.append(
        sqload_map(sqload, prep.variables, prep.kinds, ax, f"Squared loadings {tag}".strip()).write(
            out_dir / f"{prefix}sqload.svg"
        )
    )
    return paths


def plot_mfamix(out_dir, model, partial_obs, group_contrib, axes_corr, axes=(1, 2), partial_ids=None):
    """Partial axes, group contributions and partial-observation star plots."""
    out_dir = Path(out_dir)
    ax = _check_axes(axes, model.ndim)
    i, j = ax
    prep = model.prep
    gnames = model.groups.names
    paths = []

    var_groups = [gnames[g] for g in model.groups.var_group]
    num_groups = [var_groups[prep.variables.index(v)] for v in prep.numeric_names]
    if prep.p1:
        paths.append(
            correlation_circle_plot(
                model.A_star[: prep.p1], prep.numeric_names, ax, "Correlation circle", num_groups
            ).write(out_dir / "cor.svg")
        )

    s = Scatter("Partial axes", _dim(i), _dim(j), unit_circle=True, arrows=True)
    s.bounds = (-1.1, 1.1, -1.1, 1.1)
    for g, corr in enumerate(axes_corr):
        for d in range(corr.shape[0]):
            s.add(corr[d, i], corr[d, j], f"{gnames[g]} dim{d + 1}", gnames[g])
    paths.append(s.write(out_dir / "axes.svg"))

    s = Scatter("Groups", _dim(i), _dim(j))
    for g, name in enumerate(gnames):
        s.add(group_contrib[g, i], group_contrib[g, j], name, name)
    paths.append(s.write(out_dir / "groups.svg"))

    ids = list(prep.row_ids)
    if partial_ids is None:
        norms = model.F[:, i] ** 2 + model.F[:, j] ** 2
        partial_ids = [ids[int(np.argmax(norms))]]
    s = Scatter("Partial observations", _dim(i), _dim(j), labels=False)
    for r in range(model.F.shape[0]):
        s.add(model.F[r, i], model.F[r, j], ids[r], None, "point")
    for rid in partial_ids:
        if rid not in ids:
            raise DimensionError(f"unknown observation {rid} for the partial plot")
        r = ids.index(rid)
        cx, cy = model.F[r, i], model.F[r, j]
        s.add(cx, cy, rid, None, "center")
        for g, name in enumerate(gnames):
            x, y = partial_obs[g, r, i], partial_obs[g, r, j]
            s.segment(cx, cy, x, y, "star")
            s.add(x, y, f"{rid} {name}", name, "partial")
    paths.append(s.write(out_dir / "partial.svg"))
    return paths
