"""Deterministic SVG rendering of point sets, disks and coverings.

The SVG is written as plain text with fixed number formatting so that
equal inputs give identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import Metric, PointSet

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
SIZE = 640
MARGIN = 40


def _f(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".") if abs(x) < 1e6 else f"{x:.6g}"


def euclidean_disk(center: complex, r: float, metric: Metric) -> tuple[complex, float]:
    """Euclidean center and radius of a metric disk.

    A pseudo-hyperbolic disk ``ρ(z, a) < r`` is the Euclidean disk with
    center ``a (1 - r^2)/(1 - r^2 |a|^2)`` and radius
    ``r (1 - |a|^2)/(1 - r^2 |a|^2)``.
    """
    if metric is Metric.PLANE:
        return complex(center), float(r)
    r = min(float(r), 1.0 - 1e-15)
    a = complex(center)
    den = 1.0 - r * r * abs(a) ** 2
    return a * (1 - r * r) / den, r * (1 - abs(a) ** 2) / den


def render_svg(out, points: PointSet | None = None, labels=None, disks=(), legend=None,
               title: str = "") -> str:
    """Write an SVG with points colored by ``labels`` and ``disks`` as circles.

    ``disks`` holds ``(center, radius)`` pairs in the metric of ``points``.
    Returns the SVG text.
    """
    metric = points.metric if points is not None else Metric.PLANE
    z = points.points if points is not None else np.empty(0, dtype=complex)
    circles = [euclidean_disk(c, r, metric) for c, r in disks]

    if metric is Metric.DISK:
        x0, x1, y0, y1 = -1.0, 1.0, -1.0, 1.0
    elif len(z):
        ext = [(c.real - r, c.real + r, c.imag - r, c.imag + r) for c, r in circles]
        xs = np.concatenate([z.real] + [[e[0], e[1]] for e in ext])
        ys = np.concatenate([z.imag] + [[e[2], e[3]] for e in ext])
        x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
    else:
        x0, x1, y0, y1 = -1.0, 1.0, -1.0, 1.0
    span = max(x1 - x0, y1 - y0, 1e-9) * 1.1
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    scale = (SIZE - 2 * MARGIN) / span

    def sx(x):
        return MARGIN + (x - cx + span / 2) * scale

    def sy(y):
        return SIZE - MARGIN - (y - cy + span / 2) * scale

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE + 80}" '
        f'viewBox="0 0 {SIZE} {SIZE + 80}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE + 80}" fill="white"/>',
    ]
    if title:
        lines.append(f'<text x="{MARGIN}" y="24" font-family="monospace" font-size="14">{title}</text>')
    # axes through the origin when visible, else along the frame
    ax_y = sy(0.0) if cy - span / 2 <= 0 <= cy + span / 2 else SIZE - MARGIN
    ax_x = sx(0.0) if cx - span / 2 <= 0 <= cx + span / 2 else MARGIN
    lines.append(f'<line x1="{MARGIN}" y1="{_f(ax_y)}" x2="{SIZE - MARGIN}" y2="{_f(ax_y)}" '
                 'stroke="#999" stroke-width="1"/>')
    lines.append(f'<line x1="{_f(ax_x)}" y1="{MARGIN}" x2="{_f(ax_x)}" y2="{SIZE - MARGIN}" '
                 'stroke="#999" stroke-width="1"/>')
    if metric is Metric.DISK:
        lines.append(f'<circle cx="{_f(sx(0))}" cy="{_f(sy(0))}" r="{_f(scale)}" fill="none" '
                     'stroke="#555" stroke-width="1"/>')
    for c, r in circles:
        lines.append(f'<circle cx="{_f(sx(c.real))}" cy="{_f(sy(c.imag))}" r="{_f(max(r * scale, 0.5))}" '
                     'fill="#f4e3b0" fill-opacity="0.5" stroke="#b08d2a" stroke-width="0.8"/>')
    labels = [0] * len(z) if labels is None else list(labels)
    for p, lab in zip(z, labels):
        color = PALETTE[int(lab) % len(PALETTE)] if lab >= 0 else "#000"
        lines.append(f'<circle cx="{_f(sx(p.real))}" cy="{_f(sy(p.imag))}" r="2.5" fill="{color}"/>')
    if legend:
        text = "  ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in legend.items())
        lines.append(f'<text x="{MARGIN}" y="{SIZE + 30}" font-family="monospace" font-size="12">{text}</text>')
    if len(set(labels)) > 1:
        for j in sorted(set(labels)):
            x = MARGIN + 90 * j
            lines.append(f'<circle cx="{x + 5}" cy="{SIZE + 55}" r="4" fill="{PALETTE[j % len(PALETTE)]}"/>')
            lines.append(f'<text x="{x + 14}" y="{SIZE + 59}" font-family="monospace" font-size="12">part {j + 1}</text>')
    lines.append("</svg>")
    svg = "\n".join(lines) + "\n"
    if out is not None:
        Path(out).write_text(svg, encoding="utf-8")
    return svg


def render_covering(cov, out) -> str:
    from .covering import part_labels

    labels = part_labels(cov.parts, len(cov.points)).tolist()
    disks = [(cov.points.points[c], r) for c, r in zip(cov.centers, cov.radii)]
    return render_svg(out, cov.points, labels, disks, cov.constants(), "covering")


def render_separation(s: PointSet, radii, out, legend=None) -> str:
    disks = list(zip(s.points, radii))
    return render_svg(out, s, None, disks, legend, "separation disks")
