"""Self-contained SVG phase portraits."""

from __future__ import annotations

import numpy as np

from cyclelab.integrate import Trajectory
from cyclelab.models import INDEX, interior_fixed_point_closed_form

WIDTH, HEIGHT = 640, 560
MARGIN = 60
N_SEGMENTS = 20


def _f(x: float) -> str:
    return f"{x:.2f}"


def _gray(frac: float) -> str:
    # light (0) -> dark (1)
    level = int(round(210 - 190 * frac))
    return f"rgb({level},{level},{level})"


def _bounds(values: np.ndarray) -> tuple[float, float]:
    lo, hi = float(values.min()), float(values.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return max(0.0, lo - pad) if lo >= 0 else lo - pad, hi + pad


def render_svg(
    traj: Trajectory,
    plane: tuple[str, str],
    arrows: bool = True,
    arrow_density: int = 15,
) -> str:
    """Phase portrait of ``traj`` projected on ``plane``.

    The orbit appears once as a continuous ``<path>`` and again as
    ``N_SEGMENTS`` time-graded polylines (light gray early, dark gray late).
    Field arrows are magnitude-normalized and sized to 0.8 of a grid cell;
    for 3-D models the third variable is frozen at its fixed-point value
    (or the orbit mean when there is no interior fixed point).
    """
    model = traj.model
    for v in plane:
        if v not in model.mask:
            raise ValueError(f"variable {v!r} is not active in model {model.kind.value!r}")
    ia, ib = INDEX[plane[0]], INDEX[plane[1]]
    a, b = traj.states[:, ia], traj.states[:, ib]
    fp = interior_fixed_point_closed_form(model)

    xs = np.append(a, fp[plane[0]]) if fp is not None else a
    ys = np.append(b, fp[plane[1]]) if fp is not None else b
    x_lo, x_hi = _bounds(xs)
    y_lo, y_hi = _bounds(ys)
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
    sx, sy = plot_w / (x_hi - x_lo), plot_h / (y_hi - y_lo)

    def px(u):
        return MARGIN + (u - x_lo) * sx

    def py(v):
        return HEIGHT - MARGIN - (v - y_lo) * sy

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        "<defs>",
        '<marker id="arrowhead" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto">'
        '<polygon points="0,0 6,3 0,6" fill="#1f5fbf"/></marker>',
        "</defs>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}"/>'
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}"/></g>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{plane[0]}</text>',
        f'<text x="18" y="{HEIGHT / 2}" text-anchor="middle" font-family="sans-serif" font-size="16">{plane[1]}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11">{x_lo:.3g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11">{x_hi:.3g}</text>',
        f'<text x="{MARGIN - 8}" y="{HEIGHT - MARGIN}" text-anchor="end" font-family="sans-serif" '
        f'font-size="11">{y_lo:.3g}</text>',
        f'<text x="{MARGIN - 8}" y="{MARGIN + 4}" text-anchor="end" font-family="sans-serif" '
        f'font-size="11">{y_hi:.3g}</text>',
    ]

    if arrows and arrow_density > 0:
        frozen = fp.as_array() if fp is not None else traj.states.mean(axis=0)
        cell_w, cell_h = plot_w / arrow_density, plot_h / arrow_density
        length = 0.8 * min(cell_w, cell_h)
        out.append('<g id="field" stroke="#1f5fbf" stroke-width="1.2">')
        for i in range(arrow_density):
            for j in range(arrow_density):
                u = x_lo + (i + 0.5) * (x_hi - x_lo) / arrow_density
                v = y_lo + (j + 0.5) * (y_hi - y_lo) / arrow_density
                x = frozen.copy()
                x[ia], x[ib] = u, v
                d = np.array(model.rhs(*x), dtype=float)
                dx, dy = d[ia] * sx, -d[ib] * sy
                norm = float(np.hypot(dx, dy))
                if norm == 0 or not np.isfinite(norm):
                    continue
                cx, cy = px(u), py(v)
                hx, hy = 0.5 * length * dx / norm, 0.5 * length * dy / norm
                out.append(f'<line class="arrow" x1="{_f(cx - hx)}" y1="{_f(cy - hy)}" x2="{_f(cx + hx)}" '
                           f'y2="{_f(cy + hy)}" marker-end="url(#arrowhead)"/>')
        out.append("</g>")

    n = len(a)
    if n >= 2:
        coords = [f"{_f(px(u))},{_f(py(v))}" for u, v in zip(a, b)]
        out.append(f'<path id="orbit" d="M {" L ".join(c.replace(",", " ") for c in coords)}" fill="none" '
                   'stroke="rgb(200,200,200)" stroke-width="0.6"/>')
        n_seg = min(N_SEGMENTS, n - 1)
        edges = np.linspace(0, n - 1, n_seg + 1).round().astype(int)
        out.append('<g id="orbit-time" fill="none" stroke-width="1.4">')
        for k in range(n_seg):
            lo, hi = edges[k], edges[k + 1]
            if hi <= lo:
                continue
            frac = k / max(n_seg - 1, 1)
            out.append(
                f'<polyline class="orbit-segment" data-t0="{traj.times[lo]:.6g}" data-t1="{traj.times[hi]:.6g}" '
                f'stroke="{_gray(frac)}" points="{" ".join(coords[lo:hi + 1])}"/>'
            )
        out.append("</g>")

    if fp is not None:
        out.append(f'<circle id="fixed-point" cx="{_f(px(fp[plane[0]]))}" cy="{_f(py(fp[plane[1]]))}" r="4" '
                   'fill="red" stroke="black" stroke-width="0.8"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
