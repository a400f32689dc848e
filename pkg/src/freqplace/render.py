"""SVG rendering of a layout file."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .layout import LayoutFile
from .model import GHZ
from .physics import hotspot_pairs

SCALE = 20.0  # px per mm
MARGIN = 20.0
LEGEND_H = 70.0


def _color(t: float) -> str:
    """Blue -> green -> yellow -> red for t in [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    stops = [(0.0, (49, 54, 149)), (0.35, (69, 170, 120)), (0.7, (250, 220, 60)), (1.0, (215, 48, 39))]
    for (t0, c0), (t1, c1) in zip(stops, stops[1:]):
        if t <= t1:
            u = (t - t0) / (t1 - t0)
            r, g, b = (round(a + (b_ - a) * u) for a, b_ in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#d73027"


def render_svg(layout: LayoutFile) -> str:
    d, p, cfg = layout.design, layout.placement, layout.config
    insts = d.instances
    lo = min(cfg.qubit_band.lo, cfg.res_band.lo)
    hi = max(cfg.qubit_band.hi, cfg.res_band.hi)
    if insts:
        xs = [p.positions[i.id, 0] for i in insts]
        ys = [p.positions[i.id, 1] for i in insts]
        half = max(max(i.padded_width, i.padded_height) for i in insts) / 2
        x0, x1 = min(xs) - half, max(xs) + half
        y0, y1 = min(ys) - half, max(ys) + half
    else:
        x0 = y0 = 0.0
        x1 = y1 = 10.0
    width = (x1 - x0) * SCALE + 2 * MARGIN
    height = (y1 - y0) * SCALE + 2 * MARGIN + LEGEND_H

    def sx(x):
        return MARGIN + (x - x0) * SCALE

    def sy(y):
        return MARGIN + (y1 - y) * SCALE

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height:.1f}" '
           f'viewBox="0 0 {width:.1f} {height:.1f}">',
           f'<rect x="0" y="0" width="{width:.1f}" height="{height:.1f}" fill="white"/>',
           '<g id="halos">']
    for inst in insts:
        x, y = p.positions[inst.id]
        out.append(f'<rect class="halo" x="{sx(x - inst.padded_width / 2):.2f}" '
                   f'y="{sy(y + inst.padded_height / 2):.2f}" width="{inst.padded_width * SCALE:.2f}" '
                   f'height="{inst.padded_height * SCALE:.2f}" fill="#888888" fill-opacity="0.15"/>')
    out.append('</g><g id="instances">')
    for inst in insts:
        x, y = p.positions[inst.id]
        fill = _color((inst.frequency - lo) / (hi - lo))
        out.append(f'<rect class="instance {inst.kind.value}" data-id="{inst.id}" '
                   f'x="{sx(x - inst.width / 2):.2f}" y="{sy(y + inst.height / 2):.2f}" '
                   f'width="{inst.width * SCALE:.2f}" height="{inst.height * SCALE:.2f}" '
                   f'fill="{fill}" stroke="black" stroke-width="0.5"/>')
    out.append('</g><g id="hotspots">')
    for i, j, _, _ in (hotspot_pairs(p, insts, cfg.delta_c) if insts else []):
        (xa, ya), (xb, yb) = p.positions[i], p.positions[j]
        out.append(f'<line class="hotspot" x1="{sx(xa):.2f}" y1="{sy(ya):.2f}" '
                   f'x2="{sx(xb):.2f}" y2="{sy(yb):.2f}" stroke="red" stroke-width="2"/>')
    out.append('</g>')
    # legend: colour bar plus band and threshold labels
    top = height - LEGEND_H + 10
    bar_w = min(width - 2 * MARGIN, 300.0)
    out.append('<g id="legend" font-family="sans-serif" font-size="10">')
    steps = 30
    for k in range(steps):
        out.append(f'<rect x="{MARGIN + k * bar_w / steps:.2f}" y="{top:.2f}" width="{bar_w / steps + 0.5:.2f}" '
                   f'height="10" fill="{_color(k / (steps - 1))}"/>')
    text = (f"{lo / GHZ:.2f} GHz .. {hi / GHZ:.2f} GHz | qubits {cfg.qubit_band.lo / GHZ:.2f}-"
            f"{cfg.qubit_band.hi / GHZ:.2f} GHz, resonators {cfg.res_band.lo / GHZ:.2f}-"
            f"{cfg.res_band.hi / GHZ:.2f} GHz | detuning threshold {cfg.delta_c / GHZ:.3f} GHz")
    out.append(f'<text x="{MARGIN:.2f}" y="{top + 24:.2f}">{escape(text)}</text>')
    out.append(f'<text x="{MARGIN:.2f}" y="{top + 38:.2f}">{escape(layout.mode)} layout, '
               f'red lines: near-resonant contacts</text>')
    out.append('</g></svg>')
    return "\n".join(out) + "\n"
