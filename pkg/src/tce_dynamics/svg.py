"""Standalone SVG output for point clouds, segments and circles in the plane."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def colour(i: int) -> str:
    return PALETTE[i % len(PALETTE)]


class SvgCanvas:
    """
    World-coordinate canvas.  ``box`` is (xmin, xmax, ymin, ymax); y grows
    upwards in world coordinates and is flipped on output.
    """

    def __init__(self, box, width: int = 800, height: int | None = None, margin: int = 20):
        xmin, xmax, ymin, ymax = (float(v) for v in box)
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("empty drawing box")
        self.box = (xmin, xmax, ymin, ymax)
        self.width = width
        if height is None:
            height = min(1200, max(300, int(round(width * (ymax - ymin) / (xmax - xmin)))))
        self.height = height
        self.margin = margin
        self.items: list[str] = []

    def _map(self, x: float, y: float) -> tuple[float, float]:
        xmin, xmax, ymin, ymax = self.box
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        return (self.margin + (x - xmin) / (xmax - xmin) * w,
                self.margin + (ymax - y) / (ymax - ymin) * h)

    def _scale(self) -> float:
        xmin, xmax, _, _ = self.box
        return (self.width - 2 * self.margin) / (xmax - xmin)

    def points(self, pts, fill: str = "#000", r: float = 1.0):
        for z in pts:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                continue
            u, v = self._map(z.real, z.imag)
            self.items.append('<circle cx="%.3f" cy="%.3f" r="%.2f" fill="%s"/>' % (u, v, r, fill))

    def segment(self, a: complex, b: complex, stroke: str = "#000", width: float = 1.0, dash: str | None = None):
        u1, v1 = self._map(a.real, a.imag)
        u2, v2 = self._map(b.real, b.imag)
        extra = ' stroke-dasharray="%s"' % dash if dash else ""
        self.items.append('<line x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" stroke="%s" stroke-width="%.2f"%s/>'
                          % (u1, v1, u2, v2, stroke, width, extra))

    def circle(self, c: complex, radius: float, stroke: str = "#000", fill: str = "none", opacity: float = 1.0):
        u, v = self._map(c.real, c.imag)
        self.items.append('<circle cx="%.3f" cy="%.3f" r="%.3f" stroke="%s" fill="%s" fill-opacity="%.2f"/>'
                          % (u, v, radius * self._scale(), stroke, fill, opacity))

    def text(self, z: complex, s: str, size: int = 12):
        u, v = self._map(z.real, z.imag)
        self.items.append('<text x="%.3f" y="%.3f" font-size="%d" font-family="sans-serif">%s</text>'
                          % (u, v, size, escape(s)))

    def to_string(self) -> str:
        head = ('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">'
                % (self.width, self.height, self.width, self.height))
        body = "\n".join(self.items)
        return head + '\n<rect width="100%" height="100%" fill="white"/>\n' + body + "\n</svg>\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_string())


def cone_rays(canvas: SvgCanvas, bangles, length: float, stroke: str = "#999"):
    """Draw the cone boundary rays from the origin."""
    for b in bangles:
        canvas.segment(0j, length * complex(math.cos(b), math.sin(b)), stroke=stroke, width=0.8)
