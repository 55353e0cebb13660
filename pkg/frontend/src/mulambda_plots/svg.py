"""Minimal deterministic SVG construction: scales, ticks, shapes.

Identical inputs always produce identical bytes: coordinates are formatted
with fixed precision, fonts are named generically rather than embedded, and
nothing depends on environment state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr


def fmt(value: float) -> str:
    """Fixed-precision pixel coordinate, stable across platforms."""
    return f"{value:.3f}"


@dataclass
class Scale:
    lo: float
    hi: float
    pix_lo: float
    pix_hi: float
    log: bool = False

    def __post_init__(self):
        if self.log:
            if self.lo <= 0:
                raise ValueError("log scale needs positive bounds")
            self._a, self._b = math.log10(self.lo), math.log10(self.hi)
        else:
            self._a, self._b = self.lo, self.hi
        if self._a == self._b:
            self._a -= 0.5
            self._b += 0.5

    def __call__(self, value: float) -> float:
        v = math.log10(value) if self.log else value
        frac = (v - self._a) / (self._b - self._a)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self) -> list[float]:
        if self.log:
            lo_e = int(math.floor(self._a))
            hi_e = int(math.ceil(self._b))
            return [10.0 ** e for e in range(lo_e, hi_e + 1)][:12]
        span = self._b - self._a
        raw = span / 5
        mag = 10.0 ** math.floor(math.log10(raw)) if raw > 0 else 1.0
        for mult in (1, 2, 5, 10):
            step = mult * mag
            if span / step <= 6:
                break
        first = math.ceil(self._a / step) * step
        ticks = []
        t = first
        while t <= self._b + 1e-9 * abs(step):
            ticks.append(0.0 if abs(t) < 1e-12 else t)
            t += step
        return ticks


def tick_label(value: float) -> str:
    if value == 0:
        return "0"
    if abs(value) >= 10000 or abs(value) < 0.01:
        exp = math.floor(math.log10(abs(value)))
        mant = value / 10.0 ** exp
        if abs(mant - 1.0) < 1e-9:
            return f"1e{exp}"
        return f"{mant:g}e{exp}"
    return f"{value:g}"


@dataclass
class Svg:
    width: int = 720
    height: int = 480
    parts: list = field(default_factory=list)

    def add(self, tag: str, text: str | None = None, **attrs) -> None:
        rendered = " ".join(f"{name.replace('_', '-')}={quoteattr(str(val))}"
                            for name, val in attrs.items())
        if text is None:
            self.parts.append(f"<{tag} {rendered}/>")
        else:
            self.parts.append(f"<{tag} {rendered}>{escape(text)}</{tag}>")

    def line(self, x1, y1, x2, y2, stroke="#333333", width=1.0, dash=None):
        attrs = dict(x1=fmt(x1), y1=fmt(y1), x2=fmt(x2), y2=fmt(y2),
                     stroke=stroke, stroke_width=width, fill="none")
        if dash:
            attrs["stroke_dasharray"] = dash
        self.add("line", **attrs)

    def polyline(self, points, stroke, width=1.5, dash=None, cls=None):
        attrs = dict(points=" ".join(f"{fmt(x)},{fmt(y)}" for x, y in points),
                     fill="none", stroke=stroke, stroke_width=width)
        if dash:
            attrs["stroke_dasharray"] = dash
        if cls:
            attrs["class"] = cls
        self.add("polyline", **attrs)

    def polygon(self, points, fill, opacity=1.0, cls=None):
        attrs = dict(points=" ".join(f"{fmt(x)},{fmt(y)}" for x, y in points),
                     fill=fill, stroke="none", fill_opacity=opacity)
        if cls:
            attrs["class"] = cls
        self.add("polygon", **attrs)

    def circle(self, x, y, r, fill, cls=None, data=None, stroke="none"):
        attrs = dict(cx=fmt(x), cy=fmt(y), r=fmt(r), fill=fill, stroke=stroke)
        if cls:
            attrs["class"] = cls
        if data:
            for key, val in data.items():
                attrs[f"data_{key}"] = val
        self.add("circle", **attrs)

    def text(self, x, y, content, size=12, anchor="start", fill="#222222",
             rotate=None):
        attrs = dict(x=fmt(x), y=fmt(y), font_size=size, text_anchor=anchor,
                     fill=fill, font_family="sans-serif")
        if rotate is not None:
            attrs["transform"] = f"rotate({rotate} {fmt(x)} {fmt(y)})"
        self.add("text", content, **attrs)

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        background = (f'<rect x="0" y="0" width="{self.width}" '
                      f'height="{self.height}" fill="#ffffff"/>')
        return "\n".join([head, background] + self.parts + ["</svg>"]) + "\n"


@dataclass
class Frame:
    """Plot area with axes; owns the data-to-pixel scales."""

    svg: Svg
    xscale: Scale
    yscale: Scale
    left: float
    right: float
    top: float
    bottom: float

    @classmethod
    def build(cls, svg: Svg, xlo, xhi, ylo, yhi, logx=False, logy=False,
              left=70, right=690, top=40, bottom=420):
        xscale = Scale(xlo, xhi, left, right, log=logx)
        yscale = Scale(ylo, yhi, bottom, top, log=logy)
        return cls(svg, xscale, yscale, left, right, top, bottom)

    def draw_axes(self, xlabel: str, ylabel: str, title: str) -> None:
        svg = self.svg
        svg.text((self.left + self.right) / 2, 22, title, size=14,
                 anchor="middle")
        svg.line(self.left, self.bottom, self.right, self.bottom)
        svg.line(self.left, self.bottom, self.left, self.top)
        for t in self.xscale.ticks():
            x = self.xscale(t)
            if x < self.left - 0.5 or x > self.right + 0.5:
                continue
            svg.line(x, self.bottom, x, self.bottom + 5)
            svg.text(x, self.bottom + 18, tick_label(t), size=10,
                     anchor="middle")
        for t in self.yscale.ticks():
            y = self.yscale(t)
            if y > self.bottom + 0.5 or y < self.top - 0.5:
                continue
            svg.line(self.left - 5, y, self.left, y)
            svg.text(self.left - 8, y + 3, tick_label(t), size=10,
                     anchor="end")
        svg.text((self.left + self.right) / 2, self.bottom + 38, xlabel,
                 size=12, anchor="middle")
        svg.text(18, (self.top + self.bottom) / 2, ylabel, size=12,
                 anchor="middle", rotate=-90)
