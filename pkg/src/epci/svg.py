"""Standalone SVG rendering of exceedance-probability curves.

Text-based output with no drawing dependency: the figures double as
verification artifacts, so the data-to-pixel mapping is exposed through
:class:`Frame` and every coordinate is written with fixed precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceedance import EpCurve, parameter_ci

_MARGIN_LEFT = 64.0
_MARGIN_RIGHT = 20.0
_MARGIN_TOP = 20.0
_MARGIN_BOTTOM = 48.0

_BAND_FILL = "#c8c8c8"
_CURVE_STROKE = "#000000"
_AXIS_STROKE = "#333333"
_GRID_STROKE = "#e0e0e0"
_MARKER_FILL = "#000000"


@dataclass(frozen=True)
class Frame:
    """Affine map between data coordinates and pixel coordinates."""

    x_min: float
    x_max: float
    width: float
    height: float

    @property
    def plot_left(self) -> float:
        return _MARGIN_LEFT

    @property
    def plot_right(self) -> float:
        return self.width - _MARGIN_RIGHT

    @property
    def plot_top(self) -> float:
        return _MARGIN_TOP

    @property
    def plot_bottom(self) -> float:
        return self.height - _MARGIN_BOTTOM

    def x_px(self, x: float) -> float:
        span = self.x_max - self.x_min
        frac = 0.5 if span == 0.0 else (x - self.x_min) / span
        return self.plot_left + frac * (self.plot_right - self.plot_left)

    def y_px(self, y: float) -> float:
        # y is a probability in [0, 1]; pixel axis points down
        return self.plot_bottom - y * (self.plot_bottom - self.plot_top)

    def x_data(self, px: float) -> float:
        frac = (px - self.plot_left) / (self.plot_right - self.plot_left)
        return self.x_min + frac * (self.x_max - self.x_min)

    def y_data(self, px: float) -> float:
        return (self.plot_bottom - px) / (self.plot_bottom - self.plot_top)


def frame_for(curve: EpCurve, width: float, height: float) -> Frame:
    return Frame(x_min=curve.cutoffs[0], x_max=curve.cutoffs[-1], width=width, height=height)


def _fmt(v: float) -> str:
    return format(v, ".2f")


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _x_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0.0:
        return [lo]
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target - 1:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def render_ep_curve_svg(
    curve: EpCurve,
    width: float = 720.0,
    height: float = 480.0,
    show_parameter_ci: bool = True,
) -> str:
    """Render the S-curve with its pointwise band as a standalone SVG.

    Solid black polyline for the point estimates, gray polygon between the
    lower and upper bounds, and (optionally) a horizontal error bar at
    probability 0.5 spanning the parameter confidence interval with a dot
    at the coefficient estimate.  A single-cutoff curve degenerates to
    point markers with no band or polyline.
    """
    frame = frame_for(curve, width, height)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>',
    ]

    # horizontal gridlines at fifths of the probability axis
    for i in range(6):
        y = i / 5.0
        py = frame.y_px(y)
        parts.append(
            f'<line x1="{_fmt(frame.plot_left)}" y1="{_fmt(py)}" '
            f'x2="{_fmt(frame.plot_right)}" y2="{_fmt(py)}" '
            f'stroke="{_GRID_STROKE}" stroke-width="1"/>'
        )

    multi = len(curve) > 1
    if multi:
        ring = [(frame.x_px(c), frame.y_px(e.upper)) for c, e in zip(curve.cutoffs, curve.estimates)]
        ring += [
            (frame.x_px(c), frame.y_px(e.lower))
            for c, e in zip(reversed(curve.cutoffs), reversed(curve.estimates))
        ]
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in ring)
        parts.append(f'<polygon points="{pts}" fill="{_BAND_FILL}" stroke="none"/>')
        line = " ".join(
            f"{_fmt(frame.x_px(c))},{_fmt(frame.y_px(e.point))}"
            for c, e in zip(curve.cutoffs, curve.estimates)
        )
        parts.append(
            f'<polyline points="{line}" fill="none" stroke="{_CURVE_STROKE}" stroke-width="1.5"/>'
        )
    else:
        c = curve.cutoffs[0]
        e = curve.estimates[0]
        px = frame.x_px(c)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(frame.y_px(e.lower))}" '
            f'x2="{_fmt(px)}" y2="{_fmt(frame.y_px(e.upper))}" '
            f'stroke="{_BAND_FILL}" stroke-width="4"/>'
        )
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(frame.y_px(e.point))}" r="3.5" '
            f'fill="{_MARKER_FILL}"/>'
        )

    if show_parameter_ci:
        lo, hi = parameter_ci(curve.fit, curve.coefficient, curve.alpha, curve.side)
        theta = curve.fit.theta_hat[curve.coefficient - 1]
        bar_lo = max(lo, frame.x_min) if math.isfinite(lo) else frame.x_min
        bar_hi = min(hi, frame.x_max) if math.isfinite(hi) else frame.x_max
        y_half = frame.y_px(0.5)
        parts.append(
            f'<line x1="{_fmt(frame.x_px(bar_lo))}" y1="{_fmt(y_half)}" '
            f'x2="{_fmt(frame.x_px(bar_hi))}" y2="{_fmt(y_half)}" '
            f'stroke="{_MARKER_FILL}" stroke-width="2"/>'
        )
        for endpoint, bound in ((bar_lo, lo), (bar_hi, hi)):
            if math.isfinite(bound):  # no serif on a clipped infinite end
                px = frame.x_px(endpoint)
                parts.append(
                    f'<line x1="{_fmt(px)}" y1="{_fmt(y_half - 5)}" '
                    f'x2="{_fmt(px)}" y2="{_fmt(y_half + 5)}" '
                    f'stroke="{_MARKER_FILL}" stroke-width="2"/>'
                )
        if frame.x_min <= theta <= frame.x_max:
            parts.append(
                f'<circle cx="{_fmt(frame.x_px(theta))}" cy="{_fmt(y_half)}" r="4" '
                f'fill="{_MARKER_FILL}"/>'
            )

    # axes
    parts.append(
        f'<line x1="{_fmt(frame.plot_left)}" y1="{_fmt(frame.plot_top)}" '
        f'x2="{_fmt(frame.plot_left)}" y2="{_fmt(frame.plot_bottom)}" '
        f'stroke="{_AXIS_STROKE}" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(frame.plot_left)}" y1="{_fmt(frame.plot_bottom)}" '
        f'x2="{_fmt(frame.plot_right)}" y2="{_fmt(frame.plot_bottom)}" '
        f'stroke="{_AXIS_STROKE}" stroke-width="1"/>'
    )
    for i in range(6):
        y = i / 5.0
        py = frame.y_px(y)
        parts.append(
            f'<text x="{_fmt(frame.plot_left - 8)}" y="{_fmt(py + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{y:g}</text>'
        )
    for t in _x_ticks(frame.x_min, frame.x_max):
        px = frame.x_px(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(frame.plot_bottom)}" '
            f'x2="{_fmt(px)}" y2="{_fmt(frame.plot_bottom + 5)}" '
            f'stroke="{_AXIS_STROKE}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(frame.plot_bottom + 20)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{t:g}</text>'
        )
    parts.append(
        f'<text x="{_fmt((frame.plot_left + frame.plot_right) / 2)}" '
        f'y="{_fmt(height - 10)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{_esc("cutoff c")}</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt((frame.plot_top + frame.plot_bottom) / 2)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {_fmt((frame.plot_top + frame.plot_bottom) / 2)})">'
        f'{_esc("exceedance probability")}</text>'
    )
    note = f"alpha={curve.alpha:g}, m={curve.rep_size}, n={curve.fit.n}, side={curve.side.value}"
    parts.append(
        f'<text x="{_fmt(frame.plot_left + 10)}" y="{_fmt(frame.plot_top + 16)}" '
        f'font-family="sans-serif" font-size="12">{_esc(note)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
