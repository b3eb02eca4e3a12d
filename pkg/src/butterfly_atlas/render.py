"""Deterministic SVG rendering of the rational butterfly and of similarity images."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from .errors import InvalidInput
from .moebius import Rational, farey
from .similarity import Similarity, map_band_point
from .spectrum import band_edges

__all__ = [
    "RenderConfig",
    "ButterflyRow",
    "OverlaySegment",
    "butterfly_rows",
    "overlay_segments",
    "render_butterfly",
    "render_similarity_overlay",
    "render_curve",
    "fmt",
]


def fmt(v: float) -> str:
    """Fixed 12-significant-digit formatting used by every text output."""
    out = format(float(v), ".12g")
    return "0" if out == "-0" else out


@dataclass(frozen=True)
class RenderConfig:
    width: int = 800
    height: int = 800
    qmax: int = 30
    margin: int = 20
    stroke_scale: float = 2.0
    min_stroke: float = 0.5
    workers: Optional[int] = None

    def __post_init__(self) -> None:
        if self.qmax < 1:
            raise InvalidInput("qmax must be >= 1")
        if self.width < 64 or self.height < 64:
            raise InvalidInput("width and height must be at least 64 pixels")
        if not 0 <= 2 * self.margin < min(self.width, self.height):
            raise InvalidInput("margin does not fit the viewport")

    def to_view(self, x: float, theta: float) -> Tuple[float, float]:
        """World ``(x, theta)`` in ``[-4, 4] x [0, 1]`` to pixels, theta increasing upward."""
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        return (self.margin + (x + 4.0) / 8.0 * w, self.height - self.margin - theta * h)

    def stroke(self, q: int) -> float:
        return max(self.min_stroke, self.stroke_scale / q)


@dataclass(frozen=True)
class ButterflyRow:
    theta: Rational
    bands: Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class OverlaySegment:
    """Image of band ``k`` at ``theta``: the sub-interval ``[lo_out, hi_out]`` of band ``k_out``."""

    theta: Rational
    k: int
    lo: float
    hi: float
    theta_out: Rational
    k_out: int
    lo_out: float
    hi_out: float


def _map_rows(fn, items: List, workers: Optional[int]) -> List:
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def butterfly_rows(qmax: int, workers: Optional[int] = None) -> List[ButterflyRow]:
    """One row per Farey fraction, ascending in theta."""
    return _map_rows(lambda th: ButterflyRow(th, band_edges(th).bands), farey(qmax), workers)


def _overlay_row(sim: Similarity, theta: Rational) -> List[OverlaySegment]:
    out = []
    for k, (lo, hi) in enumerate(band_edges(theta).bands, start=1):
        theta_out, (lo_out, k_out) = map_band_point(sim, theta, lo, k)
        _, (hi_out, _) = map_band_point(sim, theta, hi, k)
        out.append(OverlaySegment(theta, k, lo, hi, theta_out, k_out, lo_out, hi_out))
    return out


def overlay_segments(sim: Similarity, qmax: int, workers: Optional[int] = None) -> List[OverlaySegment]:
    """Band-by-band image of the butterfly; the two bands touching at 0 map separately."""
    rows = _map_rows(lambda th: _overlay_row(sim, th), farey(qmax), workers)
    return [seg for row in rows for seg in row]


def _line(cfg: RenderConfig, x1: float, x2: float, theta: Rational, color: str) -> str:
    ax, ay = cfg.to_view(x1, float(theta))
    bx, _ = cfg.to_view(x2, float(theta))
    return (
        f'<line x1="{ax:.4f}" y1="{ay:.4f}" x2="{bx:.4f}" y2="{ay:.4f}" '
        f'stroke="{color}" stroke-width="{cfg.stroke(theta.q):.4f}"/>'
    )


def _document(cfg: RenderConfig, groups: Iterable[Tuple[str, List[str]]]) -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cfg.width}" height="{cfg.height}" '
        f'viewBox="0 0 {cfg.width} {cfg.height}">',
        f'<rect x="0" y="0" width="{cfg.width}" height="{cfg.height}" fill="white"/>',
    ]
    for gid, lines in groups:
        parts.append(f'<g id="{gid}">')
        parts.extend(lines)
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_butterfly(cfg: RenderConfig) -> str:
    """SVG with one horizontal line per band per Farey fraction; byte-identical for a fixed config."""
    rows = butterfly_rows(cfg.qmax, cfg.workers)
    lines = [_line(cfg, lo, hi, row.theta, "black") for row in rows for lo, hi in row.bands]
    return _document(cfg, [("butterfly", lines)])


def render_similarity_overlay(sim: Similarity, cfg: RenderConfig) -> str:
    """The butterfly in grey with its exact image under ``sim`` drawn on top in red."""
    base = [
        _line(cfg, lo, hi, row.theta, "#bbbbbb")
        for row in butterfly_rows(cfg.qmax, cfg.workers)
        for lo, hi in row.bands
    ]
    image = [
        _line(cfg, s.lo_out, s.hi_out, s.theta_out, "#cc0000")
        for s in overlay_segments(sim, cfg.qmax, cfg.workers)
    ]
    return _document(cfg, [("butterfly", base), ("image", image)])


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def render_curve(segments, components, size: int = 600, margin: int = 20) -> str:
    """SVG of traced curve segments in ``[-4, 4]^2``, one colour per component."""
    cfg = RenderConfig(width=size, height=size, qmax=1, margin=margin)
    span = size - 2 * margin

    def view(x: float, y: float) -> Tuple[float, float]:
        return (margin + (x + 4.0) / 8.0 * span, size - margin - (y + 4.0) / 8.0 * span)

    lines = []
    for (x1, y1, x2, y2), c in zip(segments, components):
        ax, ay = view(x1, y1)
        bx, by = view(x2, y2)
        lines.append(
            f'<line x1="{ax:.4f}" y1="{ay:.4f}" x2="{bx:.4f}" y2="{by:.4f}" '
            f'stroke="{_PALETTE[int(c) % len(_PALETTE)]}" stroke-width="1"/>'
        )
    return _document(cfg, [("curve", lines)])
