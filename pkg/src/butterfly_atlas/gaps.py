"""Integer gap labels ``k = t p - s q`` and their transport under similarities."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .errors import InvalidInput
from .moebius import Rational, lft_apply_raw
from .similarity import Similarity

__all__ = ["GapLabel", "TransportedLabel", "label_gap", "canonicalize", "gap_index", "transport_label"]


@dataclass(frozen=True)
class GapLabel:
    """Solution ``(s, t)`` of ``k = t p - s q``."""

    s: int
    t: int

    def as_tuple(self) -> Tuple[int, int]:
        return (self.s, self.t)


@dataclass(frozen=True)
class TransportedLabel:
    """Image label straight from the matrix formula and its canonical form."""

    raw: GapLabel
    canonical: GapLabel
    theta_out: Rational


def gap_index(theta: Rational, label: GapLabel) -> int:
    return label.t * theta.p - label.s * theta.q


def _lift(t: int, q: int) -> int:
    t %= q
    return t - q if 2 * t > q else t


def label_gap(theta: Rational, k: int) -> GapLabel:
    """Canonical label of gap ``k`` (between bands ``k`` and ``k+1``): ``t`` lifted to ``(-q/2, q/2]``."""
    p, q = theta.p, theta.q
    if not 1 <= k <= q - 1:
        raise InvalidInput(f"gap index {k} outside 1..{q - 1}")
    t = _lift(k * pow(p, -1, q), q)
    s, rem = divmod(t * p - k, q)
    assert rem == 0
    return GapLabel(s, t)


def canonicalize(theta: Rational, label: GapLabel) -> GapLabel:
    """Shift ``label`` by a multiple of ``(p, q)``, which leaves ``k`` unchanged, into canonical range."""
    p, q = theta.p, theta.q
    t = _lift(label.t, q)
    n, rem = divmod(t - label.t, q)
    assert rem == 0
    return GapLabel(label.s + n * p, t)


def transport_label(sim: Similarity, label: GapLabel, theta: Rational) -> TransportedLabel:
    """Label of the image gap: ``det(M) M (s, t)`` plus ``(0, r)`` for "+" or ``-(r, r)`` for "-".

    ``theta`` is needed only for canonicalization at ``theta' = M.theta``.
    The offsets are the ones that reproduce the band re-indexing
    ``k' = k + r p'`` and ``k' = k + r (q' - p')`` respectively.
    """
    a, b, c, d = sim.matrix.oriented()
    det = a * d - b * c
    s = det * (a * label.s + b * label.t)
    t = det * (c * label.s + d * label.t)
    if sim.sign == "+":
        t += sim.r
    else:
        s, t = s - sim.r, t - sim.r
    raw = GapLabel(s, t)
    p_out, q_out = lft_apply_raw(sim.matrix, theta)
    theta_out = Rational(p_out, q_out)
    return TransportedLabel(raw, canonicalize(theta_out, raw), theta_out)
