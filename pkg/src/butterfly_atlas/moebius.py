"""Exact rationals, Farey sequences and the GL2(Z)/{+-I} interval semigroup.

Everything here is integer arithmetic on Python ints, so there is no
overflow to detect.  Matrices act on column vectors ``(p, q)`` and on
parameters ``theta`` through the linear fractional transformation
``theta -> (a*theta + b) / (c*theta + d)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterator, List, Sequence, Tuple

from .errors import InvalidInput, NotInSemigroup

__all__ = [
    "Rational",
    "ProjMat",
    "GeneratorWord",
    "A",
    "B",
    "IDENTITY",
    "reduce",
    "farey",
    "lft_apply",
    "lft_apply_raw",
    "in_semigroup",
    "factor_word",
]

_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+))?\s*$")


@total_ordering
@dataclass(frozen=True)
class Rational:
    """Reduced fraction ``p/q`` in [0, 1]."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise InvalidInput(f"denominator must be >= 1, got {self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidInput(f"{self.p}/{self.q} is not reduced")
        if not 0 <= self.p <= self.q:
            raise InvalidInput(f"{self.p}/{self.q} lies outside [0, 1]")

    @classmethod
    def parse(cls, text: str) -> "Rational":
        """Parse ``"p/q"`` (or a bare integer ``"0"``/``"1"``) and reduce it."""
        m = _FRACTION_RE.match(str(text))
        if m is None:
            raise InvalidInput(f"cannot parse fraction {text!r}")
        p = int(m.group(1))
        q = int(m.group(2)) if m.group(2) is not None else 1
        return reduce(p, q)

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __float__(self) -> float:
        return self.p / self.q

    def __lt__(self, other: "Rational") -> bool:
        if not isinstance(other, Rational):
            return NotImplemented
        return self.p * other.q < other.p * self.q

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def reduce(p: int, q: int) -> Rational:
    """Return the reduced representative of ``p/q``; rejects ``q == 0`` and values outside [0, 1]."""
    p, q = int(p), int(q)
    if q == 0:
        raise InvalidInput("zero denominator")
    if q < 0:
        p, q = -p, -q
    if not 0 <= p <= q:
        raise InvalidInput(f"{p}/{q} lies outside [0, 1]")
    g = math.gcd(p, q)
    return Rational(p // g, q // g)


def farey(qmax: int) -> List[Rational]:
    """All reduced fractions in [0, 1] with denominator at most ``qmax``, ascending."""
    if qmax < 1:
        raise InvalidInput("qmax must be >= 1")
    a, b, c, d = 0, 1, 1, qmax
    out = [Rational(0, 1)]
    while c <= qmax:
        k = (qmax + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(Rational(a, b))
    return out


@dataclass(frozen=True)
class ProjMat:
    """Integer 2x2 matrix of determinant +-1, stored modulo +-I.

    The stored representative has its first nonzero entry (reading order
    a, b, c, d) positive, so equality and hashing are projective.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if det not in (1, -1):
            raise InvalidInput(f"determinant must be +-1, got {det}")
        first = next(v for v in (self.a, self.b, self.c, self.d) if v != 0)
        if first < 0:
            for name in "abcd":
                object.__setattr__(self, name, -getattr(self, name))

    @classmethod
    def parse(cls, text: str) -> "ProjMat":
        """Parse the row-major flag format ``"a,b,c,d"``."""
        parts = str(text).replace(" ", "").split(",")
        if len(parts) != 4:
            raise InvalidInput(f"matrix must be 'a,b,c,d', got {text!r}")
        try:
            a, b, c, d = (int(s) for s in parts)
        except ValueError:
            raise InvalidInput(f"matrix entries must be integers, got {text!r}") from None
        return cls(a, b, c, d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def oriented(self) -> Tuple[int, int, int, int]:
        """Sign representative whose denominator ``c*theta + d`` is positive on [0, 1].

        Only meaningful when the map has no pole on [0, 1]; otherwise the
        canonical representative is returned unchanged.
        """
        a, b, c, d = self.entries()
        if d < 0 and c + d < 0:
            return (-a, -b, -c, -d)
        return (a, b, c, d)

    def __matmul__(self, other: "ProjMat") -> "ProjMat":
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return ProjMat(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __pow__(self, n: int) -> "ProjMat":
        if n < 0:
            raise InvalidInput("negative powers are outside the semigroup")
        out = IDENTITY
        for _ in range(n):
            out = out @ self
        return out

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"


IDENTITY = ProjMat(1, 0, 0, 1)
A = ProjMat(1, 0, 1, 1)
B = ProjMat(-1, 1, 0, 1)
_LETTERS = {"A": A, "B": B}


@dataclass(frozen=True)
class GeneratorWord:
    """Word over ``{A, B}``; the leftmost letter is the leftmost matrix factor."""

    letters: str

    def __post_init__(self) -> None:
        if set(self.letters) - set("AB"):
            raise InvalidInput(f"words use only the letters A and B, got {self.letters!r}")

    def matrix(self) -> ProjMat:
        out = IDENTITY
        for ch in self.letters:
            out = out @ _LETTERS[ch]
        return out

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __str__(self) -> str:
        return self.letters


def lft_apply_raw(m: ProjMat, theta: Rational) -> Tuple[int, int]:
    """Unreduced image ``(p', q') = M (p, q)`` using the positive-denominator representative."""
    a, b, c, d = m.oriented()
    p_out = a * theta.p + b * theta.q
    q_out = c * theta.p + d * theta.q
    if q_out == 0:
        raise InvalidInput(f"matrix {m} has a pole at theta={theta}")
    if q_out < 0:
        p_out, q_out = -p_out, -q_out
    return p_out, q_out


def lft_apply(m: ProjMat, theta: Rational) -> Rational:
    """Image of ``theta`` under the linear fractional map of ``m``."""
    p_out, q_out = lft_apply_raw(m, theta)
    return reduce(p_out, q_out)


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def in_semigroup(m: ProjMat) -> bool:
    """True when the map of ``m`` has no pole on [0, 1] and sends [0, 1] into itself.

    A Moebius map without a pole on the interval is monotone there, so the
    images of the two endpoints decide membership exactly.
    """
    a, b, c, d = m.entries()
    if d == 0 or c + d == 0 or _sign(d) != _sign(c + d):
        return False
    return 0 <= Fraction(b, d) <= 1 and 0 <= Fraction(a + b, c + d) <= 1


def _free_reduce(tokens: Sequence[str]) -> List[str]:
    # "a" stands for A^-1; B is an involution.
    out: List[str] = []
    for t in tokens:
        if out and {out[-1], t} == {"A", "a"}:
            out.pop()
        elif out and out[-1] == t == "B":
            out.pop()
        else:
            out.append(t)
    return out


def _power(c: int) -> List[str]:
    return ["A"] * c if c >= 0 else ["a"] * (-c)


def factor_word(m: ProjMat) -> GeneratorWord:
    """Factor a semigroup member into the generators by the Euclidean algorithm.

    Quotients of ``(d, b)`` peel off factors ``[[0,1],[1,q]] = A^(q-1) B A``.
    The terminal factor ``[[a_k,0],[c_k,1]]`` is ``A^c_k`` when ``a_k = 1``;
    when ``a_k = -1`` it is merged with the previous factor using
    ``[[0,1],[1,q]] [[-1,0],[c,1]] = (A^(q-2) B A)(B A^c)``.  Any ``A^-1``
    left by a quotient of 1 or a negative ``c_k`` cancels against a
    neighbouring factor after free reduction (``B`` is an involution).
    """
    if not in_semigroup(m):
        raise NotInSemigroup(f"matrix {m} does not map [0, 1] into itself")
    a, b, c, d = m.entries()
    if b == 0:
        if d < 0:
            a, c, d = -a, -c, -d
        return GeneratorWord("A" * c)
    if d < 0:
        a, b, c, d = -a, -b, -c, -d
    factors: List[int] = []
    while b != 0:
        quot = d // b
        factors.append(quot)
        a, b, c, d = c - quot * a, d - quot * b, a, b
    # now [[a, 0], [c, 1]] with a = +-1
    tokens: List[str] = []
    if a == 1:
        for quot in factors:
            tokens += ["A"] * (quot - 1) + ["B", "A"]
        tokens += _power(c)
    else:
        for quot in factors[:-1]:
            tokens += ["A"] * (quot - 1) + ["B", "A"]
        last = factors[-1]
        tokens += (["A"] * (last - 2) if last >= 2 else ["a"]) + ["B", "A", "B"] + _power(c)
    word = _free_reduce(tokens)
    if "a" in word:
        raise NotInSemigroup(f"matrix {m} does not factor over the semigroup generators")
    out = GeneratorWord("".join(word))
    if out.matrix() != m:
        raise ArithmeticError(f"factorization of {m} failed to round-trip")
    return out
