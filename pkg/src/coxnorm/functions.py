"""Finitely supported complex functions on a Coxeter group.

These are the symbols of convolution operators on l2 of the group: delta
masses combine by the group law, the star involution conjugates the
coefficient and inverts the support point, and the weighted norms measure
decay against word length.  Coefficients are double-precision complex;
exact zeros are pruned on construction and summation runs in ShortLex
order so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping

from .coxeter import CoxeterGroup, GroupElement, format_word, parse_word
from .errors import ContextMismatchError, ParseError


class GroupFunction:
    """f: G -> C with finite support, the symbol of a convolution operator."""

    __slots__ = ("group", "_terms")

    def __init__(self, group: CoxeterGroup, terms: Mapping[GroupElement, complex] | None = None):
        self.group = group
        out: dict[GroupElement, complex] = {}
        for g, c in (terms or {}).items():
            group.check_context(g.group)
            c = complex(c)
            if c != 0:
                out[g] = c
        self._terms = out

    @classmethod
    def zero(cls, group: CoxeterGroup) -> GroupFunction:
        return cls(group)

    @classmethod
    def delta(cls, group: CoxeterGroup, word, coeff: complex = 1.0) -> GroupFunction:
        """Point mass at the element given by a word, string or element."""
        if isinstance(word, GroupElement):
            g = group.reduce(word.word)
        else:
            g = group.element(word)
        return cls(group, {g: coeff})

    # -- views -------------------------------------------------------------

    def support(self) -> tuple[GroupElement, ...]:
        return tuple(sorted(self._terms, key=lambda g: g.sort_key))

    def items(self) -> list[tuple[GroupElement, complex]]:
        """Support/coefficient pairs in ShortLex order."""
        return [(g, self._terms[g]) for g in self.support()]

    def __getitem__(self, g: GroupElement) -> complex:
        return self._terms.get(g, 0j)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def support_size(self) -> int:
        return len(self._terms)

    def max_length(self) -> int:
        """Largest word length in the support (0 for the zero function)."""
        return max((g.length for g in self._terms), default=0)

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: GroupFunction) -> GroupFunction:
        if not isinstance(other, GroupFunction):
            return NotImplemented
        self.group.check_context(other.group)
        out = dict(self._terms)
        for g, c in other._terms.items():
            out[g] = out.get(g, 0j) + c
        return GroupFunction(self.group, out)

    def __sub__(self, other: GroupFunction) -> GroupFunction:
        if not isinstance(other, GroupFunction):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> GroupFunction:
        return GroupFunction(self.group, {g: -c for g, c in self._terms.items()})

    def scale(self, z: complex) -> GroupFunction:
        return GroupFunction(self.group, {g: c * z for g, c in self._terms.items()})

    def __truediv__(self, z) -> GroupFunction:
        return GroupFunction(self.group, {g: c / z for g, c in self._terms.items()})

    def __mul__(self, other):
        """Ring product: convolution with a function, scaling with a scalar."""
        if isinstance(other, GroupFunction):
            return self.convolve(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupFunction):
            return NotImplemented
        return self.group.signature == other.group.signature and self._terms == other._terms

    __hash__ = None  # dict-backed value type; not hashable

    # -- algebra ---------------------------------------------------------------

    def convolve(self, other: GroupFunction) -> GroupFunction:
        """(f * h)(y) = sum over x of f(x) h(x^-1 y).

        Accumulates over the left support in ShortLex order, so the result
        is reproducible bit for bit.
        """
        self.group.check_context(other.group)
        group = self.group
        acc: dict[GroupElement, complex] = {}
        for x, fx in self.items():
            for z, hz in other.items():
                y = group.multiply(x, z)
                acc[y] = acc.get(y, 0j) + fx * hz
        return GroupFunction(group, acc)

    def adjoint(self) -> GroupFunction:
        """The star involution: conjugate coefficients on inverted points."""
        group = self.group
        return GroupFunction(
            group,
            {group.inverse(g): c.conjugate() for g, c in self._terms.items()},
        )

    def pointwise(self, phi: Callable[[GroupElement], complex]) -> GroupFunction:
        """Coefficientwise multiplier g |-> phi(g) f(g)."""
        return GroupFunction(self.group, {g: complex(phi(g)) * c for g, c in self._terms.items()})

    # -- norms --------------------------------------------------------------

    def l1(self) -> float:
        return float(sum(abs(c) for _, c in self.items()))

    def l2(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for _, c in self.items()))

    def sobolev(self, k: int) -> float:
        """Length-weighted l2 norm: sqrt(sum |f(g)|^2 (1 + l(g))^(2k))."""
        if k < 0:
            raise ValueError("weight exponent k must be >= 0")
        return math.sqrt(
            sum(abs(c) ** 2 * (1 + g.length) ** (2 * k) for g, c in self.items())
        )

    def __repr__(self) -> str:
        terms = ", ".join(f"{g}: {c}" for g, c in self.items()[:4])
        more = "..." if self.support_size > 4 else ""
        return f"GroupFunction({{{terms}{more}}})"


def norms(f: GroupFunction, k: int) -> tuple[float, float, float]:
    """(l1, l2, length-weighted) norms of the symbol; the weighted norm at
    k = 0 is the plain l2 norm."""
    return (f.l1(), f.l2(), f.sobolev(k))


def exp_length(t: float) -> Callable[[GroupElement], float]:
    """The heat damping factor g |-> exp(-t * length(g))."""
    return lambda g: math.exp(-t * g.length)


def times_length(f: GroupFunction) -> GroupFunction:
    """The symbol of length multiplication: g |-> length(g) f(g)."""
    return f.pointwise(lambda g: float(g.length))


def parse_function(group: CoxeterGroup, text: str) -> GroupFunction:
    """Parse the function file format: one ``<word> <re> <im>`` per line.

    Words are reduced on load and coefficients of coinciding elements are
    summed.  Blank lines are ignored.
    """
    acc: dict[GroupElement, complex] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected '<word> <re> <im>'")
        g = group.reduce(parse_word(fields[0]))
        try:
            c = complex(float(fields[1]), float(fields[2]))
        except ValueError:
            raise ParseError(f"line {lineno}: bad coefficient {fields[1]!r} {fields[2]!r}") from None
        acc[g] = acc.get(g, 0j) + c
    return GroupFunction(group, acc)


def format_function(f: GroupFunction) -> str:
    """Inverse of :func:`parse_function`, terms in ShortLex order."""
    lines = [
        f"{format_word(g.word)} {c.real:.17g} {c.imag:.17g}"
        for g, c in f.items()
    ]
    return "\n".join(lines)
