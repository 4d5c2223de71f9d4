"""Coxeter presentations, canonical words, and word-metric balls.

A presentation is the symmetric bond-order data m(i, j) on 1-based
generator indices; every generator squares to the identity and (s t) has
order m(s, t).  A group element is stored as its ShortLex-least reduced
word, which makes element equality word equality and keeps the whole
group layer free of numeric content.

Reduction walks the input word left to right keeping a reduced prefix.
Appending a letter either extends the prefix (its root image stays
positive) or, by the exchange property, deletes the unique earlier letter
whose crossing root matches the negated image.  The ShortLex form then
comes from greedily extracting the smallest left descent.  All sign
decisions ride on the reflection action in :mod:`coxnorm.geometry`, so
presentations with bond orders in {2, 3, inf} reduce in exact integer
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import BallCapExceeded, ContextMismatchError, InvariantViolation, NumericAmbiguityError, ParseError
from .geometry import EXACT, FLOAT, KEY_GRID, BilinearForm

INFINITE = math.inf

DEFAULT_BALL_CAP = 200_000

Word = tuple[int, ...]


@dataclass(frozen=True)
class CoxeterMatrix:
    """Bond orders of a presentation: full symmetric table, diagonal 1.

    Off-diagonal entries are ints >= 2 or ``INFINITE``.
    """

    rank: int
    orders: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 1:
            raise ValueError("rank must be a positive integer")
        if len(self.orders) != self.rank or any(len(r) != self.rank for r in self.orders):
            raise ValueError("orders must be a rank x rank table")
        for i in range(self.rank):
            if self.orders[i][i] != 1:
                raise ValueError("diagonal bond orders must be 1")
            for j in range(self.rank):
                v = self.orders[i][j]
                if v != self.orders[j][i]:
                    raise ValueError("bond orders must be symmetric")
                if i != j and not (v == INFINITE or (isinstance(v, int) and v >= 2)):
                    raise ValueError(
                        f"bond order m({i + 1},{j + 1}) = {v!r} must be an "
                        "integer >= 2 or INFINITE"
                    )

    @classmethod
    def from_orders(cls, rank: int, pairs: Mapping[tuple[int, int], float]) -> CoxeterMatrix:
        """Build from ``{(i, j): m}`` over unordered 1-based pairs, i != j."""
        table = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            table[i][i] = 1
        seen = set()
        for (i, j), v in pairs.items():
            if i == j or not (1 <= i <= rank and 1 <= j <= rank):
                raise ValueError(f"bad generator pair ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"pair {key} given twice")
            seen.add(key)
            table[i - 1][j - 1] = table[j - 1][i - 1] = v
        expected = rank * (rank - 1) // 2
        if len(seen) != expected:
            raise ValueError(f"need all {expected} unordered pairs, got {len(seen)}")
        return cls(rank, tuple(tuple(row) for row in table))

    def m(self, i: int, j: int) -> float:
        return self.orders[i - 1][j - 1]

    @property
    def supports_exact(self) -> bool:
        """True when every bond order is 2, 3 or infinite, so the form
        entries lie in {0, -1/2, -1} and integer root arithmetic applies."""
        return all(
            self.orders[i][j] in (2, 3, INFINITE)
            for i in range(self.rank)
            for j in range(i + 1, self.rank)
        )

    @classmethod
    def parse(cls, text: str) -> CoxeterMatrix:
        """Parse the group file format.

        One statement per line: ``rank <r>`` first, then exactly one
        ``m <i> <j> <v>`` line per unordered pair i < j, where v is an
        integer >= 2 or the token ``inf``.  Blank lines are ignored.
        """
        rank = None
        pairs: dict[tuple[int, int], float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split()
            if fields[0] == "rank":
                if rank is not None:
                    raise ParseError(f"line {lineno}: rank given twice")
                if len(fields) != 2:
                    raise ParseError(f"line {lineno}: expected 'rank <r>'")
                try:
                    rank = int(fields[1])
                except ValueError:
                    raise ParseError(f"line {lineno}: rank {fields[1]!r} is not an integer") from None
                if rank < 1:
                    raise ParseError(f"line {lineno}: rank must be >= 1")
            elif fields[0] == "m":
                if rank is None:
                    raise ParseError(f"line {lineno}: 'm' before 'rank'")
                if len(fields) != 4:
                    raise ParseError(f"line {lineno}: expected 'm <i> <j> <v>'")
                try:
                    i, j = int(fields[1]), int(fields[2])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad generator indices") from None
                if not (1 <= i <= rank and 1 <= j <= rank) or i == j:
                    raise ParseError(f"line {lineno}: bad generator pair ({i}, {j})")
                if fields[3] == "inf":
                    v: float = INFINITE
                else:
                    try:
                        v = int(fields[3])
                    except ValueError:
                        raise ParseError(
                            f"line {lineno}: bond order {fields[3]!r} is not an integer or 'inf'"
                        ) from None
                    if v < 2:
                        raise ParseError(f"line {lineno}: bond order must be >= 2")
                key = (min(i, j), max(i, j))
                if key in pairs:
                    raise ParseError(f"line {lineno}: pair {key} given twice")
                pairs[key] = v
            else:
                raise ParseError(f"line {lineno}: unknown statement {fields[0]!r}")
        if rank is None:
            raise ParseError("missing 'rank' statement")
        expected = rank * (rank - 1) // 2
        if len(pairs) != expected:
            raise ParseError(f"need all {expected} unordered pairs, got {len(pairs)}")
        try:
            return cls.from_orders(rank, pairs)
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def parse_word(text: str) -> Word:
    """Parse ``e`` or a dash-separated list of 1-based indices."""
    text = text.strip()
    if text == "e":
        return ()
    if not text:
        raise ParseError("empty word string; the identity is written 'e'")
    out = []
    for piece in text.split("-"):
        try:
            s = int(piece)
        except ValueError:
            raise ParseError(f"bad generator index {piece!r} in word {text!r}") from None
        if s < 1:
            raise ParseError(f"generator index {s} must be >= 1")
        out.append(s)
    return tuple(out)


def format_word(word: Word) -> str:
    return "-".join(str(s) for s in word) if word else "e"


class GroupElement:
    """A group element as its ShortLex-least reduced word.

    Instances come out of :class:`CoxeterGroup`; the constructor trusts
    its word to be canonical already.
    """

    __slots__ = ("group", "word")

    def __init__(self, group: CoxeterGroup, word: Word):
        self.group = group
        self.word = word

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sort_key(self) -> tuple[int, Word]:
        return (len(self.word), self.word)

    def inverse(self) -> GroupElement:
        return self.group.inverse(self)

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group.multiply(self, other)

    def __invert__(self) -> GroupElement:
        return self.group.inverse(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.word == other.word and self.group.signature == other.group.signature

    def __hash__(self) -> int:
        return hash(self.word)

    def __lt__(self, other: GroupElement) -> bool:
        self.group.check_context(other.group)
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return format_word(self.word)

    def __repr__(self) -> str:
        return f"GroupElement({format_word(self.word)})"


@dataclass(frozen=True)
class Ball:
    """All elements of length <= radius, in ShortLex order."""

    radius: int
    elements: tuple[GroupElement, ...]
    sphere_sizes: tuple[int, ...]

    @property
    def cumulative_sizes(self) -> tuple[int, ...]:
        out = []
        total = 0
        for size in self.sphere_sizes:
            total += size
            out.append(total)
        return tuple(out)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements)


class CoxeterGroup:
    """A presentation together with its reduction engine.

    Immutable after construction; all operations are pure, so instances
    are safe to share across threads.
    """

    def __init__(self, matrix: CoxeterMatrix, mode: str | None = None):
        self.matrix = matrix
        self.form = BilinearForm(matrix, mode)
        self._ball_cache: dict[int, Ball] = {}

    @property
    def rank(self) -> int:
        return self.matrix.rank

    @property
    def mode(self) -> str:
        return self.form.mode

    @cached_property
    def signature(self) -> tuple:
        """Value identity of the context: presentation plus scalar mode."""
        return (self.matrix.orders, self.form.mode)

    def check_context(self, other: CoxeterGroup) -> None:
        if self.signature != other.signature:
            raise ContextMismatchError(
                "operands belong to different group presentations"
            )

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    def generator(self, i: int) -> GroupElement:
        self.form._check_letter(i)
        return GroupElement(self, (i,))

    # -- reduction engine ------------------------------------------------

    def _check_word(self, word: Iterable[int]) -> Word:
        word = tuple(word)
        for s in word:
            self.form._check_letter(s)
        return word

    def _match_indices(self, word: list[int], target) -> list[int]:
        """Indices i with crossing root of letter i equal to ``target``.

        Scans forward pulling the target back through the prefix, so each
        comparison is against a plain basis vector.
        """
        form = self.form
        exact = form.mode == EXACT
        matches = []
        u = target
        for i, r in enumerate(word):
            alpha = form.simple_root(r)
            if exact:
                hit = u == alpha
            else:
                hit = max(abs(a - b) for a, b in zip(u, alpha)) <= KEY_GRID
            if hit:
                matches.append(i)
            u = form.reflect(r, u)
        return matches

    def _delete_crossing(self, word: list[int], target) -> None:
        matches = self._match_indices(word, target)
        if len(matches) == 1:
            del word[matches[0]]
            return
        if self.form.mode == FLOAT:
            raise NumericAmbiguityError(
                f"exchange deletion matched {len(matches)} letters in {word}"
            )
        raise InvariantViolation(
            f"exchange deletion matched {len(matches)} letters in {word}"
        )

    def _append_letter(self, word: list[int], s: int) -> None:
        """Right-multiply the reduced ``word`` by generator ``s`` in place."""
        form = self.form
        image = form.apply_word(word, form.simple_root(s))
        if form.sign(image) > 0:
            word.append(s)
        else:
            negated = tuple(-c for c in image)
            self._delete_crossing(word, negated)

    def _reduce_scan(self, word: Word) -> list[int]:
        out: list[int] = []
        for s in word:
            self._append_letter(out, s)
        return out

    def _left_descent_of_word(self, word: list[int]) -> int:
        """Smallest generator shortening the word from the left."""
        form = self.form
        for s in range(1, self.rank + 1):
            v = form.simple_root(s)
            for letter in word:
                v = form.reflect(letter, v)
            if form.sign(v) < 0:
                return s
        raise InvariantViolation(f"nonempty reduced word {word} has no left descent")

    def _shortlex(self, word: list[int]) -> Word:
        """Canonicalize a reduced word by greedy left-descent extraction."""
        out: list[int] = []
        cur = list(word)
        while cur:
            s = self._left_descent_of_word(cur)
            out.append(s)
            self._delete_crossing(cur, self.form.simple_root(s))
        return tuple(out)

    # -- public operations -----------------------------------------------

    def reduce(self, word: Iterable[int]) -> GroupElement:
        """Canonical element represented by an arbitrary word."""
        word = self._check_word(word)
        return GroupElement(self, self._shortlex(self._reduce_scan(word)))

    def element(self, word: Iterable[int] | str) -> GroupElement:
        """Convenience: ``reduce`` accepting the dash/`e` string form too."""
        if isinstance(word, str):
            word = parse_word(word)
        return self.reduce(word)

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self.check_context(a.group)
        self.check_context(b.group)
        return GroupElement(self, self._shortlex(self._reduce_scan(a.word + b.word)))

    def inverse(self, a: GroupElement) -> GroupElement:
        self.check_context(a.group)
        # generators are involutions, so the reversed word is reduced
        return GroupElement(self, self._shortlex(list(reversed(a.word))))

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
        """Elements of length <= radius, ShortLex sorted, with sphere sizes."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        cached = self._ball_cache.get(radius)
        if cached is not None:
            if len(cached) > cap:
                raise BallCapExceeded(
                    f"ball of radius {radius} has {len(cached)} elements, cap is {cap}"
                )
            return cached
        elements = [self.identity]
        sizes = [1]
        seen = {()}
        current = [self.identity]
        for r in range(1, radius + 1):
            sphere: list[GroupElement] = []
            for g in current:
                for s in range(1, self.rank + 1):
                    word = list(g.word)
                    self._append_letter(word, s)
                    if len(word) != g.length + 1:
                        continue
                    canonical = self._shortlex(word)
                    if canonical in seen:
                        continue
                    seen.add(canonical)
                    sphere.append(GroupElement(self, canonical))
                    if len(seen) > cap:
                        raise BallCapExceeded(
                            f"ball of radius {radius} exceeds cap {cap} "
                            f"(already {len(seen)} elements at radius {r})"
                        )
            sphere.sort(key=lambda el: el.sort_key)
            elements.extend(sphere)
            sizes.append(len(sphere))
            current = sphere
        ball = Ball(radius, tuple(elements), tuple(sizes))
        self._ball_cache[radius] = ball
        return ball

    def __repr__(self) -> str:
        return f"CoxeterGroup(rank={self.rank}, mode={self.mode})"
