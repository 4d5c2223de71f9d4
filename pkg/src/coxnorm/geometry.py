"""Reflection action on the root space of a Coxeter presentation.

The presentation data (rank r, bond orders m(i, j)) induces a symmetric
bilinear form B on V = R^r with unit diagonal and off-diagonal entries
-cos(pi / m(i, j)), taken as -1 for an infinite bond.  Generator i acts on
V by the reflection v |-> v - 2 B(alpha_i, v) alpha_i where alpha_i is the
i-th basis vector, and a word acts by composing its letters, leftmost
letter applied last.  Every vector a group word can produce from a basis
vector is a root: its coordinates all share one sign, and the roots
crossed along a reduced word are pairwise distinct.

When every bond order lies in {2, 3, inf} the off-diagonal entries of B
are half-integers, 2B is an integer matrix, and all root coordinates stay
integers, so this module runs on exact ints.  Otherwise coordinates are
doubles, sign tests carry a tolerance band of 1e-9, and root identity is
decided on a 1e-6 quantization grid under the assumption that genuinely
distinct roots stay at least 1e-3 apart in max-norm.  Any test landing
inside a band raises instead of guessing; a pair of stored roots breaking
the separation assumption is reported, never silently merged.  Desk-scale
word lengths keep coordinate growth far above these bands; pushing far
beyond that is the documented failure mode of float presentations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import ContextMismatchError, InvariantViolation, NumericAmbiguityError

if TYPE_CHECKING:
    from .coxeter import CoxeterMatrix, GroupElement

EXACT = "exact"
FLOAT = "float"

SIGN_TOL = 1e-9      # float-mode band for root sign tests
KEY_GRID = 1e-6      # quantization cell deciding root identity
SEPARATION = 1e-3    # distinct stored roots must differ by more (max-norm)

Coords = tuple


def _fmt_coord(c) -> str:
    if isinstance(c, int):
        return str(c)
    return format(float(c), ".17g")


@dataclass(frozen=True)
class RootVector:
    """A vector of V in simple-root coordinates (ints or floats)."""

    coords: Coords

    def __str__(self) -> str:
        return " ".join(_fmt_coord(c) for c in self.coords)

    def __repr__(self) -> str:
        return f"RootVector({self.coords!r})"


class BilinearForm:
    """The form B of a presentation together with the reflection action.

    ``mode`` is ``"exact"`` (integer arithmetic on 2B) or ``"float"``.
    Exact mode requires every off-diagonal entry of B to lie in
    {0, -1/2, -1}, i.e. every bond order in {2, 3, inf}.
    """

    __slots__ = ("matrix", "rank", "mode", "tol", "_twob", "_b")

    def __init__(self, matrix: CoxeterMatrix, mode: str | None = None):
        if mode is None:
            mode = EXACT if matrix.supports_exact else FLOAT
        if mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown scalar mode {mode!r}")
        if mode == EXACT and not matrix.supports_exact:
            raise ValueError(
                "exact mode needs every bond order in {2, 3, inf}; "
                "this presentation has others"
            )
        self.matrix = matrix
        self.rank = matrix.rank
        self.mode = mode
        self.tol = 0.0 if mode == EXACT else SIGN_TOL
        if mode == EXACT:
            # 2B is integral: diagonal 2, off-diagonal 0 / -1 / -2.
            off = {2: 0, 3: -1, math.inf: -2}
            self._twob = tuple(
                tuple(
                    2 if i == j else off[matrix.m(i, j)]
                    for j in range(1, self.rank + 1)
                )
                for i in range(1, self.rank + 1)
            )
            self._b = None
        else:
            self._twob = None
            self._b = tuple(
                tuple(
                    1.0
                    if i == j
                    else (-1.0 if matrix.m(i, j) == math.inf else -math.cos(math.pi / matrix.m(i, j)))
                    for j in range(1, self.rank + 1)
                )
                for i in range(1, self.rank + 1)
            )

    def simple_root(self, s: int) -> Coords:
        self._check_letter(s)
        one = 1 if self.mode == EXACT else 1.0
        zero = 0 if self.mode == EXACT else 0.0
        return tuple(one if j == s - 1 else zero for j in range(self.rank))

    def _check_letter(self, s: int) -> None:
        if not isinstance(s, int) or not 1 <= s <= self.rank:
            raise ValueError(f"generator index {s!r} out of range 1..{self.rank}")

    def reflect(self, s: int, v: Coords) -> Coords:
        """Apply the reflection of generator ``s``; only coordinate s moves."""
        i = s - 1
        if self.mode == EXACT:
            row = self._twob[i]
            c = sum(row[j] * v[j] for j in range(self.rank))
        else:
            row = self._b[i]
            c = 2.0 * sum(row[j] * v[j] for j in range(self.rank))
        out = list(v)
        out[i] = v[i] - c
        return tuple(out)

    def apply_word(self, word: Sequence[int], v: Coords) -> Coords:
        """Act by the word s_1 ... s_k: rightmost letter first, leftmost last."""
        for s in reversed(word):
            v = self.reflect(s, v)
        return v

    def evaluate(self, v: Coords, w: Coords):
        """B(v, w): a Fraction in exact mode, a float otherwise."""
        if self.mode == EXACT:
            total = sum(
                v[i] * sum(self._twob[i][j] * w[j] for j in range(self.rank))
                for i in range(self.rank)
            )
            return Fraction(total, 2)
        return float(
            sum(
                v[i] * sum(self._b[i][j] * w[j] for j in range(self.rank))
                for i in range(self.rank)
            )
        )

    def sign(self, v: Coords) -> int:
        """+1 for a positive root, -1 for a negative one.

        Mixed signs beyond tolerance break the sign-coherence invariant;
        a test inside the band cannot be certified and raises.
        """
        hi = max(v)
        lo = min(v)
        pos = hi > self.tol
        neg = lo < -self.tol
        if pos and neg:
            raise InvariantViolation(
                f"sign-incoherent root: coordinates {v} mix signs beyond tolerance"
            )
        if pos:
            return 1
        if neg:
            return -1
        if self.mode == EXACT:
            raise InvariantViolation("zero vector has no root sign")
        raise NumericAmbiguityError(
            f"root sign test inside the {self.tol:g} tolerance band: {v}"
        )

    def root_key(self, v: Coords) -> tuple:
        """Hashable identity key: exact coords, or the 1e-6 grid cell."""
        if self.mode == EXACT:
            return v
        return tuple(round(c / KEY_GRID) for c in v)


def _max_diff(u: Coords, v: Coords) -> float:
    return max(abs(a - b) for a, b in zip(u, v))


class RootSet:
    """Distinct roots keyed by quantized coordinates, insertion-ordered.

    Float-mode guards: two inserts landing in one grid cell must agree to
    1e-9, and stored roots in different cells must stay more than 1e-3
    apart in max-norm.  Violations raise; nothing is merged silently.
    """

    def __init__(self, form: BilinearForm):
        self.form = form
        self._cells: dict[tuple, Coords] = {}

    def add(self, v: Coords) -> bool:
        """Insert ``v``; False when it duplicates a stored root."""
        key = self.form.root_key(v)
        stored = self._cells.get(key)
        if stored is not None:
            if self.form.mode == FLOAT and _max_diff(stored, v) > SIGN_TOL:
                raise NumericAmbiguityError(
                    f"two distinct roots share a quantization cell: {stored} vs {v}"
                )
            return False
        if self.form.mode == FLOAT:
            for other in self._cells.values():
                if _max_diff(other, v) <= SEPARATION:
                    raise NumericAmbiguityError(
                        f"roots in different cells closer than {SEPARATION:g}: "
                        f"{other} vs {v}"
                    )
        self._cells[key] = v
        return True

    def keys(self) -> set:
        return set(self._cells)

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self):
        return iter(self._cells.values())


def apply_word(form: BilinearForm, word: Iterable[int], v: RootVector | Coords) -> RootVector:
    """sigma(s_1 ... s_k) applied to ``v`` (leftmost letter applied last)."""
    word = tuple(word)
    for s in word:
        form._check_letter(s)
    coords = v.coords if isinstance(v, RootVector) else tuple(v)
    return RootVector(form.apply_word(word, coords))


def is_left_descent(s: int, g: GroupElement) -> bool:
    """True iff multiplying by generator ``s`` on the left shortens ``g``.

    Root criterion: the inverse of ``g`` must send alpha_s negative.
    """
    form = g.group.form
    form._check_letter(s)
    image = form.apply_word(tuple(reversed(g.word)), form.simple_root(s))
    return form.sign(image) < 0


def crossing_roots(g: GroupElement) -> tuple[Coords, ...]:
    """Raw coordinates of the walls crossed along the canonical word of g.

    The i-th entry is the image of alpha_{w_i} under the length-(i-1)
    prefix of the word; each must come out a positive root.
    """
    form = g.group.form
    word = g.word
    out = []
    for i, s in enumerate(word):
        beta = form.apply_word(word[:i], form.simple_root(s))
        if form.sign(beta) < 0:
            raise InvariantViolation(
                f"crossing root {i} of {g} came out negative; word not reduced?"
            )
        out.append(beta)
    return tuple(out)


def inversion_set(g: GroupElement) -> tuple[RootVector, ...]:
    """Positive roots sent negative by the inverse of g, in crossing order.

    Pairwise distinct, and exactly length(g) of them.
    """
    rs = RootSet(g.group.form)
    roots = crossing_roots(g)
    for beta in roots:
        if not rs.add(beta):
            raise InvariantViolation(
                f"duplicate crossing root along the reduced word of {g}"
            )
    return tuple(RootVector(beta) for beta in roots)


def crossing_distance(g: GroupElement, h: GroupElement) -> int:
    """Number of walls separating g from h: |N(g) symdiff N(h)|.

    Always equals the word-metric distance length(g^-1 h); a mismatch is a
    hard invariant failure.
    """
    group = g.group
    group.check_context(h.group)
    ng = RootSet(group.form)
    for beta in crossing_roots(g):
        ng.add(beta)
    nh = RootSet(group.form)
    for beta in crossing_roots(h):
        nh.add(beta)
    count = len(ng.keys() ^ nh.keys())
    expected = group.multiply(group.inverse(g), h).length
    if count != expected:
        raise InvariantViolation(
            f"wall-crossing count {count} disagrees with word metric {expected} "
            f"for g={g}, h={h}"
        )
    return expected
