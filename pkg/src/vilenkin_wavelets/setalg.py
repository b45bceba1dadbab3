"""Exact algebra of cylinder subsets of the dual group.

A cylinder at resolution L pins every digit at positions <= L (finitely
many of them to nonzero values, the rest to zero) and leaves all finer
positions free; its Haar measure is exactly p**(-L).  Every set handled
here is a finite disjoint union of cylinders, which is closed under
boolean operations, lattice translations and dilations, so membership,
measure and almost-everywhere equality are all decided exactly.

Measures are p-adic rationals stored as (count, scale) with value
count * p**(-scale); no floating point is involved anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import (
    BaseMismatchError,
    DigitError,
    OverlapError,
    ResolutionCapError,
)
from .group import GroupElement, check_base, from_digits

#: Hard cap on cylinder resolutions; refinements past this raise.
MAX_RESOLUTION = 24

#: Cap on the number of cells a single refinement may produce.
MAX_REFINE_CELLS = 2_000_000

DigitMap = tuple[tuple[int, int], ...]


def _check_resolution(L: int, max_resolution: int | None = None) -> None:
    cap = MAX_RESOLUTION if max_resolution is None else max_resolution
    if L > cap:
        raise ResolutionCapError(f"resolution {L} exceeds the cap {cap}")


@dataclass(frozen=True, slots=True)
class Measure:
    """Exact p-adic rational count * p**(-scale), canonical (p does not divide count)."""

    count: int
    p: int
    scale: int

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("measures are nonnegative")
        if self.count == 0:
            if self.scale != 0:
                raise ValueError("zero measure must use scale 0")
        elif self.count % self.p == 0:
            raise ValueError("measure count must not be divisible by p")

    @staticmethod
    def make(count: int, p: int, scale: int) -> "Measure":
        """Normalize (count, scale) into canonical form."""
        if count == 0:
            return Measure(0, p, 0)
        while count % p == 0:
            count //= p
            scale -= 1
        return Measure(count, p, scale)

    @staticmethod
    def zero(p: int) -> "Measure":
        return Measure(0, p, 0)

    def as_fraction(self) -> Fraction:
        if self.scale >= 0:
            return Fraction(self.count, self.p**self.scale)
        return Fraction(self.count * self.p ** (-self.scale))

    def __float__(self) -> float:
        return float(self.as_fraction())

    def __add__(self, other: "Measure") -> "Measure":
        if self.p != other.p:
            raise BaseMismatchError("cannot add measures over different bases")
        scale = max(self.scale, other.scale)
        count = self.count * self.p ** (scale - self.scale) + other.count * self.p ** (
            scale - other.scale
        )
        return Measure.make(count, self.p, scale)

    def _coerce(self, other) -> Fraction:
        if isinstance(other, Measure):
            return other.as_fraction()
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        coerced = self._coerce(other)
        if coerced is NotImplemented:
            return NotImplemented
        return self.as_fraction() == coerced

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def __lt__(self, other) -> bool:
        return self.as_fraction() < self._coerce(other)

    def __le__(self, other) -> bool:
        return self.as_fraction() <= self._coerce(other)

    def __gt__(self, other) -> bool:
        return self.as_fraction() > self._coerce(other)

    def __ge__(self, other) -> bool:
        return self.as_fraction() >= self._coerce(other)

    def exact_string(self) -> str:
        """Render as e.g. '7*2^-3'; the printed exponent is -scale."""
        return f"{self.count}*{self.p}^{-self.scale}"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Measure({self.exact_string()})"


@dataclass(frozen=True, slots=True)
class Cylinder:
    """A single cylinder: resolution L plus the nonzero pinned digits."""

    p: int
    resolution: int
    digits: DigitMap  # sorted (position, digit), digit in [1, p), position <= L

    def __post_init__(self) -> None:
        check_base(self.p)
        last = None
        for pos, d in self.digits:
            if pos > self.resolution:
                raise DigitError(
                    f"fixed digit at position {pos} above resolution {self.resolution}"
                )
            if not 0 < d < self.p:
                raise DigitError(f"digit {d} out of range for base {self.p}")
            if last is not None and pos <= last:
                raise DigitError("digit positions must be strictly increasing")
            last = pos

    # -- basic structure -----------------------------------------------------

    def digit(self, pos: int) -> int:
        """Pinned digit at a position <= resolution (0 when unstored)."""
        if pos > self.resolution:
            raise DigitError(f"position {pos} is free at resolution {self.resolution}")
        for q, d in self.digits:
            if q == pos:
                return d
            if q > pos:
                break
        return 0

    def measure(self) -> Measure:
        return Measure.make(1, self.p, self.resolution)

    @property
    def min_fixed_position(self) -> int | None:
        """Lowest nonzero pinned position (None when all pinned digits are zero)."""
        return self.digits[0][0] if self.digits else None

    def sort_key(self) -> tuple:
        return (self.resolution, self.digits)

    # -- set relations ---------------------------------------------------------

    def relation(self, other: "Cylinder") -> str:
        """One of 'disjoint', 'equal', 'contains', 'within'.

        Cylinders intersect iff their pinned digits agree on the common
        pinned positions, in which case the coarser contains the finer.
        """
        a, b = (self, other) if self.resolution <= other.resolution else (other, self)
        da, db = a.digits, b.digits
        ra = a.resolution
        ia = ib = 0
        na, nb = len(da), len(db)
        while ia < na or ib < nb:
            pa = da[ia][0] if ia < na else None
            pb = db[ib][0] if ib < nb else None
            if pa is None or (pb is not None and pb < pa):
                # b pins a nonzero digit where a pins zero (if within range).
                if pb > ra:
                    break  # remaining b digits are in a's free tail
                return "disjoint"
            if pb is None or pa < pb:
                return "disjoint"  # a pins nonzero where b pins zero
            if da[ia][1] != db[ib][1]:
                return "disjoint"
            ia += 1
            ib += 1
        if self.resolution == other.resolution:
            return "equal"
        return "contains" if a is self else "within"

    def contains_point(self, x: GroupElement) -> bool:
        if x.p != self.p:
            raise BaseMismatchError("point and cylinder bases differ")
        for pos, d in self.digits:
            if x.digit(pos) != d:
                return False
        for pos, d in x.support():
            if pos <= self.resolution and self.digit(pos) != d:
                return False
        return True

    # -- transformations --------------------------------------------------------

    def refine_to(self, L: int) -> Iterator["Cylinder"]:
        """Split into the p**(L - resolution) sub-cylinders at resolution L."""
        if L < self.resolution:
            raise ResolutionCapError(
                f"cannot coarsen a cylinder from resolution {self.resolution} to {L}"
            )
        _check_resolution(L)
        span = L - self.resolution
        if span == 0:
            yield self
            return
        if self.p**span > MAX_REFINE_CELLS:
            raise ResolutionCapError(
                f"refining by {span} positions would produce {self.p**span} cells"
            )
        new_positions = range(self.resolution + 1, L + 1)
        for extra in itertools.product(range(self.p), repeat=span):
            tail = tuple(
                (pos, d) for pos, d in zip(new_positions, extra) if d
            )
            yield Cylinder(self.p, L, self.digits + tail)

    def translate(self, t: GroupElement) -> "Cylinder":
        """Digitwise shift by t.

        Digits of t above the resolution lie in the cylinder's free tail
        subgroup and are absorbed: the translated set is unchanged by
        them, so only positions at or below the resolution shift.
        """
        if t.p != self.p:
            raise BaseMismatchError("translator base differs")
        positions = {pos for pos, _ in self.digits}
        positions.update(pos for pos, _ in t.support() if pos <= self.resolution)
        new = []
        for pos in sorted(positions):
            d = (self.digit(pos) + t.digit(pos)) % self.p
            if d:
                new.append((pos, d))
        return Cylinder(self.p, self.resolution, tuple(new))

    def dilate(self, k: int) -> "Cylinder":
        """Apply the contracting shift k times: positions and resolution move by +k."""
        _check_resolution(self.resolution + k)
        return Cylinder(
            self.p, self.resolution + k, tuple((pos + k, d) for pos, d in self.digits)
        )

    def integer_part(self) -> GroupElement:
        """Lattice element read from the pinned digits at positions <= 0."""
        if self.resolution < 0:
            raise DigitError("integer part requires resolution >= 0")
        return from_digits(self.p, {pos: d for pos, d in self.digits if pos <= 0})

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "resolution": self.resolution,
            "digits": {str(pos): d for pos, d in self.digits},
        }

    @staticmethod
    def from_json(p: int, obj: dict) -> "Cylinder":
        digits = tuple(
            sorted((int(pos), int(d)) for pos, d in obj.get("digits", {}).items())
        )
        return Cylinder(p, int(obj["resolution"]), digits)


class PSet:
    """A finite disjoint union of cylinders in canonical merged, sorted form."""

    __slots__ = ("p", "cylinders")

    def __init__(self, p: int, cylinders: Iterable[Cylinder], *, validate: bool = True):
        check_base(p)
        cyls = tuple(cylinders)
        for c in cyls:
            if c.p != p:
                raise BaseMismatchError("cylinder base differs from set base")
        if validate:
            self._check_disjoint(cyls)
        merged = _merge_siblings(p, [(c.resolution, c.digits) for c in cyls])
        object.__setattr__(self, "p", p)
        object.__setattr__(
            self,
            "cylinders",
            tuple(Cylinder(p, res, digs) for res, digs in merged),
        )

    @staticmethod
    def _check_disjoint(cyls: tuple[Cylinder, ...]) -> None:
        for i, a in enumerate(cyls):
            for b in cyls[i + 1 :]:
                if a.relation(b) != "disjoint":
                    raise OverlapError(
                        f"cylinders overlap: {a.to_json()} and {b.to_json()}"
                    )

    def __setattr__(self, *args) -> None:  # pragma: no cover
        raise AttributeError("PSet is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PSet)
            and self.p == other.p
            and self.cylinders == other.cylinders
        )

    def __hash__(self) -> int:
        return hash((self.p, self.cylinders))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PSet(p={self.p}, {len(self.cylinders)} cylinders)"

    # -- structural queries ----------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.cylinders

    @property
    def max_resolution(self) -> int:
        """Finest cylinder resolution (0 for the empty set)."""
        return max((c.resolution for c in self.cylinders), default=0)

    @property
    def min_fixed_position(self) -> int | None:
        """Lowest nonzero pinned digit position across the union, if any."""
        positions = [
            c.min_fixed_position
            for c in self.cylinders
            if c.min_fixed_position is not None
        ]
        return min(positions) if positions else None

    def contains_point(self, x: GroupElement) -> bool:
        return any(c.contains_point(x) for c in self.cylinders)

    def measure(self) -> Measure:
        if self.is_empty:
            return Measure.zero(self.p)
        scale = max(c.resolution for c in self.cylinders)
        count = sum(self.p ** (scale - c.resolution) for c in self.cylinders)
        return Measure.make(count, self.p, scale)

    # -- refinement and cells ------------------------------------------------------

    def refine(self, L: int, *, allow_partial: bool = False) -> "PSet":
        """Same set with every cylinder split down to resolution L.

        Unless allow_partial is set, L must not be coarser than the
        finest cylinder already present.
        """
        if not allow_partial and not self.is_empty and L < self.max_resolution:
            raise ResolutionCapError(
                f"refinement target {L} is coarser than resolution {self.max_resolution}"
            )
        out: list[Cylinder] = []
        for c in self.cylinders:
            if c.resolution >= L:
                out.append(c)
            else:
                out.extend(c.refine_to(L))
        return PSet(self.p, out, validate=False)

    def cells_at(self, L: int) -> frozenset[DigitMap]:
        """Digit maps of the resolution-L refinement (requires L >= max resolution)."""
        if not self.is_empty and L < self.max_resolution:
            raise ResolutionCapError(
                f"cell resolution {L} is coarser than resolution {self.max_resolution}"
            )
        maps: set[DigitMap] = set()
        for c in self.cylinders:
            for piece in c.refine_to(L):
                maps.add(piece.digits)
        return frozenset(maps)

    @staticmethod
    def from_cells(p: int, L: int, maps: Iterable[DigitMap]) -> "PSet":
        """Rebuild a set from resolution-L digit maps (trusted disjoint)."""
        return PSet(
            p, (Cylinder(p, L, m) for m in maps), validate=False
        )

    # -- boolean algebra -------------------------------------------------------------
    #
    # Two cylinders are either disjoint or nested, so an intersection is
    # just the finer cylinder of each intersecting pair, and subtracting a
    # finer cylinder only splits along the chain of ancestors toward it.
    # No operation ever refines to a global common resolution.

    def _check_other(self, other: "PSet") -> None:
        if self.p != other.p:
            raise BaseMismatchError("sets live over different bases")

    def union(self, other: "PSet") -> "PSet":
        self._check_other(other)
        extra = other.difference(self)
        return PSet(self.p, self.cylinders + extra.cylinders, validate=False)

    def intersect(self, other: "PSet") -> "PSet":
        # A pair intersects iff the finer cylinder's pinned digits restrict
        # to the coarser one's, so hash lookups on truncated digit maps
        # find every intersecting pair without a quadratic scan.
        self._check_other(other)
        mine = _keys_by_resolution(self.cylinders)
        theirs = _keys_by_resolution(other.cylinders)
        out = []
        for b in other.cylinders:
            for r, keys in mine.items():
                if r <= b.resolution and _truncate(b.digits, r) in keys:
                    out.append(b)
                    break  # member cylinders are disjoint: at most one hit
        for a in self.cylinders:
            for r, keys in theirs.items():
                if r < a.resolution and _truncate(a.digits, r) in keys:
                    out.append(a)
                    break
        return PSet(self.p, out, validate=False)

    def difference(self, other: "PSet") -> "PSet":
        self._check_other(other)
        theirs = _keys_by_resolution(other.cylinders)
        own_resolutions = sorted({c.resolution for c in self.cylinders})
        inner: dict[int, dict] = {r: {} for r in own_resolutions}
        for b in other.cylinders:
            for r in own_resolutions:
                if r < b.resolution:
                    inner[r].setdefault(_truncate(b.digits, r), []).append(b)
        out = []
        for a in self.cylinders:
            swallowed = False
            for r, keys in theirs.items():
                if r <= a.resolution and _truncate(a.digits, r) in keys:
                    swallowed = True
                    break
            if swallowed:
                continue
            pieces = [a]
            for b in inner[a.resolution].get(a.digits, ()):
                pieces = [
                    shard
                    for piece in pieces
                    for shard in _cylinder_difference(piece, b)
                ]
            out.extend(pieces)
        return PSet(self.p, out, validate=False)

    def is_subset_ae(self, other: "PSet") -> bool:
        return self.difference(other).is_empty

    def ae_equal(self, other: "PSet") -> bool:
        """Cylinder sets are closed under the algebra, so a.e. equality is equality."""
        return self == other

    # -- group actions ----------------------------------------------------------------

    def translate(self, t: GroupElement) -> "PSet":
        """Translate by t; digits finer than a cylinder are absorbed by its tail."""
        if t.p != self.p:
            raise BaseMismatchError("translator base differs")
        return PSet(self.p, (c.translate(t) for c in self.cylinders), validate=False)

    def dilate(self, k: int) -> "PSet":
        """Apply the contracting shift k times; measure scales by p**(-k)."""
        return PSet(self.p, (c.dilate(k) for c in self.cylinders), validate=False)

    # -- serialization ------------------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.cylinders]

    @staticmethod
    def from_json(p: int, obj: list) -> "PSet":
        return PSet(p, (Cylinder.from_json(p, item) for item in obj))


def _truncate(digits: DigitMap, resolution: int) -> DigitMap:
    """Digits restricted to positions <= resolution (input sorted)."""
    i = len(digits)
    while i and digits[i - 1][0] > resolution:
        i -= 1
    return digits[:i]


def _keys_by_resolution(cylinders) -> dict[int, set]:
    out: dict[int, set] = {}
    for c in cylinders:
        out.setdefault(c.resolution, set()).add(c.digits)
    return out


def _cylinder_difference(a: Cylinder, b: Cylinder) -> list[Cylinder]:
    """a minus b as disjoint cylinders, splitting only toward b."""
    rel = a.relation(b)
    if rel == "disjoint":
        return [a]
    if rel in ("within", "equal"):
        return []
    # b sits strictly inside a: exactly one child of a contains it.
    out: list[Cylinder] = []
    for child in a.refine_to(a.resolution + 1):
        child_rel = child.relation(b)
        if child_rel == "disjoint":
            out.append(child)
        else:
            out.extend(_cylinder_difference(child, b))
    return out


def _merge_siblings(p: int, items: list[tuple[int, DigitMap]]) -> list[tuple[int, DigitMap]]:
    """Merge every complete family of p siblings into its parent, repeatedly."""
    pool = set(items)
    queue = list(pool)
    while queue:
        item = queue.pop()
        if item not in pool:
            continue
        res, digs = item
        base = tuple((pos, d) for pos, d in digs if pos != res)
        siblings = [
            (res, base if d == 0 else tuple(sorted(base + ((res, d),))))
            for d in range(p)
        ]
        if all(s in pool for s in siblings):
            for s in siblings:
                pool.discard(s)
            parent = (res - 1, base)
            pool.add(parent)
            queue.append(parent)
    return sorted(pool)


# -- distinguished sets ------------------------------------------------------------


def empty_set(p: int) -> PSet:
    return PSet(p, (), validate=False)


def unit_cell(p: int) -> PSet:
    """The dual unit subgroup: all digits at positions <= 0 are zero; measure 1."""
    return PSet(p, (Cylinder(p, 0, ()),), validate=False)


def theta_ball(p: int, m: int) -> PSet:
    """The contracted unit cell at depth m (all digits at positions <= m zero)."""
    return PSet(p, (Cylinder(p, m, ()),), validate=False)


def expanded_unit(p: int, m: int) -> PSet:
    """The expanded unit cell (all digits at positions <= -m zero); measure p**m."""
    return PSet(p, (Cylinder(p, -m, ()),), validate=False)


def annulus(p: int) -> PSet:
    """The shell between the once-expanded unit cell and the unit cell.

    Its contracting dilates partition the dual group minus the identity,
    which is what makes a single-shell covering check sufficient.
    """
    return PSet(
        p,
        tuple(Cylinder(p, 0, ((0, d),)) for d in range(1, p)),
        validate=False,
    )


def combine(a: PSet, b: PSet, mode: str) -> PSet:
    """Functional wrapper over union / intersect / difference."""
    if mode == "union":
        return a.union(b)
    if mode == "intersect":
        return a.intersect(b)
    if mode == "difference":
        return a.difference(b)
    raise ValueError(f"unknown combine mode {mode!r}")
