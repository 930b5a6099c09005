"""Exact-rational probability distributions over tagged atom universes, and the
total-variation / Hausdorff metrics between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import UniverseMismatch

__all__ = [
    "Universe",
    "Distribution",
    "DistributionSet",
    "tv_distance",
    "directed_hausdorff",
    "hausdorff",
    "format_fraction",
    "parse_fraction",
]


def format_fraction(q: Fraction) -> str:
    """Lowest-terms ``num/den``; integers keep an explicit ``/1``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def atom_key(atom: Hashable) -> str:
    key = getattr(atom, "key", None)
    return key() if callable(key) else str(atom)


@dataclass(frozen=True)
class Universe:
    """Tag of an atom space: statistic kind plus whichever of d, k, r it depends on."""

    kind: str
    d: int | None = None
    k: int | None = None
    r: int | None = None

    def to_json(self) -> dict[str, Any]:
        return {name: getattr(self, name) for name in ("kind", "d", "k", "r") if getattr(self, name) is not None}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> Universe:
        return cls(obj["kind"], obj.get("d"), obj.get("k"), obj.get("r"))

    def parse_atom(self, key: str):
        from .canonical import BallCode, CherryType, StarType

        parser: Callable[[str], Any] = {
            "tau": BallCode.from_hex,
            "sigma": StarType.from_key,
            "chi": CherryType.from_key,
        }.get(self.kind, str)
        return parser(key)


class Distribution:
    """Finitely supported probability vector with exact masses summing to one.

    Zero-mass atoms are dropped; atoms are kept sorted by their string key so that
    equality, hashing and serialization are deterministic.
    """

    __slots__ = ("universe", "_masses", "_hash")

    def __init__(self, universe: Universe, masses: Mapping[Hashable, Fraction | int], *, check: bool = True):
        items = []
        for atom, p in masses.items():
            p = Fraction(p)
            if p < 0:
                raise ValueError(f"negative mass {p} on atom {atom_key(atom)}")
            if p:
                items.append((atom_key(atom), atom, p))
        items.sort(key=lambda t: t[0])
        if check and sum((p for _, _, p in items), Fraction(0)) != 1:
            raise ValueError("masses do not sum to 1")
        self.universe = universe
        self._masses = {atom: p for _, atom, p in items}
        self._hash: int | None = None

    @classmethod
    def from_counts(cls, universe: Universe, counts: Mapping[Hashable, int], total: int | None = None) -> Distribution:
        total = sum(counts.values()) if total is None else total
        return cls(universe, {a: Fraction(c, total) for a, c in counts.items()})

    @classmethod
    def point(cls, universe: Universe, atom: Hashable) -> Distribution:
        return cls(universe, {atom: Fraction(1)})

    def __getitem__(self, atom: Hashable) -> Fraction:
        return self._masses.get(atom, Fraction(0))

    def __contains__(self, atom: Hashable) -> bool:
        return atom in self._masses

    def __len__(self) -> int:
        return len(self._masses)

    def __iter__(self):
        return iter(self._masses)

    def items(self):
        return self._masses.items()

    def atoms(self) -> list:
        return list(self._masses)

    def as_dict(self) -> dict:
        return dict(self._masses)

    def mass(self, predicate: Callable[[Any], bool]) -> Fraction:
        return sum((p for a, p in self._masses.items() if predicate(a)), Fraction(0))

    def pushforward(self, fn: Callable[[Any], Any], universe: Universe) -> Distribution:
        """Image law under ``fn``. ``fn`` may return an atom or a Distribution (a kernel)."""
        out: dict[Hashable, Fraction] = {}
        for atom, p in self._masses.items():
            image = fn(atom)
            if isinstance(image, Distribution):
                for b, q in image.items():
                    out[b] = out.get(b, Fraction(0)) + p * q
            else:
                out[image] = out.get(image, Fraction(0)) + p
        return Distribution(universe, out)

    def _signature(self) -> tuple:
        return (self.universe, tuple((atom_key(a), p) for a, p in self._masses.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.universe == other.universe and self._masses == other._masses

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._signature())
        return self._hash

    def sort_key(self) -> tuple:
        return tuple((atom_key(a), p) for a, p in self._masses.items())

    def __repr__(self) -> str:
        body = ", ".join(f"{atom_key(a)}: {format_fraction(p)}" for a, p in self._masses.items())
        return f"Distribution({self.universe.kind}; {{{body}}})"

    def to_json(self) -> dict[str, Any]:
        return {
            "universe": self.universe.to_json(),
            "atoms": {atom_key(a): format_fraction(p) for a, p in self._masses.items()},
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> Distribution:
        universe = Universe.from_json(obj["universe"])
        return cls(universe, {universe.parse_atom(k): parse_fraction(v) for k, v in obj["atoms"].items()})


@dataclass(frozen=True)
class DistributionSet:
    """Deduplicated finite set of distributions over one universe.

    ``witnesses[i]`` is a coloring realizing ``members[i]`` (or None when unknown).
    """

    universe: Universe
    members: tuple[Distribution, ...]
    witnesses: tuple[Any, ...] = ()
    mode: str = "exact"
    _index: dict = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        for mu in self.members:
            if mu.universe != self.universe:
                raise UniverseMismatch(f"member over {mu.universe} in a set over {self.universe}")
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate members")
        if self.witnesses and len(self.witnesses) != len(self.members):
            raise ValueError("one witness per member required")
        object.__setattr__(self, "_index", {mu: i for i, mu in enumerate(self.members)})

    @classmethod
    def build(cls, universe: Universe, pairs: Iterable[tuple[Distribution, Any]], mode: str = "exact") -> DistributionSet:
        """Deduplicate ``(distribution, witness)`` pairs, keeping the first witness of each member."""
        seen: dict[Distribution, Any] = {}
        for mu, w in pairs:
            if mu not in seen:
                seen[mu] = w
        order = sorted(seen, key=Distribution.sort_key)
        return cls(universe, tuple(order), tuple(seen[mu] for mu in order), mode)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, mu: object) -> bool:
        return mu in self._index

    def witness_for(self, mu: Distribution):
        return self.witnesses[self._index[mu]] if self.witnesses else None

    def issubset(self, other: DistributionSet) -> bool:
        return all(mu in other for mu in self.members)

    def map(self, fn: Callable[[Distribution], Distribution], universe: Universe) -> DistributionSet:
        return DistributionSet.build(universe, ((fn(mu), w) for mu, w in self._pairs()), self.mode)

    def _pairs(self):
        ws = self.witnesses or (None,) * len(self.members)
        return zip(self.members, ws)

    def to_json(self) -> dict[str, Any]:
        return {
            "universe": self.universe.to_json(),
            "members": [mu.to_json() for mu in self.members],
            "witnesses": [list(getattr(w, "colors", w)) if w is not None else None for w in self.witnesses],
            "mode": self.mode,
        }


def _check_universe(a: Universe, b: Universe) -> None:
    if a != b:
        raise UniverseMismatch(f"{a} vs {b}")


def tv_distance(mu: Distribution, nu: Distribution) -> Fraction:
    """Half the L1 distance, exact."""
    _check_universe(mu.universe, nu.universe)
    total = Fraction(0)
    for a, p in mu.items():
        total += abs(p - nu[a])
    for a, q in nu.items():
        if a not in mu:
            total += q
    return total / 2


def _members(A) -> Sequence[Distribution]:
    members = A.members if isinstance(A, DistributionSet) else tuple(A)
    if not members:
        raise ValueError("Hausdorff distance needs non-empty sets")
    return members


def directed_hausdorff(A, B) -> tuple[Fraction, int]:
    """``max_{mu in A} min_{nu in B} tv(mu, nu)`` and the index in A attaining it."""
    As, Bs = _members(A), _members(B)
    _check_universe(As[0].universe, Bs[0].universe)
    B_index = set(Bs)
    worst, arg = Fraction(-1), 0
    for i, mu in enumerate(As):
        if mu in B_index:
            best = Fraction(0)
        else:
            best = min(tv_distance(mu, nu) for nu in Bs)
        if best > worst:
            worst, arg = best, i
    return worst, arg


def hausdorff(A, B) -> Fraction:
    """Hausdorff distance between two finite sets of distributions under total variation."""
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])
