"""Exact free-boson Fock space.

A basis state is a partition ``(a1 >= a2 >= ... >= ak)`` of positive
integers, standing for the product of creation operators with those
mode numbers applied to the vacuum (the empty partition).  States are
finite rational combinations of basis states and all arithmetic is
exact.

The single field obeys the commutation rule
``[h(m), h(n)] = m * delta(m + n, 0)``: negative modes create (append a
part), positive modes annihilate (remove a matching part, weighted by
the mode number times its multiplicity), and ``h(0)`` kills everything.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Partition",
    "make_partition",
    "weight",
    "FockVector",
    "h_apply",
    "partitions_of",
    "basis_of_weight",
    "basis_up_to",
    "weight_components",
    "graded_dim",
    "character_offset",
]

Partition = "tuple[int, ...]"


def make_partition(parts: Iterable[int]) -> tuple[int, ...]:
    """Canonicalize a multiset of positive parts into descending order."""
    out = tuple(sorted(parts, reverse=True))
    if out and out[-1] < 1:
        raise ValueError(f"parts must be positive integers, got {out}")
    return out


def weight(partition: tuple[int, ...]) -> int:
    return sum(partition)


class FockVector:
    """Finite rational combination of partition basis states.

    Immutable in practice: every operation returns a new vector, zero
    coefficients are never stored, and the empty vector is falsy.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, ...], Fraction] | None = None):
        data: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for part, coeff in terms.items():
                c = Fraction(coeff)
                if c:
                    data[tuple(part)] = c
        self._terms = data

    @classmethod
    def zero(cls) -> "FockVector":
        return cls()

    @classmethod
    def vacuum(cls, coeff: Fraction | int = 1) -> "FockVector":
        return cls({(): Fraction(coeff)})

    @classmethod
    def basis(cls, parts: Iterable[int]) -> "FockVector":
        return cls({make_partition(parts): Fraction(1)})

    def terms(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Stored terms, sorted by (weight, partition) for determinism."""
        return iter(sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0])))

    def coeff(self, parts: Iterable[int]) -> Fraction:
        return self._terms.get(make_partition(parts), Fraction(0))

    def scaled(self, c: Fraction | int) -> "FockVector":
        c = Fraction(c)
        if not c:
            return FockVector()
        out = FockVector()
        out._terms = {p: v * c for p, v in self._terms.items()}
        return out

    def __add__(self, other: "FockVector") -> "FockVector":
        if not isinstance(other, FockVector):
            return NotImplemented
        data = dict(self._terms)
        for p, v in other._terms.items():
            s = data.get(p, Fraction(0)) + v
            if s:
                data[p] = s
            else:
                data.pop(p, None)
        out = FockVector()
        out._terms = data
        return out

    def __neg__(self) -> "FockVector":
        return self.scaled(-1)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-other)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FockVector):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "FockVector(0)"
        bits = []
        for part, coeff in self.terms():
            label = "|" + ",".join(str(a) for a in part) + ">"
            bits.append(f"{coeff}*{label}")
        return "FockVector(" + " + ".join(bits) + ")"


def h_apply(n: int, v: FockVector) -> FockVector:
    """Apply the mode-``n`` field operator to ``v``.

    ``n < 0`` appends the part ``-n``; ``n > 0`` removes one copy of the
    part ``n`` from each state that has one, scaled by ``n`` times the
    multiplicity; ``n = 0`` acts as zero.
    """
    if n == 0:
        return FockVector()
    out: dict[tuple[int, ...], Fraction] = {}
    if n < 0:
        part_new = -n
        for part, coeff in v._terms.items():
            key = make_partition(part + (part_new,))
            s = out.get(key, Fraction(0)) + coeff
            if s:
                out[key] = s
            else:
                del out[key]
    else:
        for part, coeff in v._terms.items():
            count = part.count(n)
            if not count:
                continue
            removed = list(part)
            removed.remove(n)
            key = tuple(removed)
            s = out.get(key, Fraction(0)) + coeff * n * count
            if s:
                out[key] = s
            else:
                del out[key]
    res = FockVector()
    res._terms = out
    return res


@lru_cache(maxsize=None)
def partitions_of(n: int, max_part: int | None = None) -> tuple[tuple[int, ...], ...]:
    """All partitions of ``n`` with parts bounded by ``max_part``, descending."""
    if n < 0:
        return ()
    if n == 0:
        return ((),)
    if max_part is None or max_part > n:
        max_part = n
    out: list[tuple[int, ...]] = []
    for first in range(max_part, 0, -1):
        for rest in partitions_of(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def basis_of_weight(w: int) -> list[FockVector]:
    return [FockVector.basis(p) for p in partitions_of(w)]


def basis_up_to(w_cap: int) -> list[FockVector]:
    """Basis states of every weight from 0 through ``w_cap``."""
    out: list[FockVector] = []
    for w in range(w_cap + 1):
        out.extend(basis_of_weight(w))
    return out


def weight_components(v: FockVector) -> list[tuple[int, FockVector]]:
    """Split ``v`` into homogeneous pieces, ascending in weight."""
    buckets: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for part, coeff in v._terms.items():
        buckets.setdefault(sum(part), {})[part] = coeff
    out = []
    for w in sorted(buckets):
        piece = FockVector()
        piece._terms = buckets[w]
        out.append((w, piece))
    return out


@lru_cache(maxsize=None)
def _partition_count(n: int, max_part: int) -> int:
    if n == 0:
        return 1
    if n < 0 or max_part == 0:
        return 0
    # take a part of size max_part, or forbid that size entirely
    return _partition_count(n - max_part, max_part) + _partition_count(n, max_part - 1)


def graded_dim(n: int) -> int:
    """Dimension of the weight-``n`` graded piece (the partition count)."""
    if n < 0:
        raise ValueError("weight must be nonnegative")
    return _partition_count(n, n)


def character_offset() -> Fraction:
    """Exponent shift relating the graded dimension series to the eta function."""
    return Fraction(-1, 24)
