"""Formal contexts and their derivation operators.

A formal context is a triple (objects, attributes, incidence) where the
incidence relation records which object carries which attribute. The two
derivation operators map an object set to the attributes shared by all of
its members and back; together they form an antitone Galois connection,
which is what makes closures (extent/intent round trips) well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..errors import DomainError, ValidationError

Pair = tuple[str, str]


@dataclass(frozen=True)
class FormalContext:
    """Immutable (objects, attributes, incidence) triple.

    ``incidence`` is a set of (object, attribute) pairs; every pair must
    reference declared members, and both carrier sets must be non-empty.
    """

    objects: frozenset[str]
    attributes: frozenset[str]
    incidence: frozenset[Pair]

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", frozenset(self.objects))
        object.__setattr__(self, "attributes", frozenset(self.attributes))
        object.__setattr__(
            self, "incidence", frozenset((t, d) for t, d in self.incidence)
        )
        if not self.objects:
            raise ValidationError("context has no objects")
        if not self.attributes:
            raise ValidationError("context has no attributes")
        for t, d in self.incidence:
            if t not in self.objects:
                raise ValidationError(f"incidence references unknown object {t!r}")
            if d not in self.attributes:
                raise ValidationError(f"incidence references unknown attribute {d!r}")

    @property
    def density(self) -> float:
        return len(self.incidence) / (len(self.objects) * len(self.attributes))


def derive_attributes(ctx: FormalContext, objs: Iterable[str]) -> set[str]:
    """Attributes carried by every object in ``objs``.

    The empty set derives to all attributes (vacuous universal
    quantifier), which is what makes the Galois connection total.
    """
    objs = set(objs)
    for t in objs:
        if t not in ctx.objects:
            raise DomainError(f"unknown object id {t!r}")
    if not objs:
        return set(ctx.attributes)
    rows = {t: set() for t in objs}
    for t, d in ctx.incidence:
        if t in rows:
            rows[t].add(d)
    common = set.intersection(*rows.values())
    return common


def derive_objects(ctx: FormalContext, attrs: Iterable[str]) -> set[str]:
    """Objects carrying every attribute in ``attrs`` (dual operator)."""
    attrs = set(attrs)
    for d in attrs:
        if d not in ctx.attributes:
            raise DomainError(f"unknown attribute {d!r}")
    if not attrs:
        return set(ctx.objects)
    cols = {d: set() for d in attrs}
    for t, d in ctx.incidence:
        if d in cols:
            cols[d].add(t)
    return set.intersection(*cols.values())
