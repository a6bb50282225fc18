"""Folksodriven tags: a formal context bound to a resource URI.

A tag carries two readings of the context-resource relation: the explicit
cross-link set (every incidence pair paired with the resource) and a
4-component numeric feature vector (object count, attribute count,
incidence count, density) used for distance computations. Tag values are
immutable; linking an external resource returns a new tag.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace

from ..errors import DomainError
from .context import FormalContext, Pair
from .uri import validate_absolute_uri

CrossLink = tuple[Pair, str]


@dataclass(frozen=True)
class FolksodrivenTag:
    id: str
    context: FormalContext
    resource: str
    cross_links: frozenset[CrossLink]
    features: tuple[float, float, float, float]
    created_at: int
    external_resources: frozenset[str]


def make_fd_tag(
    ctx: FormalContext,
    resource: str,
    now: float,
    tag_id: str | None = None,
) -> FolksodrivenTag:
    """Build a tag over ``ctx`` bound to ``resource``.

    Features are (|objects|, |attributes|, |incidence|, density); the
    cross-link set pairs every incidence pair with the resource, so its
    cardinality always equals |incidence|.
    """
    validate_absolute_uri(resource)
    n_obj = len(ctx.objects)
    n_attr = len(ctx.attributes)
    n_inc = len(ctx.incidence)
    features = (
        float(n_obj),
        float(n_attr),
        float(n_inc),
        n_inc / (n_obj * n_attr),
    )
    return FolksodrivenTag(
        id=tag_id if tag_id is not None else uuid.uuid4().hex,
        context=ctx,
        resource=resource,
        cross_links=frozenset((pair, resource) for pair in ctx.incidence),
        features=features,
        created_at=int(now),
        external_resources=frozenset(),
    )


def tag_distance(a: FolksodrivenTag, b: FolksodrivenTag, p: float = 2.0) -> float:
    """Minkowski p-distance between the two feature vectors.

    p < 1 is refused: the triangle inequality fails there and the result
    would not be a metric.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    total = sum(abs(x - y) ** p for x, y in zip(a.features, b.features))
    return total ** (1.0 / p)


def link_external_resource(tag: FolksodrivenTag, uri: str) -> FolksodrivenTag:
    """Return a tag with ``uri`` added to its external resources.

    Idempotent: re-linking an already-present URI returns an equal tag.
    """
    validate_absolute_uri(uri)
    if uri in tag.external_resources:
        return tag
    return replace(tag, external_resources=tag.external_resources | {uri})


def tag_to_dict(tag: FolksodrivenTag) -> dict:
    """Canonical JSON-ready form: all set-valued fields sorted."""
    return {
        "id": tag.id,
        "objects": sorted(tag.context.objects),
        "attributes": sorted(tag.context.attributes),
        "incidence": sorted([t, d] for t, d in tag.context.incidence),
        "resource": tag.resource,
        "features": [float(x) for x in tag.features],
        "created_at": tag.created_at,
        "external_resources": sorted(tag.external_resources),
    }


def tag_to_json(tag: FolksodrivenTag) -> str:
    """Byte-deterministic serialization (fixed key order, compact separators)."""
    return json.dumps(tag_to_dict(tag), separators=(",", ":"), ensure_ascii=True)


def tag_from_dict(data: dict) -> FolksodrivenTag:
    ctx = FormalContext(
        objects=frozenset(data["objects"]),
        attributes=frozenset(data["attributes"]),
        incidence=frozenset((t, d) for t, d in data["incidence"]),
    )
    tag = make_fd_tag(
        ctx, data["resource"], data["created_at"], tag_id=data["id"]
    )
    for uri in data.get("external_resources", []):
        tag = link_external_resource(tag, uri)
    return tag


def tag_from_json(text: str) -> FolksodrivenTag:
    return tag_from_dict(json.loads(text))
