"""Folksodriven tag model: formal contexts, tags, clouds, similarity."""

from .clouds import TagCloud, build_tag_cloud, doc_similarity
from .context import FormalContext, derive_attributes, derive_objects
from .tags import (
    FolksodrivenTag,
    link_external_resource,
    make_fd_tag,
    tag_distance,
    tag_from_dict,
    tag_from_json,
    tag_to_dict,
    tag_to_json,
)
from .uri import validate_absolute_uri

__all__ = [
    "FormalContext",
    "FolksodrivenTag",
    "TagCloud",
    "build_tag_cloud",
    "derive_attributes",
    "derive_objects",
    "doc_similarity",
    "link_external_resource",
    "make_fd_tag",
    "tag_distance",
    "tag_from_dict",
    "tag_from_json",
    "tag_to_dict",
    "tag_to_json",
    "validate_absolute_uri",
]
