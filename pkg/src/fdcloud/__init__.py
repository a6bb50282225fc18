"""fdcloud: folksonomy-driven document annotation and job processing.

Subpackages:
    fd_core   -- formal contexts, folksodriven tags, clouds, similarity
    annotate  -- terminology matcher, filter pipeline, RDF emission
    docstore  -- content-addressed storage, inverted index, validation
    jobs      -- scheduler, simulated nodes, plugin health, metrics
    service   -- HTTP API, CLI, notifications
"""

__version__ = "0.1.0"
