"""Python bindings for the boat annotation core.

Sentences are plain dicts shaped like the HTTP API's sentence documents, and
any function that takes a sentence also accepts a CoNLL-U block string.
Domain failures raise :class:`BoatError`, whose ``code`` matches the API
envelope code (``"CYCLIC_GRAPH"``, ``"REVISION_CONFLICT"`` and so on).
"""

from ._core import (
    BoatError,
    Service,
    Store,
    cohen_kappa,
    join,
    layout,
    parse,
    render_svg,
    search,
    serialize,
    split,
    validate,
)

BoatError.code = property(lambda self: self.args[0])
BoatError.details = property(lambda self: self.args[2] if len(self.args) > 2 else {})
BoatError.__str__ = lambda self: f"{self.args[0]}: {self.args[1]}" if len(self.args) > 1 else str(self.args[0])

__all__ = [
    "BoatError",
    "Service",
    "Store",
    "cohen_kappa",
    "join",
    "layout",
    "parse",
    "render_svg",
    "search",
    "serialize",
    "split",
    "validate",
]
