"""Schema curation toolkit: validation, editing, induction and coverage over SDF documents."""

import json

from . import _sci
from ._sci import EditSession as _NativeSession
from ._sci import SciError

__all__ = [
    "SciError",
    "EditSession",
    "canonicalize",
    "validate",
    "temporal_order",
    "graph_view",
    "to_dot",
    "induce",
    "coverage",
    "coverage_stats",
    "increase_pct",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def canonicalize(doc):
    return _sci.canonicalize(_text(doc))


def validate(doc, strict=False):
    return json.loads(_sci.validate(_text(doc), strict))


def temporal_order(doc, chapter):
    return _sci.temporal_order(_text(doc), chapter)


def graph_view(doc):
    return json.loads(_sci.graph_view(_text(doc)))


def to_dot(doc):
    return _sci.to_dot(_text(doc))


def induce(scenario, chapters, fixture, catalog=None, edge_threshold=0.5, grounding_threshold=0.5, expansion_depth=1):
    out = _sci.induce(
        scenario,
        list(chapters),
        _text(fixture),
        None if catalog is None else _text(catalog),
        edge_threshold,
        grounding_threshold,
        expansion_depth,
    )
    return json.loads(out)


def coverage(schema, instances, tau=0.7, include_descriptions=False, stoplist=None):
    out = _sci.coverage(_text(schema), _text(instances), tau, include_descriptions, stoplist)
    return json.loads(out)


def coverage_stats(documents):
    return json.loads(_sci.coverage_stats([_text(d) for d in documents]))


def increase_pct(induced, curated):
    return _sci.increase_pct(induced, curated)


class EditSession:
    def __init__(self, doc, strict=False):
        self._native = _NativeSession(_text(doc), strict)

    def apply(self, op, args=None, expect_version=None):
        env = {"op": op, "args": args or {}}
        if expect_version is not None:
            env["expect_version"] = expect_version
        return json.loads(self._native.apply(json.dumps(env)))

    def undo(self):
        self._native.undo()

    def redo(self):
        self._native.redo()

    @property
    def version(self):
        return self._native.version

    @property
    def can_undo(self):
        return self._native.can_undo

    @property
    def can_redo(self):
        return self._native.can_redo

    def document(self):
        return json.loads(self._native.document())
