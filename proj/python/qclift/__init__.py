"""Exact checkers for query-to-communication lifting.

Thin wrappers over the C++ core; structured results come back as dicts.
"""

import json

try:
    from . import _qclift
except ImportError:  # build tree: the extension sits next to, not inside, the package
    import _qclift

Error = _qclift.Error
BudgetError = _qclift.BudgetError
ParseError = _qclift.ParseError


def _dump(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def analyze_gadget(gadget, max_side=16):
    """Exact discrepancy of a builtin gadget name or gadget file."""
    return json.loads(_qclift.analyze_gadget(gadget, max_side))


def decision_tree(problem):
    """Optimal parallel decision tree and D^dt for a search problem dict."""
    return json.loads(_qclift.decision_tree(_dump(problem)))


def canonical_protocol(problem, gadget="ip2"):
    return json.loads(_qclift.canonical_protocol(_dump(problem), gadget))


def lift(protocol, gadget, z, mode="det", eta="1/2", c="64", h="1", seed=1):
    """Run the simulation of `protocol` on the lifted instance for input z."""
    return json.loads(_qclift.lift(_dump(protocol), gadget, z, mode, str(eta), str(c), str(h), seed))


def verify(corpus_path, jobs=0):
    return json.loads(_qclift.verify(str(corpus_path), jobs))


def rational(text):
    return _qclift.rational(str(text))


__all__ = [
    "Error",
    "BudgetError",
    "ParseError",
    "analyze_gadget",
    "decision_tree",
    "canonical_protocol",
    "lift",
    "verify",
    "rational",
]
