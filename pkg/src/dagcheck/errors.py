"""Exception hierarchy shared by every module."""

from __future__ import annotations


class DagError(Exception):
    """Base class for all domain errors raised by dagcheck."""


class GraphError(DagError):
    """Structural problem with a graph definition."""


class InvalidName(GraphError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"invalid node name {name!r}")


class UnknownNode(GraphError):
    def __init__(self, name, context: str = ""):
        self.name = name
        msg = f"unknown node {name!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class SelfLoop(GraphError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"self-loop on {node!r}")


class DuplicateEdge(GraphError):
    def __init__(self, edge):
        self.edge = edge
        super().__init__(f"duplicate edge {edge[0]} -> {edge[1]}")


class CycleFound(GraphError):
    """Raised when the edge set contains a directed cycle.

    ``cycle`` is a witness node sequence whose first and last entries coincide,
    e.g. ``('A', 'B', 'A')``.
    """

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("cycle found: " + " -> ".join(self.cycle))


class InvalidModeration(GraphError):
    pass


class QueryError(DagError):
    """A causal query or conditioning set is malformed."""


class SameNode(QueryError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"endpoints must differ, got {name!r} twice")


class LatentConditioned(QueryError):
    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__("cannot condition on latent node(s): " + ", ".join(self.names))


class SizeLimit(DagError):
    def __init__(self, n, limit):
        super().__init__(f"graph has {n} nodes; the limit for exhaustive search is {limit}")


class ModelError(DagError):
    """Invalid structural model or numeric failure."""


class ModerationPresent(ModelError):
    def __init__(self):
        super().__init__("operation requires a model without moderation terms")


class SingularMatrix(ModelError):
    pass


class RankDeficient(ModelError):
    pass


class WeakInstrument(ModelError):
    pass


class TooFewRows(ModelError):
    pass


class NonPositiveInput(ModelError, ValueError):
    pass


class UnknownCase(DagError):
    def __init__(self, case_id, known):
        super().__init__(f"unknown case {case_id!r}; expected one of {', '.join(known)}")
