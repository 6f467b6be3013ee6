"""scikit-learn style wrapper around the recoloring engine."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engine import prepare, recolor_to_canonical, transform
from .exceptions import GraphFormatError, InvalidColoring
from .graph import Graph, canonical_coloring, load_graph, maximum_cardinality_search


def as_graph(graph) -> Graph:
    """Accept a :class:`Graph`, a graph JSON dict/string, or a square 0/1 adjacency matrix."""
    if isinstance(graph, Graph):
        return graph
    if isinstance(graph, (dict, str, bytes)):
        return load_graph(graph)
    a = np.asarray(graph)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GraphFormatError(f"adjacency matrix must be square, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise GraphFormatError("adjacency matrix is not symmetric")
    if np.any(np.diag(a)):
        raise GraphFormatError("adjacency matrix has self-loops")
    if not np.isin(a, (0, 1)).all():
        raise GraphFormatError("adjacency matrix entries must be 0 or 1")
    rows, cols = np.nonzero(np.triu(a, 1))
    return Graph.from_edges(a.shape[0], list(zip(rows.tolist(), cols.tolist())))


def check_colorings(X, n: int, k: int) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n:
        raise InvalidColoring(f"expected colorings of length {n}, got shape {X.shape}")
    if X.size and not np.issubdtype(X.dtype, np.integer):
        raise InvalidColoring("colors must be integers")
    if X.size and (X.min() < 1 or X.max() > k):
        raise InvalidColoring(f"colors must lie in 1..{k}")
    return X.astype(np.int64)


class ChordalRecolorer(BaseEstimator):
    """Recolor proper colorings of a fixed chordal graph.

    ``fit`` takes the graph and ``transform`` takes colorings of it, so
    ``fit_transform`` is deliberately not offered.

    Parameters
    ----------
    k : int, optional
        Number of colors.  Defaults to ``omega + extra_colors``.
    extra_colors : int, default=3
        Used when ``k`` is not given; must be at least 3.
    target : array-like, optional
        Coloring every input is transformed into.  The canonical coloring
        of the graph when omitted.
    debug : bool, default=False
        Validity checks after every internal step.

    Attributes
    ----------
    graph_ : Graph
    k_ : int
    omega_ : int
    delta_ : int
    canonical_coloring_ : ndarray of shape (n_vertices,)
    sequences_ : list of RecolorSequence
        Sequences produced by the last call to :meth:`transform`.
    """

    def __init__(self, k=None, extra_colors=3, target=None, debug=False):
        self.k = k
        self.extra_colors = extra_colors
        self.target = target
        self.debug = debug

    def fit(self, X, y=None):
        """Certify the graph ``X`` as chordal and build the clique tree."""
        g = as_graph(X)
        omega = max(canonical_coloring(g, maximum_cardinality_search(g)).omega, 1)
        k = self.k if self.k is not None else omega + self.extra_colors
        self._prepared = prepare(g, k)
        self.graph_ = g
        self.k_ = k
        self.omega_ = omega
        self.delta_ = g.max_degree
        self.n_vertices_ = g.n
        self.canonical_coloring_ = np.asarray(self._prepared.classes.c0, dtype=np.int64)
        return self

    def recolor(self, start, end=None):
        """Sequence from ``start`` to ``end`` (default: the fitted target)."""
        check_is_fitted(self, "graph_")
        start = check_colorings(start, self.n_vertices_, self.k_)[0].tolist()
        end = self._target() if end is None else check_colorings(end, self.n_vertices_, self.k_)[0].tolist()
        if end is None:
            return recolor_to_canonical(self.graph_, start, self.k_, self.debug, self._prepared)
        return transform(self.graph_, start, end, self.k_, self.debug, self._prepared)

    def _target(self):
        if self.target is None:
            return None
        return check_colorings(self.target, self.n_vertices_, self.k_)[0].tolist()

    def transform(self, X):
        """Map every row of ``X`` to the target coloring.

        Returns
        -------
        ndarray of shape (n_colorings, n_vertices)
            Number of times each vertex is recolored on the way.  The
            sequences themselves are kept in ``sequences_``.
        """
        check_is_fitted(self, "graph_")
        X = check_colorings(X, self.n_vertices_, self.k_)
        self.sequences_ = [self.recolor(row) for row in X]
        out = np.zeros(X.shape, dtype=np.int64)
        for i, seq in enumerate(self.sequences_):
            for v, c in seq.per_vertex_counts().items():
                out[i, v] = c
        return out

    def predict(self, X):
        """Sequence length for every row of ``X``."""
        self.transform(X)
        return np.array([s.length for s in self.sequences_], dtype=np.int64)
