"""Tensor-product Gauss-Legendre quadrature on box domains.

Integrands here are smooth trigonometric polynomials, for which
Gauss-Legendre converges spectrally; 32 nodes per axis resolves every
built-in density well past 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_NODES = 32


@lru_cache(maxsize=None)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def axis_rule(n: int, lower: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [lower, upper]."""
    if n < 1:
        raise ValueError("quadrature needs at least one node per axis")
    x, w = _leggauss(n)
    half = 0.5 * (upper - lower)
    return lower + half * (x + 1.0), half * w


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """A per-axis node count list bound to a box domain.

    ``points`` is the flattened tensor grid (N, d) and ``weights`` the
    matching product weights (N,); N is the product of the axis counts.
    """

    domain: np.ndarray  # (d, 2)
    nodes_per_axis: tuple[int, ...]
    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_domain(cls, domain, nodes_per_axis: int | tuple[int, ...] = DEFAULT_NODES) -> "QuadratureRule":
        dom = np.asarray(domain, dtype=float)
        d = dom.shape[0]
        if isinstance(nodes_per_axis, (int, np.integer)):
            counts = (int(nodes_per_axis),) * d
        else:
            counts = tuple(int(n) for n in nodes_per_axis)
            if len(counts) != d:
                raise ValueError(f"domain has {d} axes but got {len(counts)} node counts")
        axes = [axis_rule(n, lo, hi) for n, (lo, hi) in zip(counts, dom)]
        grids = np.meshgrid(*[x for x, _ in axes], indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=-1)
        weights = axes[0][1]
        for _, w in axes[1:]:
            weights = np.multiply.outer(weights, w)
        weights = np.asarray(weights).ravel()
        points.setflags(write=False)
        weights.setflags(write=False)
        return cls(domain=dom, nodes_per_axis=counts, points=points, weights=weights)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def integrate(self, values) -> float | np.ndarray:
        """Weighted sum of per-node values; values may have trailing axes."""
        vals = np.asarray(values, dtype=float)
        if vals.shape[0] != self.size:
            raise ValueError(f"expected {self.size} node values, got {vals.shape[0]}")
        return np.tensordot(self.weights, vals, axes=1)
