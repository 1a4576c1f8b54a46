"""Point-set tools for spectra: single-linkage clustering, Hausdorff distance, Kitai test."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_EPS_FRACTION = 0.05
FALLBACK_EPS = 0.05


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    components: list  # lists of indices into eigenvalues
    eps: float
    difference_set: np.ndarray | None = None
    hausdorff: float | None = None
    kitai: dict | None = field(default=None)

    def component_points(self):
        return [self.eigenvalues[idx] for idx in self.components]


def default_eps(points) -> float:
    """5% of the spectral diameter (or 0.05 for a single point)."""
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size < 2:
        return FALLBACK_EPS
    diam = float(np.max(np.abs(pts[:, None] - pts[None, :])))
    return DEFAULT_EPS_FRACTION * diam if diam > 0 else FALLBACK_EPS


def cluster_components(points, eps: float | None = None):
    """Single-linkage clusters: points at distance ``<= eps`` share a component.

    Components are returned as sorted index lists ordered by their smallest
    index, so a point exactly ``eps`` away from two clusters ends up merged
    with both, and the merged cluster carries the lower index.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if eps is None:
        eps = default_eps(pts)
    n = pts.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if n:
        close = np.abs(pts[:, None] - pts[None, :]) <= eps
        for i, j in zip(*np.nonzero(np.triu(close, 1))):
            ri, rj = find(int(i)), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)], float(eps)


def hausdorff(P, Q) -> float:
    P = np.asarray(P, dtype=complex).ravel()
    Q = np.asarray(Q, dtype=complex).ravel()
    if P.size == 0 or Q.size == 0:
        return 0.0 if P.size == Q.size else float("inf")
    D = np.abs(P[:, None] - Q[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def kitai_verdict(points, components, margin: float) -> dict:
    """Flag components lying entirely off the unit circle by more than ``margin``."""
    pts = np.asarray(points, dtype=complex).ravel()
    missing = []
    for k, idx in enumerate(components):
        dist = np.abs(np.abs(pts[idx]) - 1.0)
        if np.all(dist > margin):
            missing.append(k)
    return {
        "verdict": "obstructed" if missing else "inconclusive",
        "components_off_circle": missing,
        "margin": float(margin),
    }
