"""Network density matrices, spectral entropies, divergences, and layer clustering."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.cluster import hierarchy

from .config import DEFAULT_TOLS, Tolerances
from .errors import GraphFormatError, SupportViolationWarning
from .graphs import Graph, build_graph, build_operators
from .linalg import expm_hermitian


@dataclass(frozen=True)
class DensityMatrix:
    """A unit-trace PSD matrix tagged with how it was built from a graph."""

    matrix: np.ndarray
    construction: str            # "rescaled-laplacian" | "propagator" | "external"
    tau: float | None = None


def make_density(matrix: np.ndarray, construction: str = "external",
                 tau: float | None = None, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got {m.shape}")
    if np.abs(m - m.conj().T).max() > 1e-10:
        raise ValueError("density matrix is not hermitian")
    if abs(np.trace(m).real - 1.0) > tols.density_trace_atol:
        raise ValueError(f"density matrix trace {np.trace(m).real!r} != 1")
    if np.linalg.eigvalsh(m)[0] < -tols.density_psd_atol:
        raise ValueError("density matrix has a negative eigenvalue")
    return DensityMatrix(matrix=m, construction=construction, tau=tau)


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)


def density_rescaled(g: Graph, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Laplacian divided by its trace. Needs at least one edge."""
    lap = build_operators(g, tols=tols).laplacian
    tr = float(np.trace(lap).real)
    if tr <= 0:
        raise GraphFormatError("rescaled-laplacian density needs a graph with edges")
    return DensityMatrix(matrix=lap / tr, construction="rescaled-laplacian")


def density_propagator(g: Graph, tau: float, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """exp(-tau * Laplacian) normalized by its trace; tau = 0 gives I/n."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    lap = build_operators(g, tols=tols).laplacian
    prop = expm_hermitian(lap, scale=-tau, tols=tols)
    return DensityMatrix(matrix=prop / np.trace(prop).real,
                         construction="propagator", tau=float(tau))


def vn_entropy(rho, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Spectral entropy in bits; eigenvalues below the clip floor count as zero."""
    w = np.linalg.eigvalsh(_as_matrix(rho))
    w = w[w > tols.eig_clip_floor]
    return float(-(w * np.log2(w)).sum() + 0.0)


def kl_divergence(rho, sigma, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Relative entropy tr[rho (log2 rho - log2 sigma)] in bits.

    When rho carries mass outside sigma's support the divergence is infinite;
    math.inf is returned and a SupportViolationWarning explains the overlap.
    """
    r = _as_matrix(rho)
    s = _as_matrix(sigma)
    ws, vs = np.linalg.eigh(s)
    null = ws <= tols.eig_clip_floor
    if null.any():
        null_vecs = vs[:, null]
        leaked = float(np.real(np.trace(null_vecs.conj().T @ r @ null_vecs)))
        if leaked > tols.support_mass_atol:
            warnings.warn(
                f"support violation: {leaked:.3e} of the state lies outside the "
                "reference support; divergence is infinite",
                SupportViolationWarning,
            )
            return float("inf")
    wr = np.linalg.eigvalsh(r)
    wr = wr[wr > tols.eig_clip_floor]
    entropy_term = float((wr * np.log2(wr)).sum())
    keep = ~null
    log_s = np.log2(ws[keep])
    weights = np.real(np.einsum("ij,jk,ki->i", vs[:, keep].conj().T, r, vs[:, keep]))
    cross_term = float((weights * log_s).sum())
    return entropy_term - cross_term


def js_divergence(rho, sigma, tols: Tolerances = DEFAULT_TOLS) -> float:
    """S(mix) - [S(rho) + S(sigma)]/2 in bits, bounded by [0, 1]."""
    r, s = _as_matrix(rho), _as_matrix(sigma)
    mix = 0.5 * (r + s)
    val = vn_entropy(mix, tols) - 0.5 * (vn_entropy(r, tols) + vn_entropy(s, tols))
    return float(max(0.0, val))


def js_distance(rho, sigma, tols: Tolerances = DEFAULT_TOLS) -> float:
    return float(np.sqrt(js_divergence(rho, sigma, tols)))


# ---------------------------------------------------------------------------
# model likelihood


@dataclass(frozen=True)
class ErdosRenyiModel:
    """Independent-edge model summarized by its expected Laplacian."""

    p: float
    tau: float = 1.0

    def expected_laplacian(self, n: int) -> np.ndarray:
        return self.p * ((n - 1) * np.eye(n) - (np.ones((n, n)) - np.eye(n)))

    def density(self, n: int) -> DensityMatrix:
        lap = self.expected_laplacian(n)
        prop = expm_hermitian(lap, scale=-self.tau)
        return DensityMatrix(matrix=prop / np.trace(prop).real,
                             construction="propagator", tau=self.tau)


def log_likelihood(rho, model, tols: Tolerances = DEFAULT_TOLS) -> float:
    """tr[rho log2 sigma] in bits (negative cross entropy).

    model is either a parametric family (anything with a density(n) method,
    like ErdosRenyiModel) or an explicit reference state; with the observed
    state itself as the reference this equals -vn_entropy(rho). Returns -inf
    with a SupportViolationWarning if the reference has lost support where
    the observed state lives.
    """
    r = _as_matrix(rho)
    if hasattr(model, "density"):
        sigma = model.density(r.shape[0]).matrix
    else:
        sigma = _as_matrix(model)
    ws, vs = np.linalg.eigh(sigma)
    null = ws <= tols.eig_clip_floor
    if null.any():
        null_vecs = vs[:, null]
        leaked = float(np.real(np.trace(null_vecs.conj().T @ r @ null_vecs)))
        if leaked > tols.support_mass_atol:
            warnings.warn(
                f"model support misses {leaked:.3e} of the observed state",
                SupportViolationWarning,
            )
            return float("-inf")
    keep = ~null
    weights = np.real(np.einsum("ij,jk,ki->i", vs[:, keep].conj().T, r, vs[:, keep]))
    return float((weights * np.log2(ws[keep])).sum())


# ---------------------------------------------------------------------------
# multiplex layers


@dataclass(frozen=True)
class LayerStack:
    layers: tuple[Graph, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.layers) != len(self.labels):
            raise ValueError("one label per layer required")
        if len({g.n for g in self.layers}) > 1:
            raise ValueError("layers must share the node set")


@dataclass(frozen=True)
class LayerClustering:
    labels: tuple[str, ...]
    distance_matrix: np.ndarray            # pairwise js_distance
    merges: tuple[tuple[int, int, float], ...]  # scipy linkage ids, ascending distance
    order: tuple[int, ...]                 # dendrogram leaf order


def layer_cluster(stack: LayerStack, tau: float = 1.0,
                  tols: Tolerances = DEFAULT_TOLS) -> LayerClustering:
    """Average-linkage dendrogram of layers under the propagator js_distance."""
    k = len(stack.layers)
    if k < 2:
        raise ValueError("need at least two layers to cluster")
    densities = [density_propagator(g, tau, tols) for g in stack.layers]
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dist[i, j] = dist[j, i] = js_distance(densities[i], densities[j], tols)
    condensed = dist[np.triu_indices(k, 1)]
    z = hierarchy.linkage(condensed, method="average")
    merges = tuple((int(a), int(b), float(d)) for a, b, d, _ in z)
    order = tuple(int(i) for i in hierarchy.leaves_list(z))
    return LayerClustering(labels=stack.labels, distance_matrix=dist,
                           merges=merges, order=order)


def aggregate_layers(layers: Sequence[Graph]) -> Graph:
    """Edge-weight-sum aggregation of same-node-set layers (phase-free)."""
    if not layers:
        raise ValueError("nothing to aggregate")
    n = layers[0].n
    if any(g.n != n for g in layers):
        raise ValueError("layers must share the node set")
    if any(g.directed for g in layers) or any(g.has_phases() for g in layers):
        raise ValueError("aggregation is defined for undirected phase-free layers")
    weights: dict[tuple[int, int], float] = {}
    for g in layers:
        for e in g.edges:
            key = (min(e.src, e.dst), max(e.src, e.dst))
            weights[key] = weights.get(key, 0.0) + e.weight
    edges = [(u, v, w, 0.0) for (u, v), w in sorted(weights.items())]
    return build_graph(n, edges, directed=False)
