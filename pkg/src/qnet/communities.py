"""Pairwise closeness matrices from walk dynamics and the partitions built on them.

All closeness matrices are real symmetric with a zero diagonal, so any of
them can feed the same agglomeration routine. Long-time quantities use the
eigenspace-projector form exclusively.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2

from .config import DEFAULT_TOLS, Tolerances
from .graphs import Graph, adjacency_matrix, connected_components
from .linalg import hermitian_eig
from .walks import uniform_superposition


@dataclass(frozen=True)
class ClosenessMatrix:
    matrix: np.ndarray
    measure: str
    time: float | None = None
    notes: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _finalize(c: np.ndarray, measure: str, time: float | None = None,
              notes: dict | None = None) -> ClosenessMatrix:
    c = 0.5 * (c + c.T)
    np.fill_diagonal(c, 0.0)
    return ClosenessMatrix(matrix=c, measure=measure, time=time, notes=notes or {})


def closeness_short_time_transport(
    h: np.ndarray,
    t: float | None = None,
    samples: int = 64,
    tols: Tolerances = DEFAULT_TOLS,
) -> ClosenessMatrix:
    """Mean pairwise transport over [0, t] from basis starts.

    At leading order the values sort like |H_ij|, which is the point: the
    horizon should stay short. Defaults to t = 0.01/max|H| and warns when
    t * max|H| exceeds 0.1.
    """
    h = np.asarray(h, dtype=complex)
    dec = hermitian_eig(h, tols=tols)
    scale = max(float(np.abs(h).max()), 1e-300)
    if t is None:
        t = 0.01 / scale
    if t <= 0:
        raise ValueError(f"horizon must be positive, got {t}")
    if t * scale > 0.1:
        warnings.warn(
            f"short-time horizon t*max|H| = {t * scale:.3f} exceeds 0.1; "
            "values are no longer proportional to the couplings"
        )
    w, v = dec.eigenvalues, dec.vectors
    grid = (np.arange(samples) + 0.5) * (t / samples)
    mean = np.zeros((h.shape[0], h.shape[0]))
    for s in grid:
        u = (v * np.exp(-1j * w * s)) @ v.conj().T
        mean += np.abs(u) ** 2
    mean /= samples
    return _finalize(mean, "short-time-transport", time=float(t))


def closeness_long_time_transport(
    h: np.ndarray,
    t: float | None = None,
    tols: Tolerances = DEFAULT_TOLS,
) -> ClosenessMatrix:
    """Mean pairwise transport between basis states over the horizon [0, t].

    With t=None the horizon is infinite and only the eigenspace projectors
    survive: c_ij = sum_l |(Pi_l)_ij|^2. A finite t keeps the cross terms
    through their exact window average, which matters on graphs with mirror
    symmetries: the ergodic limit concentrates transport on symmetry-related
    node pairs, while a horizon of a few hop times reflects the link
    structure. Both branches are closed-form in the eigendecomposition; no
    quadrature is involved.
    """
    h = np.asarray(h, dtype=complex)
    dec = hermitian_eig(h, tols=tols)
    stack = np.stack(dec.projectors)
    if t is None:
        c = np.abs(stack).__pow__(2).sum(axis=0)
        return _finalize(c, "long-time-transport")
    if t <= 0:
        raise ValueError(f"horizon must be positive, got {t}")
    # window average of e^{-i(l_a - l_b) s} over s in [0, t]
    delta = dec.group_values[:, None] - dec.group_values[None, :]
    x = 0.5 * delta * t
    kernel = np.exp(-1j * x) * np.sinc(x / np.pi)
    c = np.real(np.einsum("aij,ab,bij->ij", stack, kernel, stack.conj()))
    return _finalize(c, "long-time-transport", time=float(t))


def closeness_fidelity(
    h: np.ndarray,
    policy: str = "superposition",
    tols: Tolerances = DEFAULT_TOLS,
) -> ClosenessMatrix:
    """Long-time mean overlap fidelity with the pair-localized initial state.

    F(t) = tr(rho0 rho(t)) / tr(rho0^2); its infinite-time mean reduces to a
    sum over eigenspace projectors. policy picks rho0 per pair (i, j):
    "superposition" uses (|i> + |j>)/sqrt(2), "mixed" uses (|i><i| + |j><j|)/2.
    """
    h = np.asarray(h, dtype=complex)
    dec = hermitian_eig(h, tols=tols)
    n = h.shape[0]
    c = np.zeros((n, n))
    if policy == "superposition":
        for proj in dec.projectors:
            d = np.real(np.diag(proj))
            q = 0.5 * (d[:, None] + d[None, :] + 2.0 * np.real(proj))
            c += q ** 2
    elif policy == "mixed":
        for proj in dec.projectors:
            d = np.real(np.diag(proj))
            c += 0.5 * (d[:, None] ** 2 + d[None, :] ** 2 + 2.0 * np.abs(proj) ** 2)
    else:
        raise ValueError(f"unknown fidelity policy {policy!r}")
    return _finalize(c, f"fidelity-{policy}")


def closeness_link_failure(h: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> ClosenessMatrix:
    """Affinity of nodes by how similarly their long-time occupations respond
    to single-link removals, starting from the uniform superposition.

    For a pair (u, v) only failures of links touching neither node are
    compared, so the profiles measure reactions to trouble elsewhere in the
    network; removing a link at u obviously hits u harder than v, and keeping
    those entries would separate even perfectly interchangeable nodes. With
    the exclusion, nodes with identical neighborhoods respond identically to
    every compared failure and score affinity 1 exactly.

    affinity(u, v) = 1 / (1 + rms difference of the compared responses).
    Nodes whose occupations never respond to any removal are listed in
    notes["zero_response_nodes"]; component structure is noted as well.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    hermitian_eig(h, tols=tols)  # symmetry gate
    links = [(i, j) for i in range(n) for j in range(i + 1, n) if abs(h[i, j]) > 0]
    if not links:
        raise ValueError("no links to remove")
    psi0 = uniform_superposition(n)

    def mean_occupations(op: np.ndarray) -> np.ndarray:
        dec = hermitian_eig(op, tols=tols)
        out = np.zeros(n)
        for proj in dec.projectors:
            out += np.abs(proj @ psi0) ** 2
        return out

    base = mean_occupations(h)
    responses = np.zeros((n, len(links)))
    for k, (i, j) in enumerate(links):
        trimmed = h.copy()
        trimmed[i, j] = 0.0
        trimmed[j, i] = 0.0
        responses[:, k] = mean_occupations(trimmed) - base
    incident = [set(e) for e in links]
    c = np.zeros((n, n))
    for u in range(n):
        for v in range(u + 1, n):
            cols = [k for k, pair in enumerate(incident) if u not in pair and v not in pair]
            if cols:
                d = np.linalg.norm(responses[u, cols] - responses[v, cols]) / np.sqrt(len(cols))
            else:
                d = 0.0
            c[u, v] = c[v, u] = 1.0 / (1.0 + d)
    zero = [int(u) for u in range(n) if np.abs(responses[u]).max() < 1e-14]
    comp_graph = [(i, j) for i in range(n) for j in range(i + 1, n) if abs(h[i, j]) > 0]
    notes: dict = {"zero_response_nodes": zero}
    comps = _component_split(n, comp_graph)
    if len(comps) > 1:
        notes["components"] = comps
    return _finalize(c, "link-failure", notes=notes)


def _component_split(n: int, pairs: list[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray                    # (n,) community index per node
    communities: tuple[tuple[int, ...], ...]
    method: str
    quality: float | None = None
    merges: tuple[tuple[int, int, float], ...] | None = None
    level_qualities: tuple[float, ...] | None = None
    best_level: int | None = None
    tie: bool = False

    def as_dict(self) -> dict:
        out: dict = {
            "method": self.method,
            "communities": [list(c) for c in self.communities],
        }
        if self.quality is not None:
            out["quality"] = float(self.quality)
        if self.merges is not None:
            out["merges"] = [
                {"a": a, "b": b, "closeness": v} for a, b, v in self.merges
            ]
        out["tie"] = bool(self.tie)
        return out


def _labels_from_groups(n: int, groups: list[list[int]]) -> np.ndarray:
    labels = np.empty(n, dtype=int)
    for idx, members in enumerate(sorted(groups, key=min)):
        for m in members:
            labels[m] = idx
    return labels


def _partition_quality(c: np.ndarray, groups: list[list[int]]) -> float:
    """Intra-community closeness mass ratio, corrected by the strength null.

    The raw intra/total ratio is monotone under merging; subtracting the
    null expectation (sum over communities of squared strength fractions)
    makes an optimum at genuine block structure.
    """
    total = c.sum()
    if total <= 0:
        return 0.0
    strength = c.sum(axis=1)
    q = 0.0
    for members in groups:
        idx = np.array(members)
        q += c[np.ix_(idx, idx)].sum() / total
        q -= (strength[idx].sum() / total) ** 2
    return float(q)


def agglomerate(closeness: ClosenessMatrix) -> Partition:
    """Average-linkage agglomeration, merging the closest pair first.

    Every merge level is scored; the best-scoring level is returned along
    with the full merge list. Exactly tied merge candidates set the tie flag
    (the dendrogram order is then not unique).
    """
    c = closeness.matrix
    n = c.shape[0]
    if n == 0:
        raise ValueError("empty closeness matrix")
    if n == 1:
        return Partition(labels=np.zeros(1, dtype=int), communities=((0,),),
                         method=f"agglomerate-{closeness.measure}", quality=0.0,
                         merges=(), level_qualities=(0.0,), best_level=0)
    if c.sum() <= 0:
        return Partition(labels=np.zeros(n, dtype=int),
                         communities=(tuple(range(n)),),
                         method=f"agglomerate-{closeness.measure}",
                         quality=0.0, merges=(), level_qualities=(0.0,),
                         best_level=0, tie=True)
    link = c.astype(float).copy()
    sizes = {i: 1 for i in range(n)}
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    active = set(range(n))
    merges: list[tuple[int, int, float]] = []
    levels: list[list[list[int]]] = [[list(m) for m in members.values()]]
    qualities = [_partition_quality(c, levels[0])]
    tie = False
    next_id = n
    ids = {i: i for i in range(n)}  # position -> cluster id (scipy style)
    while len(active) > 1:
        best_pair = None
        best_val = -np.inf
        second = -np.inf
        order = sorted(active)
        for ai, a in enumerate(order):
            for b in order[ai + 1:]:
                v = link[a, b]
                if v > best_val + 1e-15:
                    second = best_val
                    best_val = v
                    best_pair = (a, b)
                elif v > second:
                    second = v
        if second > -np.inf and abs(best_val - second) <= 1e-12:
            tie = True
        a, b = best_pair
        merges.append((ids[a], ids[b], float(best_val)))
        # average-linkage update into slot a
        for x in active:
            if x in (a, b):
                continue
            link[a, x] = link[x, a] = (
                sizes[a] * link[a, x] + sizes[b] * link[b, x]
            ) / (sizes[a] + sizes[b])
        sizes[a] += sizes[b]
        members[a] = members[a] + members[b]
        ids[a] = next_id
        next_id += 1
        active.remove(b)
        del members[b], sizes[b]
        groups = [sorted(m) for m in members.values()]
        levels.append(groups)
        qualities.append(_partition_quality(c, groups))
    best_level = int(np.argmax(qualities))
    if sum(abs(q - qualities[best_level]) <= 1e-12 for q in qualities) > 1:
        tie = True
    groups = levels[best_level]
    labels = _labels_from_groups(n, groups)
    communities = tuple(tuple(g) for g in sorted(groups, key=min))
    return Partition(
        labels=labels,
        communities=communities,
        method=f"agglomerate-{closeness.measure}",
        quality=qualities[best_level],
        merges=tuple(merges),
        level_qualities=tuple(qualities),
        best_level=best_level,
        tie=tie,
    )


# ---------------------------------------------------------------------------
# phase-aware spectral partitioning


def magnetic_laplacian(g: Graph, theta: float) -> np.ndarray:
    """Hermitian Laplacian of the symmetrized graph with edge-direction phases
    e^{i theta (A_uv - A_vu)} marking one-way links."""
    a = np.abs(adjacency_matrix(g))
    sym = 0.5 * (a + a.T)
    gamma = np.exp(1j * theta * (a - a.T))
    lap = np.diag(sym.sum(axis=1)) - gamma * sym
    return lap


def magnetic_partition(g: Graph, theta: float, k: int, seed: int = 0,
                       tols: Tolerances = DEFAULT_TOLS) -> Partition:
    """Seeded k-means on spectral-projector features of the k lowest
    eigenvalue groups of the magnetic Laplacian.

    Node features are the rows of |Pi| where Pi projects onto the k lowest
    eigenspaces, degenerate groups kept whole. The entries |Pi_uv| aggregate
    the magnitudes and relative phases of the low eigenvectors while staying
    invariant under the per-eigenvector gauge freedom, which individual
    eigenvector coordinates are not. Directed cycles lower phase-winding
    modes below the cut, so their nodes share projector rows and cluster
    together.
    """
    if k < 1 or k > g.n:
        raise ValueError(f"k must lie in [1, {g.n}], got {k}")
    lap = magnetic_laplacian(g, theta)
    dec = hermitian_eig(lap, tols=tols)
    pi = np.sum(dec.projectors[: min(k, len(dec.projectors))], axis=0)
    features = np.abs(pi)
    _, labels = kmeans2(features, k, minit="++", seed=seed)
    groups: dict[int, list[int]] = {}
    for node, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(node)
    communities = tuple(tuple(sorted(m)) for m in sorted(groups.values(), key=min))
    return Partition(
        labels=_labels_from_groups(g.n, [list(c) for c in communities]),
        communities=communities,
        method="magnetic",
    )


def component_partition(g: Graph) -> Partition:
    """Connected components as a trivial partition (useful as a baseline)."""
    comps = connected_components(g)
    return Partition(
        labels=_labels_from_groups(g.n, comps),
        communities=tuple(tuple(c) for c in comps),
        method="components",
    )
