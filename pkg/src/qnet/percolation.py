"""Entanglement links, quantum random graphs, subgraph emergence, and
bond percolation on lattices.

Monte Carlo conventions: every trial draws from its own seeded substream, and
sweeps over a probability grid reuse each trial's uniforms (common random
numbers), which makes per-trial outcomes exactly monotone in p.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import Graph, build_graph


@dataclass(frozen=True)
class QubitState:
    """Two-amplitude pure state; amplitudes must be normalized."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes are not normalized: |a|^2+|b|^2 = {norm!r}")

    @property
    def probabilities(self) -> tuple[float, float]:
        return abs(self.alpha) ** 2, abs(self.beta) ** 2


@dataclass(frozen=True)
class LinkState:
    """Partially entangled pair state parameterized by p in [0, 1]:
    amplitudes (sqrt(2-p), sqrt(p))/sqrt(2) on the |00>, |11> components."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def amplitudes(self) -> tuple[float, float]:
        return (np.sqrt((2.0 - self.p) / 2.0), np.sqrt(self.p / 2.0))

    @property
    def schmidt_coefficients(self) -> tuple[float, float]:
        return ((2.0 - self.p) / 2.0, self.p / 2.0)


def singlet_conversion_probability(link: LinkState) -> float:
    """Optimal probability of converting the link into a maximally entangled
    pair: twice the smaller Schmidt coefficient, which is exactly p."""
    return 2.0 * min(link.schmidt_coefficients)


def _conversion_p(link: LinkState | float) -> float:
    if isinstance(link, LinkState):
        return singlet_conversion_probability(link)
    link = float(link)
    if not 0.0 <= link <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {link}")
    return link


def sample_quantum_random_graph(
    n: int,
    link: LinkState | float,
    seed: int | np.random.Generator = 0,
) -> Graph:
    """Measure a network of identical partial links: every pair keeps its edge
    with the link's conversion probability, yielding a classical G(n, p)."""
    p = _conversion_p(link)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    edges = [(int(a), int(b), 1.0, 0.0) for a, b in zip(iu[keep], ju[keep])]
    return build_graph(n, edges, directed=False)


# ---------------------------------------------------------------------------
# small-subgraph emergence


_NAMED_TARGETS: dict[str, tuple[int, list[tuple[int, int]]]] = {
    "edge": (2, [(0, 1)]),
    "path3": (3, [(0, 1), (1, 2)]),
    "triangle": (3, [(0, 1), (1, 2), (0, 2)]),
    "square": (4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "clique4": (4, [(i, j) for i in range(4) for j in range(i + 1, 4)]),
    "clique5": (5, [(i, j) for i in range(5) for j in range(i + 1, 5)]),
}


def target_graph(target: str | Graph) -> Graph:
    if isinstance(target, Graph):
        tg = target
    else:
        try:
            n, edges = _NAMED_TARGETS[target]
        except KeyError:
            raise ValueError(
                f"unknown target {target!r}; named targets: {sorted(_NAMED_TARGETS)}"
            ) from None
        tg = build_graph(n, [(u, v, 1.0, 0.0) for u, v in edges])
    if tg.n > 5:
        raise ValueError(f"exact search is capped at 5 target nodes, got {tg.n}")
    if tg.edge_count == 0:
        raise ValueError("target graph needs at least one link")
    return tg


def _has_triangle(nbrs: list[set[int]], edges: list[tuple[int, int]]) -> bool:
    for u, v in edges:
        if nbrs[u] & nbrs[v]:
            return True
    return False


def contains_subgraph(g: Graph, target: str | Graph) -> bool:
    """Exact (non-induced) containment check for targets of up to 5 nodes."""
    tg = target_graph(target)
    edges = [(e.src, e.dst) for e in g.edges]
    if tg.n == 2:
        return len(edges) > 0
    nbrs: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    t_edges = [(e.src, e.dst) for e in tg.edges]
    if (tg.n, sorted(map(sorted, t_edges))) == (3, [[0, 1], [0, 2], [1, 2]]):
        return _has_triangle(nbrs, edges)
    import networkx as nx
    from networkx.algorithms import isomorphism

    host = nx.Graph(edges)
    pattern = nx.Graph(t_edges)
    return isomorphism.GraphMatcher(host, pattern).subgraph_is_monomorphic()


@dataclass(frozen=True)
class EmergenceResult:
    target: str
    target_nodes: int
    target_links: int
    z: float
    z_critical: float            # nodes/links of the target
    regime: str                  # supercritical | critical | subcritical
    n_values: tuple[int, ...]
    c_values: tuple[float, ...]
    fractions: np.ndarray        # (len(n_values), len(c_values))
    sharpness: np.ndarray        # per size: fraction at c_max minus at c_min

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "z": self.z,
            "z_critical": self.z_critical,
            "regime": self.regime,
            "n_values": list(self.n_values),
            "c_values": [float(c) for c in self.c_values],
            "fractions": [[float(x) for x in row] for row in self.fractions],
            "sharpness": [float(x) for x in self.sharpness],
        }


def subgraph_emergence(
    target: str | Graph,
    z: float,
    n_values: Sequence[int],
    c_values: Sequence[float],
    trials: int = 200,
    seed: int = 0,
) -> EmergenceResult:
    """Fraction of G(n, c n^-z) samples containing the target subgraph.

    Within a trial the same uniforms serve every c (common random numbers),
    so each row of fractions is non-decreasing in c by construction.
    """
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")
    tg = target_graph(target)
    name = target if isinstance(target, str) else f"custom-{tg.n}n-{tg.edge_count}l"
    c_sorted = sorted(float(c) for c in c_values)
    if c_sorted != [float(c) for c in c_values]:
        raise ValueError("c_values must be ascending")
    z_crit = tg.n / tg.edge_count
    if abs(z - z_crit) < 1e-12:
        regime = "critical"
    elif z < z_crit:
        regime = "supercritical"
    else:
        regime = "subcritical"
    fractions = np.zeros((len(n_values), len(c_values)))
    root = np.random.SeedSequence(seed)
    streams = root.spawn(len(n_values))
    for ni, n in enumerate(n_values):
        iu, ju = np.triu_indices(n, 1)
        trial_seeds = streams[ni].spawn(trials)
        hits = np.zeros(len(c_values))
        for ts in trial_seeds:
            rng = np.random.default_rng(ts)
            u = rng.random(len(iu))
            for ci, c in enumerate(c_values):
                p = min(1.0, c * n ** (-z))
                keep = u < p
                sample = build_graph(
                    n, [(int(a), int(b)) for a, b in zip(iu[keep], ju[keep])]
                )
                if contains_subgraph(sample, tg):
                    hits[ci:] += 1  # CRN: containment is monotone in c
                    break
        fractions[ni] = hits / trials
    sharpness = fractions[:, -1] - fractions[:, 0]
    return EmergenceResult(
        target=name,
        target_nodes=tg.n,
        target_links=tg.edge_count,
        z=float(z),
        z_critical=float(z_crit),
        regime=regime,
        n_values=tuple(int(n) for n in n_values),
        c_values=tuple(float(c) for c in c_values),
        fractions=fractions,
        sharpness=sharpness,
    )


# ---------------------------------------------------------------------------
# lattice bond percolation


@dataclass(frozen=True)
class TrialRecord:
    spanning: bool
    largest_fraction: float


@dataclass(frozen=True)
class ClusterStats:
    p: float
    width: int
    height: int
    trials: int
    spanning_prob: float
    spanning_ci: float           # 95% normal-approximation half width
    largest_fraction_mean: float
    histogram: dict[int, int]    # cluster size -> count, aggregated over trials
    records: tuple[TrialRecord, ...]

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "spanning_prob": self.spanning_prob,
            "largest_fraction_mean": self.largest_fraction_mean,
            "ci": self.spanning_ci,
        }


def _lattice_run(width: int, height: int, open_h: np.ndarray, open_v: np.ndarray):
    """Union-find pass over the open bonds; returns (spanning, largest, hist)."""
    n = width * height
    parent = list(range(n))
    size = [1] * n

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    wm1 = width - 1
    for idx in np.flatnonzero(open_h):
        y, x = divmod(int(idx), wm1)
        a = find(y * width + x)
        b = find(y * width + x + 1)
        if a != b:
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
    for idx in np.flatnonzero(open_v):
        s = int(idx)
        a = find(s)
        b = find(s + width)
        if a != b:
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
    left_roots = {find(y * width) for y in range(height)}
    right_roots = {find(y * width + width - 1) for y in range(height)}
    spanning = not left_roots.isdisjoint(right_roots)
    roots = {find(i) for i in range(n)}
    hist: dict[int, int] = {}
    largest = 0
    for r in roots:
        s = size[r]
        hist[s] = hist.get(s, 0) + 1
        if s > largest:
            largest = s
    return spanning, largest / n, hist


def _bond_counts(width: int, height: int) -> tuple[int, int]:
    return (width - 1) * height, (height - 1) * width


def bond_percolation_curve(
    width: int,
    height: int,
    p_values: Sequence[float],
    trials: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> list[ClusterStats]:
    """Bond percolation at each p with common random numbers across the grid."""
    if width < 2 or height < 1:
        raise ValueError("lattice needs width >= 2 and height >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ps = [float(p) for p in p_values]
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise ValueError("bond probabilities must lie in [0, 1]")
    nh, nv = _bond_counts(width, height)
    trial_seeds = np.random.SeedSequence(seed).spawn(trials)

    def one_trial(ts) -> list:
        rng = np.random.default_rng(ts)
        uh = rng.random(nh)
        uv = rng.random(nv)
        return [_lattice_run(width, height, uh < p, uv < p) for p in ps]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(one_trial, trial_seeds))
    else:
        per_trial = [one_trial(ts) for ts in trial_seeds]

    out = []
    for pi, p in enumerate(ps):
        rows = [per_trial[t][pi] for t in range(trials)]
        spans = np.array([r[0] for r in rows], dtype=float)
        largests = np.array([r[1] for r in rows])
        hist: dict[int, int] = {}
        for _, _, h in rows:
            for k, v in h.items():
                hist[k] = hist.get(k, 0) + v
        prob = float(spans.mean())
        ci = 1.96 * float(np.sqrt(prob * (1.0 - prob) / trials))
        out.append(ClusterStats(
            p=p, width=width, height=height, trials=trials,
            spanning_prob=prob,
            spanning_ci=ci,
            largest_fraction_mean=float(largests.mean()),
            histogram=hist,
            records=tuple(TrialRecord(bool(r[0]), float(r[1])) for r in rows),
        ))
    return out


def bond_percolation(
    width: int,
    height: int,
    p: float,
    trials: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> ClusterStats:
    """Left-right spanning statistics of one bond probability."""
    return bond_percolation_curve(width, height, [p], trials, seed, threads)[0]


def estimate_spanning_crossing(curve: Sequence[ClusterStats]) -> float | None:
    """Linear interpolation of where spanning probability crosses one half."""
    pts = sorted((s.p, s.spanning_prob) for s in curve)
    for (p0, q0), (p1, q1) in zip(pts, pts[1:]):
        if q0 <= 0.5 <= q1 and q1 > q0:
            return float(p0 + (0.5 - q0) * (p1 - p0) / (q1 - q0))
        if q0 == 0.5:
            return float(p0)
    if pts and pts[-1][1] == 0.5:
        return float(pts[-1][0])
    return None


@dataclass(frozen=True)
class CepResult:
    link_p: float
    conversion_probability: float
    stats: ClusterStats
    percolates: bool

    def as_dict(self) -> dict:
        out = self.stats.as_dict()
        out.update({
            "link_p": self.link_p,
            "conversion_probability": self.conversion_probability,
            "percolates": self.percolates,
        })
        return out


def cep_lattice(
    width: int,
    height: int,
    link: LinkState | float,
    trials: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> CepResult:
    """Convert every lattice link with the optimal singlet probability, then
    report whether that entanglement level spans the lattice classically."""
    link_obj = link if isinstance(link, LinkState) else LinkState(float(link))
    scp = singlet_conversion_probability(link_obj)
    stats = bond_percolation(width, height, scp, trials, seed, threads)
    return CepResult(
        link_p=link_obj.p,
        conversion_probability=scp,
        stats=stats,
        percolates=stats.spanning_prob >= 0.5,
    )
