"""Continuous-time walk evolution, long-time averages, and chirality probes.

Long-time averages always use the closed eigenspace-projector form; time
quadrature of the instantaneous series appears only in tests as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import DisconnectedGraphError
from .graphs import Graph, adjacency_matrix, build_operators, is_connected
from .linalg import EigenDecomposition, hermitian_eig


@dataclass(frozen=True)
class WalkSpec:
    """A Hermitian generator, an initial state, and an evaluation time grid.

    initial may be a node id, a state vector, or a density matrix.
    """

    generator: np.ndarray
    initial: int | np.ndarray
    times: np.ndarray | None = None


@dataclass(frozen=True)
class OccupationResult:
    times: np.ndarray | None = None
    series: np.ndarray | None = None      # (T, n) instantaneous occupations
    long_time: np.ndarray | None = None   # (n,) eigenspace-projector average
    variance: np.ndarray | None = None    # (n,) fluctuation variance of the series


def _initial_state(initial, n: int, tols: Tolerances):
    """Normalize the initial-state argument to ('pure', psi) or ('mixed', rho)."""
    if isinstance(initial, (int, np.integer)):
        if not 0 <= initial < n:
            raise ValueError(f"start node {initial} outside [0, {n})")
        psi = np.zeros(n, dtype=complex)
        psi[int(initial)] = 1.0
        return "pure", psi
    arr = np.asarray(initial, dtype=complex)
    if arr.ndim == 1:
        if arr.shape[0] != n:
            raise ValueError(f"state vector length {arr.shape[0]} != {n}")
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("zero state vector")
        return "pure", arr / norm
    if arr.ndim == 2:
        if arr.shape != (n, n):
            raise ValueError(f"density matrix shape {arr.shape} != ({n}, {n})")
        if np.abs(arr - arr.conj().T).max() > 1e-10:
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(arr).real - 1.0) > tols.density_trace_atol:
            raise ValueError(f"density matrix trace {np.trace(arr).real} != 1")
        if np.linalg.eigvalsh(arr)[0] < -tols.density_psd_atol:
            raise ValueError("density matrix has a negative eigenvalue")
        return "mixed", arr
    raise ValueError("initial must be a node id, a vector, or a density matrix")


def _check_distributions(p: np.ndarray, tols: Tolerances) -> np.ndarray:
    sums = p.sum(axis=-1)
    if np.abs(sums - 1.0).max() > tols.distribution_sum_atol:
        raise RuntimeError(
            f"occupation distribution sum drifted to {sums[np.abs(sums - 1).argmax()]:.12f}"
        )
    if p.min() < -tols.distribution_negative_atol:
        raise RuntimeError(f"negative occupation {p.min():.3e}")
    return np.clip(p, 0.0, None)


def evolve(spec: WalkSpec, tols: Tolerances = DEFAULT_TOLS) -> OccupationResult:
    """Occupation series p_i(t) = <i| U_t rho0 U_t^H |i> on the time grid."""
    gen = np.asarray(spec.generator, dtype=complex)
    dec = hermitian_eig(gen, tols=tols)
    if spec.times is None:
        raise ValueError("evolve needs a time grid")
    times = np.asarray(spec.times, dtype=float)
    kind, state = _initial_state(spec.initial, gen.shape[0], tols)
    w, v = dec.eigenvalues, dec.vectors
    if kind == "pure":
        coeff = v.conj().T @ state
        phases = np.exp(-1j * np.outer(times, w))
        amps = (phases * coeff) @ v.T
        probs = np.abs(amps) ** 2
    else:
        probs = np.empty((len(times), gen.shape[0]))
        for k, t in enumerate(times):
            u = (v * np.exp(-1j * w * t)) @ v.conj().T
            probs[k] = np.real(np.diag(u @ state @ u.conj().T))
    probs = _check_distributions(probs, tols)
    return OccupationResult(
        times=times,
        series=probs,
        variance=probs.var(axis=0),
    )


def long_time_average(spec: WalkSpec, tols: Tolerances = DEFAULT_TOLS) -> OccupationResult:
    """Infinite-time mean occupations via the eigenspace projectors."""
    gen = np.asarray(spec.generator, dtype=complex)
    dec = hermitian_eig(gen, tols=tols)
    kind, state = _initial_state(spec.initial, gen.shape[0], tols)
    n = gen.shape[0]
    avg = np.zeros(n)
    for proj in dec.projectors:
        if kind == "pure":
            avg += np.abs(proj @ state) ** 2
        else:
            avg += np.real(np.diag(proj @ state @ proj))
    avg = _check_distributions(avg[np.newaxis, :], tols)[0]
    return OccupationResult(long_time=avg)


def uniform_superposition(n: int) -> np.ndarray:
    return np.full(n, 1.0 / np.sqrt(n), dtype=complex)


def quantumness(g: Graph, initial="uniform-pure", tols: Tolerances = DEFAULT_TOLS) -> float:
    """Ground-state deficit of the initial state under the Hermitian generator.

    Zero iff the initial state already lies along the generator's ground
    state; vanishes for regular graphs started in the uniform superposition.
    """
    if not is_connected(g):
        raise DisconnectedGraphError(
            "quantumness needs a connected graph (ground state is degenerate)"
        )
    bundle = build_operators(g, tols=tols)
    dec = hermitian_eig(bundle.quantum_generator, tols=tols)
    phi0 = dec.ground_vector
    if isinstance(initial, str):
        if initial == "uniform-pure":
            overlap = abs(np.vdot(phi0, uniform_superposition(g.n))) ** 2
        elif initial == "maximally-mixed":
            overlap = 1.0 / g.n
        else:
            raise ValueError(f"unknown initial-state policy {initial!r}")
    else:
        kind, state = _initial_state(initial, g.n, tols)
        if kind == "pure":
            overlap = abs(np.vdot(phi0, state)) ** 2
        else:
            overlap = float(np.real(np.vdot(phi0, state @ phi0)))
    return float(max(0.0, 1.0 - overlap))


@dataclass(frozen=True)
class ChiralTransportReport:
    times: np.ndarray
    forward: np.ndarray         # p_{source->target}(t) under H
    time_reversed: np.ndarray   # same transport under conj(H)
    max_bias: float
    symmetry_broken: bool


def chiral_transport_report(
    g: Graph,
    source: int,
    target: int,
    times: np.ndarray,
    threshold: float = 1e-9,
    tols: Tolerances = DEFAULT_TOLS,
) -> ChiralTransportReport:
    """Compare site transport under H against its time-reversed counterpart."""
    h = np.asarray(adjacency_matrix(g), dtype=complex)
    times = np.asarray(times, dtype=float)
    fwd = evolve(WalkSpec(h, source, times), tols).series[:, target]
    rev = evolve(WalkSpec(h.conj(), source, times), tols).series[:, target]
    bias = float(np.abs(fwd - rev).max())
    return ChiralTransportReport(
        times=times,
        forward=fwd,
        time_reversed=rev,
        max_bias=bias,
        symmetry_broken=bias > threshold,
    )
