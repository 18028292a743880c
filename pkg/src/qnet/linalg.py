"""Hermitian spectral plumbing and fixed-step master-equation integration.

Design notes:
  * Eigendecompositions come from LAPACK (numpy.linalg.eigh) and are wrapped
    with degeneracy-grouped eigenspace projectors, since downstream long-time
    averages are sums over eigenspaces, not individual eigenvectors.
  * Matrix functions of Hermitian operators are built from the decomposition
    directly, (V * f(w)) @ V^H, instead of generic Pade routines.
  * The density-matrix integrator is a fixed-step classical RK4 with
    re-hermitization and trace renormalization after every step; it refuses
    to continue when the state drifts off the physical manifold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import IntegrationInstabilityError, SymmetryError


def assert_hermitian(m: np.ndarray, tols: Tolerances = DEFAULT_TOLS, name: str = "operator") -> None:
    """Raise SymmetryError with a deviation report unless m is Hermitian."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SymmetryError(f"{name} must be a square matrix, got shape {m.shape}")
    dev = np.abs(m - m.conj().T)
    scale = max(np.abs(m).max(), 1.0) if m.size else 1.0
    worst = float(dev.max()) if m.size else 0.0
    allowed = tols.hermitian_rtol * scale
    if worst > allowed:
        i, j = np.unravel_index(int(dev.argmax()), dev.shape)
        raise SymmetryError(
            f"{name} is not hermitian: max |M - M^H| = {worst:.3e} at entry "
            f"({i},{j}), allowed {allowed:.3e}"
        )


def is_unitary(u: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> bool:
    u = np.asarray(u)
    eye = np.eye(u.shape[0])
    return bool(np.abs(u.conj().T @ u - eye).max() <= tols.unitary_atol)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues, orthonormal eigenvector columns, and
    eigenspace projectors grouped by a degeneracy tolerance."""

    eigenvalues: np.ndarray          # (n,) real, ascending
    vectors: np.ndarray              # (n, n), column k pairs with eigenvalues[k]
    projectors: tuple[np.ndarray, ...]   # one per degenerate group
    group_values: np.ndarray         # (n_groups,) representative eigenvalue per projector

    @property
    def ground_vector(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def ground_degeneracy(self) -> int:
        # the trace of a projector is its rank
        return int(round(float(np.real(np.trace(self.projectors[0])))))


def _group_indices(w: np.ndarray, tol: float) -> list[np.ndarray]:
    """Chain consecutive eigenvalues whose gap is within tol into groups."""
    groups: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return [np.array(g) for g in groups]


def hermitian_eig(
    m: np.ndarray,
    degeneracy_tol: float | None = None,
    tols: Tolerances = DEFAULT_TOLS,
) -> EigenDecomposition:
    """Eigendecompose a Hermitian matrix with grouped eigenspace projectors.

    degeneracy_tol defaults to tols.degeneracy_rtol times the spectral range;
    a zero range (multiple of the identity) collapses to a single group.
    """
    m = np.asarray(m)
    assert_hermitian(m, tols)
    w, v = np.linalg.eigh(m)
    spread = float(w[-1] - w[0])
    if degeneracy_tol is None:
        degeneracy_tol = tols.degeneracy_rtol * spread
    if spread == 0.0:
        idx_groups = [np.arange(len(w))]
    else:
        idx_groups = _group_indices(w, degeneracy_tol)
    projectors = []
    group_values = []
    for idx in idx_groups:
        block = v[:, idx]
        projectors.append(block @ block.conj().T)
        group_values.append(float(w[idx].mean()))
    return EigenDecomposition(
        eigenvalues=w,
        vectors=v,
        projectors=tuple(projectors),
        group_values=np.array(group_values),
    )


def matrix_function_hermitian(m: np.ndarray, f: Callable[[np.ndarray], np.ndarray],
                              tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """f applied to a Hermitian matrix through its eigendecomposition."""
    m = np.asarray(m)
    assert_hermitian(m, tols)
    w, v = np.linalg.eigh(m)
    return (v * f(w)) @ v.conj().T


def expm_hermitian(m: np.ndarray, scale: complex = 1.0,
                   tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """exp(scale * m) for Hermitian m. Purely imaginary scales give unitaries."""
    m = np.asarray(m)
    assert_hermitian(m, tols)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(scale * w)) @ v.conj().T


def lindblad_rhs(h: np.ndarray, jumps: Sequence[np.ndarray] = (),
                 unitary_weight: float = 1.0, dissipative_weight: float = 1.0):
    """Right-hand side d rho/dt = -i wu [H, rho] + wd sum_k (L rho L^H - {L^H L, rho}/2).

    Returns a closure suitable for integrate_master_equation. The jump list
    may be empty (pure Hamiltonian evolution of a density matrix).
    """
    h = np.asarray(h, dtype=complex)
    assert_hermitian(h, name="hamiltonian")
    pairs = [(np.asarray(L, dtype=complex), np.asarray(L, dtype=complex).conj().T) for L in jumps]
    anti = sum((Ld @ L for L, Ld in pairs), np.zeros_like(h))

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = -1j * unitary_weight * (h @ rho - rho @ h)
        if pairs:
            diss = -0.5 * (anti @ rho + rho @ anti)
            for L, Ld in pairs:
                diss += L @ rho @ Ld
            out = out + dissipative_weight * diss
        return out

    return rhs


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], rho: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * dt * k1)
    k3 = rhs(rho + 0.5 * dt * k2)
    k4 = rhs(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray    # (steps+1,), exact multiples of dt
    states: np.ndarray   # (steps+1, n, n) renormalized density matrices

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def populations(self) -> np.ndarray:
        """Real diagonal occupations, shape (steps+1, n)."""
        return np.real(np.einsum("tii->ti", self.states))


def check_physical_state(rho: np.ndarray, t: float, tols: Tolerances = DEFAULT_TOLS) -> None:
    """Raise IntegrationInstabilityError if rho left the density-matrix manifold."""
    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > tols.trace_drift_atol:
        raise IntegrationInstabilityError(
            f"trace drifted to {trace:.9f} at t={t:.6g} (allowed drift "
            f"{tols.trace_drift_atol:.1e}); reduce dt"
        )
    low = float(np.linalg.eigvalsh(rho)[0])
    if low < -tols.negative_eig_atol:
        raise IntegrationInstabilityError(
            f"state eigenvalue {low:.3e} at t={t:.6g} is below "
            f"-{tols.negative_eig_atol:.1e}; reduce dt"
        )


def integrate_master_equation(
    rhs: Callable[[np.ndarray], np.ndarray],
    rho0: np.ndarray,
    t_final: float,
    dt: float,
    tols: Tolerances = DEFAULT_TOLS,
) -> Trajectory:
    """Fixed-step RK4 evolution of a density matrix under a trace-annihilating rhs.

    Every stored state is re-hermitized and trace-renormalized. Trace drift
    beyond tols.trace_drift_atol (before renormalization) or an eigenvalue
    below -tols.negative_eig_atol aborts with IntegrationInstabilityError.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be non-negative, got {t_final}")
    rho = np.asarray(rho0, dtype=complex).copy()
    assert_hermitian(rho, tols, name="initial state")
    if abs(np.trace(rho).real - 1.0) > tols.density_trace_atol:
        raise ValueError(f"initial state trace is {np.trace(rho).real:.9f}, expected 1")
    drift = complex(np.trace(rhs(rho)))
    if abs(drift) > tols.trace_annihilation_atol * max(1.0, float(np.abs(rho).max())):
        raise ValueError(
            f"rhs does not annihilate the trace: tr(rhs(rho0)) = {drift:.3e}"
        )
    steps = int(np.ceil(t_final / dt - 1e-12)) if t_final > 0 else 0
    times = np.arange(steps + 1) * dt
    states = np.empty((steps + 1,) + rho.shape, dtype=complex)
    states[0] = rho
    for k in range(1, steps + 1):
        rho = rk4_step(rhs, rho, dt)
        rho = 0.5 * (rho + rho.conj().T)
        check_physical_state(rho, times[k], tols)
        rho = rho / np.real(np.trace(rho))
        states[k] = rho
    return Trajectory(times=times, states=states)
