"""Dense exact diagonalization of the Rabi model with truncation control.

The ground state is found per parity sector (two N x N boson problems
instead of one 2N x 2N problem), doubling the Fock dimension from 16
until the global minimum moves by less than ``tol``.  The winning
sector's eigenvector is lifted back to the spin-boson space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EigDecompositionFailure, NonHermitian, NotConverged
from .fock import BOSON, SPIN_BOSON, FockRep, Observable, QuantumState
from .model import ModelParams, build_reduced_hamiltonian, embed_reduced_state

START_DIM = 16
MAX_DIM = 256
DEGENERACY_TOL = 1e-9  # absolute sector gap below which the ground is degenerate


@dataclass(frozen=True)
class GroundSolution:
    """Converged (or best-effort) ground state of the full model.

    ``parity`` is the sector of the returned representative; at
    degenerate points (sector gap < 1e-9, e.g. omega0 = 0) the +1
    representative is returned and ``parity_label`` reads
    ``"degenerate"``.  ``boson_state`` is the sector eigenvector phi
    from which ``state`` was lifted.  ``energy_delta`` is the last
    change under dimension doubling.
    """

    energy: float
    state: QuantumState
    boson_state: QuantumState
    parity: int
    parity_label: str
    sector_gap: float
    dim_used: int
    converged: bool
    energy_delta: float


def _phase_fixed(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec * np.conj(phase)


def ground_state(obs: Observable, kind: str = BOSON) -> tuple[float, QuantumState]:
    """Lowest eigenpair of a Hermitian observable.

    The eigenvector phase is fixed so its largest-modulus amplitude is
    real and positive.
    """
    if not obs.hermitian:
        raise NonHermitian("ground_state requires a Hermitian observable")
    try:
        w, v = scipy.linalg.eigh(obs.matrix)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigDecompositionFailure(str(exc)) from exc
    vec = _phase_fixed(v[:, 0])
    return float(w[0]), QuantumState(vec, kind)


def spectrum_head(obs: Observable, k: int) -> np.ndarray:
    """The k smallest eigenvalues, ascending."""
    if not obs.hermitian:
        raise NonHermitian("spectrum_head requires a Hermitian observable")
    if not 1 <= k <= obs.dim:
        raise ValueError(f"k must be in 1..{obs.dim}, got {k}")
    try:
        w = scipy.linalg.eigh(obs.matrix, eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigDecompositionFailure(str(exc)) from exc
    return w[:k]


def _sector_grounds(params: ModelParams, dim: int):
    out = {}
    for p in (+1, -1):
        rep = FockRep(dim)
        energy, phi = ground_state(build_reduced_hamiltonian(rep, params, p), BOSON)
        out[p] = (energy, phi)
    return out


def _assemble(params: ModelParams, dim: int, delta: float, converged: bool) -> GroundSolution:
    sectors = _sector_grounds(params, dim)
    e_plus, phi_plus = sectors[+1]
    e_minus, phi_minus = sectors[-1]
    gap = e_minus - e_plus
    if abs(gap) < DEGENERACY_TOL:
        # degenerate pair: report the +1 representative
        parity, label = +1, "degenerate"
        energy, phi = e_plus, phi_plus
    elif e_plus <= e_minus:
        parity, label = +1, "+1"
        energy, phi = e_plus, phi_plus
    else:
        parity, label = -1, "-1"
        energy, phi = e_minus, phi_minus
    return GroundSolution(
        energy=float(energy),
        state=embed_reduced_state(phi, parity),
        boson_state=phi,
        parity=parity,
        parity_label=label,
        sector_gap=float(gap),
        dim_used=dim,
        converged=converged,
        energy_delta=float(delta),
    )


def solve_rabi_ground(
    params: ModelParams,
    tol: float = 1e-10,
    max_dim: int = MAX_DIM,
    dim: int | None = None,
) -> GroundSolution:
    """Ground state of the full model with truncation convergence check.

    With ``dim=None`` the Fock dimension doubles from 16 until the
    global ground energy changes by less than ``tol``; otherwise the
    problem is solved at the fixed ``dim`` and the convergence check
    compares against ``dim // 2``.  Raises NotConverged (carrying the
    best-effort solution) when the budget is exhausted.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if dim is not None:
        if dim < 4:
            raise ValueError(f"fixed dim must be >= 4, got {dim}")
        e_half = min(e for e, _ in _sector_grounds(params, dim // 2).values())
        sol = _assemble(params, dim, delta=np.nan, converged=False)
        delta = sol.energy - e_half
        sol = _assemble(params, dim, delta=delta, converged=abs(delta) < tol)
        if not sol.converged:
            raise NotConverged(
                f"energy moved by {delta:.3e} between dim {dim // 2} and {dim}",
                solution=sol,
            )
        return sol

    if max_dim < START_DIM:
        raise ValueError(f"max_dim must be >= {START_DIM}, got {max_dim}")
    previous = None
    current_dim = START_DIM
    delta = np.nan
    while True:
        energy = min(e for e, _ in _sector_grounds(params, current_dim).values())
        if previous is not None:
            delta = energy - previous
            if abs(delta) < tol:
                return _assemble(params, current_dim, delta=delta, converged=True)
        if 2 * current_dim > max_dim:
            sol = _assemble(params, current_dim, delta=delta, converged=False)
            raise NotConverged(
                f"not converged to {tol:.1e} within max_dim {max_dim} "
                f"(last delta {delta:.3e})",
                solution=sol,
            )
        previous = energy
        current_dim *= 2


def convergence_table(
    params: ModelParams,
    tol: float = 1e-10,
    max_dim: int = MAX_DIM,
) -> tuple[list[tuple[int, float, float]], bool]:
    """Dimension-doubling trace: rows (dim, energy, delta), plus success flag.

    The first row has delta = nan.  Doubling stops at the first delta
    below ``tol`` or once ``max_dim`` is exceeded.
    """
    rows: list[tuple[int, float, float]] = []
    previous = None
    current_dim = START_DIM
    while current_dim <= max_dim:
        energy = min(e for e, _ in _sector_grounds(params, current_dim).values())
        delta = np.nan if previous is None else energy - previous
        rows.append((current_dim, float(energy), float(delta)))
        if previous is not None and abs(delta) < tol:
            return rows, True
        previous = energy
        current_dim *= 2
    return rows, False
