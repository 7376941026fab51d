"""Return probability and bipartite entanglement entropy.

The entropy follows the natural-log convention S = -Tr[rho ln rho].  A
partition is a list of qubit indices forming the target subsystem; the
complement is the traced-out environment.  Reduced density matrices keep
the shared bit convention: bit r of the reduced index corresponds to the
r-th smallest qubit in the partition.
"""

from __future__ import annotations

import numpy as np

EIG_FLOOR = 1e-14  # eigenvalues below this contribute zero entropy


def return_probability(psi0: np.ndarray, psi_t: np.ndarray) -> float:
    """|<psi0|psi(t)>|^2."""
    psi0 = np.asarray(psi0)
    psi_t = np.asarray(psi_t)
    if psi0.shape != psi_t.shape:
        raise ValueError(f"state dimensions differ: {psi0.shape} vs {psi_t.shape}")
    return float(np.abs(np.vdot(psi0, psi_t)) ** 2)


def return_probability_series(psi0: np.ndarray, states: np.ndarray) -> np.ndarray:
    """P(t) for a (n_times, dim) array of states."""
    states = np.asarray(states)
    if states.shape[-1] != np.shape(psi0)[-1]:
        raise ValueError("state dimensions differ")
    return np.abs(states @ np.conj(psi0)) ** 2


def check_partition(part, L: int) -> tuple[int, ...]:
    """Validate and sort a subsystem: non-empty proper subset of 0..L-1."""
    qubits = tuple(sorted(int(q) for q in part))
    if len(qubits) == 0:
        raise ValueError("partition must be non-empty")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"partition has duplicate qubits: {qubits}")
    if qubits[0] < 0 or qubits[-1] >= L:
        raise ValueError(f"partition {qubits} out of range for L={L}")
    if len(qubits) >= L:
        raise ValueError("partition must be a proper subset of the qubits")
    return qubits


def _n_qubits(dim: int) -> int:
    L = int(round(np.log2(dim)))
    if 2 ** L != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    return L


def _bipartition_matrix(psi: np.ndarray, qubits: tuple[int, ...], L: int) -> np.ndarray:
    """Reshape a full-space pure state into a 2^|a| x 2^|b| matrix.

    Row index runs over the subsystem configurations (bit r = r-th
    smallest subsystem qubit), column index over the environment.
    Leading axes of psi (e.g. time) are preserved.
    """
    rest = tuple(q for q in range(L) if q not in qubits)
    # numpy axis L-1-q corresponds to qubit q; descending qubit order keeps
    # the smallest qubit on the fastest axis, matching the bit convention.
    axes = [L - 1 - q for q in reversed(qubits)] + [L - 1 - q for q in reversed(rest)]
    lead = psi.shape[:-1]
    cube = psi.reshape(lead + (2,) * L)
    offset = len(lead)
    cube = cube.transpose(tuple(range(offset)) + tuple(offset + a for a in axes))
    return cube.reshape(lead + (2 ** len(qubits), 2 ** len(rest)))


def reduced_density(psi: np.ndarray, part) -> np.ndarray:
    """Partial trace of |psi><psi| onto the partition's qubits.

    psi must live in the full 2**L space (embed sector states first).
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("reduced_density takes a single state vector")
    L = _n_qubits(psi.shape[0])
    qubits = check_partition(part, L)
    A = _bipartition_matrix(psi, qubits, L)
    return A @ A.conj().T


def entanglement_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy -Tr[rho ln rho] of a density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=1e-10):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min()}")
    p = evals[evals > EIG_FLOOR]
    return float(-np.sum(p * np.log(p)))


def entropy_series(states: np.ndarray, part) -> np.ndarray:
    """S(t) of a pure-state trajectory, shape (n_times, 2**L).

    Uses the Schmidt decomposition (singular values of the bipartition
    matrix), which for pure states equals diagonalising the reduced
    density matrix.
    """
    states = np.asarray(states, dtype=complex)
    if states.ndim != 2:
        raise ValueError("entropy_series takes a (n_times, dim) array")
    L = _n_qubits(states.shape[1])
    qubits = check_partition(part, L)
    A = _bipartition_matrix(states, qubits, L)
    sv = np.linalg.svd(A, compute_uv=False)
    p = sv ** 2
    out = np.where(p > EIG_FLOOR, -p * np.log(np.where(p > EIG_FLOOR, p, 1.0)), 0.0)
    return out.sum(axis=-1)
