"""Exchange Hamiltonians over the computational spin basis.

Conventions, shared by every module:

* Basis index b encodes qubit i as spin-down iff bit i of b is set, so
  index 0 is the all-up state.
* Pauli matrices (eigenvalues +-1), not spin-1/2 operators.  The exchange
  term on edge (i, j) is J_e * (sx_i sx_j + sy_i sy_j + sz_i sz_j); an
  optional uniform Zeeman term adds E_z * sum_i sz_i.
* hbar = 1: couplings and E_z carry units of 1/t0, times carry t0, and the
  propagator is exp(-i H t).

In this basis the Hamiltonian is real symmetric: the zz part is diagonal,
and the xx + yy part flips antiparallel pairs with matrix element 2 J_e.
The total sz is conserved, so the matrix is block-diagonal over sectors of
fixed up-spin count; ``sector_restrict`` enumerates one block's basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .topology import QubitGraph


@dataclass(frozen=True)
class CouplingAssignment:
    """Exchange strengths for every edge of a graph, in units of 1/t0.

    ``values`` has shape (n_edges,) for quasi-static noise or
    (n_edges, n_steps) for a per-edge time trace sampled every ``dt``.
    Rows follow the graph's edge order.
    """

    graph: QubitGraph
    values: np.ndarray
    dt: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape[0] != self.graph.n_edges:
            raise ValueError(
                f"coupling values cover {values.shape[0]} edges but the graph "
                f"has {self.graph.n_edges}")
        if values.ndim == 1:
            if self.dt is not None:
                raise ValueError("dt only applies to time traces (2-d values)")
        elif values.ndim == 2:
            if self.dt is None or self.dt <= 0:
                raise ValueError("time traces need a positive sample spacing dt")
        else:
            raise ValueError(f"values must be 1-d or 2-d, got shape {values.shape}")

    @property
    def is_static(self) -> bool:
        return self.values.ndim == 1

    @property
    def n_steps(self) -> int:
        return 1 if self.is_static else self.values.shape[1]

    @property
    def duration(self) -> float:
        """Time spanned by a trace, (n_steps - 1) * dt; 0 for static."""
        return 0.0 if self.is_static else (self.n_steps - 1) * self.dt


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric Hamiltonian block with its basis map.

    ``basis[r]`` is the full-space computational index of matrix row r;
    for the full space this is simply arange(2**L).
    """

    matrix: np.ndarray
    basis: np.ndarray
    L: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_full_space(self) -> bool:
        return self.dim == 2 ** self.L


def n_down(indices: np.ndarray | int, L: int) -> np.ndarray | int:
    """Number of set bits (down spins) of each basis index."""
    b = np.asarray(indices, dtype=np.uint64)
    counts = np.zeros(b.shape, dtype=np.int64)
    for i in range(L):
        counts += ((b >> np.uint64(i)) & np.uint64(1)).astype(np.int64)
    return counts if counts.ndim else int(counts)


def sector_restrict(graph: QubitGraph | int, n_up: int) -> np.ndarray:
    """Basis indices with exactly ``n_up`` up spins, ascending.

    The list has length C(L, n_up); building the Hamiltonian on it
    reproduces the corresponding diagonal block of the full matrix.
    """
    L = graph if isinstance(graph, int) else graph.L
    if not 0 <= n_up <= L:
        raise ValueError(f"n_up must be in [0, {L}], got {n_up}")
    b = np.arange(2 ** L, dtype=np.int64)
    return b[n_down(b, L) == L - n_up]


def full_basis(L: int) -> np.ndarray:
    return np.arange(2 ** L, dtype=np.int64)


def build_hamiltonian(
    graph: QubitGraph,
    couplings: CouplingAssignment | Iterable[float] | np.ndarray,
    e_z: float = 0.0,
    basis: np.ndarray | None = None,
) -> HamiltonianMatrix:
    """Assemble H = sum_e J_e (sx sx + sy sy + sz sz) + E_z sum_i sz_i.

    ``basis`` restricts the matrix to a magnetization sector (an ascending
    index list from ``sector_restrict``); None builds the full 2**L space.
    """
    if isinstance(couplings, CouplingAssignment):
        if couplings.graph != graph:
            raise ValueError("coupling assignment belongs to a different graph")
        if not couplings.is_static:
            raise ValueError("build_hamiltonian needs one value per edge; "
                             "index a trace column first")
        j = couplings.values
    else:
        j = np.asarray(couplings, dtype=float)
        if j.shape != (graph.n_edges,):
            raise ValueError(f"expected {graph.n_edges} couplings, got shape {j.shape}")

    L = graph.L
    if basis is None:
        basis = full_basis(L)
    else:
        basis = np.asarray(basis, dtype=np.int64)
    dim = len(basis)
    H = np.zeros((dim, dim))
    rows = np.arange(dim)
    diag = np.zeros(dim)
    if e_z != 0.0:
        diag += e_z * (L - 2 * n_down(basis, L))

    for e, (i, jq, _tag) in enumerate(graph.edges):
        s_i = 1 - 2 * ((basis >> i) & 1)
        s_j = 1 - 2 * ((basis >> jq) & 1)
        diag += j[e] * (s_i * s_j)
        anti = s_i != s_j
        flipped = basis[anti] ^ ((1 << i) | (1 << jq))
        cols = np.searchsorted(basis, flipped)
        if np.any(cols >= dim) or np.any(basis[np.minimum(cols, dim - 1)] != flipped):
            raise ValueError("basis is not closed under the exchange terms")
        H[rows[anti], cols] += 2.0 * j[e]

    H[rows, rows] = diag
    return HamiltonianMatrix(matrix=H, basis=basis, L=L)


def embed_state(psi: np.ndarray, basis: np.ndarray, L: int) -> np.ndarray:
    """Scatter a sector-basis state into the full 2**L space."""
    psi = np.asarray(psi)
    if psi.shape[-1] != len(basis):
        raise ValueError(f"state dimension {psi.shape[-1]} != basis size {len(basis)}")
    full = np.zeros(psi.shape[:-1] + (2 ** L,), dtype=complex)
    full[..., basis] = psi
    return full


def dump_hamiltonian_csv(H: HamiltonianMatrix, out: IO[str]) -> int:
    """Write nonzero entries as ``row,col,value`` lines; returns the count."""
    out.write("row,col,value\n")
    r, c = np.nonzero(H.matrix)
    for i, jq in zip(r, c):
        out.write(f"{i},{jq},{H.matrix[i, jq]:.12g}\n")
    return len(r)
