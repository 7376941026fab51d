import io

import numpy as np
import pytest

from spinnet.hamiltonian import (CouplingAssignment, build_hamiltonian,
                                 dump_hamiltonian_csv, embed_state, full_basis,
                                 n_down, sector_restrict)
from spinnet.topology import build_graph


def random_couplings(graph, rng, scale=1.0):
    return rng.normal(1.0, scale, graph.n_edges)


def test_two_qubit_spectrum():
    g = build_graph("stick", "chain", 1)
    H = build_hamiltonian(g, [1.0])
    assert np.allclose(np.linalg.eigvalsh(H.matrix), [-3.0, 1.0, 1.0, 1.0])


def test_zero_couplings_zero_matrix():
    g = build_graph("triangle", "ring", 3)
    H = build_hamiltonian(g, np.zeros(g.n_edges))
    assert not H.matrix.any()


@pytest.mark.parametrize("unit,config,n", [("node", "chain", 4), ("stick", "ring", 3)])
def test_ferromagnetic_eigenstates(unit, config, n):
    g = build_graph(unit, config, n)
    e_z = 0.3
    j0 = 1.7
    H = build_hamiltonian(g, np.full(g.n_edges, j0), e_z=e_z)
    up = np.zeros(2 ** g.L)
    up[0] = 1.0
    down = np.zeros(2 ** g.L)
    down[-1] = 1.0
    assert np.allclose(H.matrix @ up, (j0 * g.n_edges + e_z * g.L) * up)
    assert np.allclose(H.matrix @ down, (j0 * g.n_edges - e_z * g.L) * down)


def test_hermitian_and_magnetization_blocks():
    rng = np.random.default_rng(0)
    g = build_graph("triangle", "chain", 2)
    for _ in range(5):
        H = build_hamiltonian(g, random_couplings(g, rng), e_z=rng.normal())
        M = H.matrix
        assert np.allclose(M, M.T, rtol=1e-12, atol=1e-12)
        counts = n_down(full_basis(g.L), g.L)
        different = counts[:, None] != counts[None, :]
        assert not M[different].any()


def test_coupling_scaling_linearity():
    rng = np.random.default_rng(1)
    g = build_graph("node", "ring", 5)
    j = random_couplings(g, rng)
    H1 = build_hamiltonian(g, j).matrix
    H3 = build_hamiltonian(g, 3.0 * j).matrix
    assert np.allclose(H3, 3.0 * H1)


def test_sector_dimensions():
    g = build_graph("node", "chain", 10)
    assert len(sector_restrict(g, 5)) == 252
    assert list(sector_restrict(2, 1)) == [1, 2]
    assert len(sector_restrict(g, 0)) == 1


def test_sector_out_of_range():
    g = build_graph("node", "chain", 4)
    with pytest.raises(ValueError, match="n_up"):
        sector_restrict(g, 5)


def test_sector_blocks_reproduce_full_spectrum():
    rng = np.random.default_rng(2)
    g = build_graph("node", "chain", 4)
    j = random_couplings(g, rng)
    full = np.sort(np.linalg.eigvalsh(build_hamiltonian(g, j).matrix))
    per_sector = np.concatenate([
        np.linalg.eigvalsh(build_hamiltonian(g, j, basis=sector_restrict(g, k)).matrix)
        for k in range(g.L + 1)])
    assert np.allclose(np.sort(per_sector), full, atol=1e-12)


def test_sector_block_matches_full_submatrix():
    rng = np.random.default_rng(3)
    g = build_graph("stick", "chain", 2)
    j = random_couplings(g, rng)
    e_z = 0.2
    basis = sector_restrict(g, 2)
    block = build_hamiltonian(g, j, e_z=e_z, basis=basis).matrix
    full = build_hamiltonian(g, j, e_z=e_z).matrix
    assert np.allclose(block, full[np.ix_(basis, basis)])


def test_coupling_mismatch_rejected():
    g = build_graph("node", "chain", 4)
    with pytest.raises(ValueError, match="couplings"):
        build_hamiltonian(g, [1.0, 2.0])
    other = build_graph("node", "ring", 3)
    assign = CouplingAssignment(graph=other, values=np.ones(other.n_edges))
    with pytest.raises(ValueError, match="different graph"):
        build_hamiltonian(g, assign)


def test_coupling_assignment_validation():
    g = build_graph("node", "chain", 3)
    with pytest.raises(ValueError, match="cover"):
        CouplingAssignment(graph=g, values=np.ones(5))
    with pytest.raises(ValueError, match="dt"):
        CouplingAssignment(graph=g, values=np.ones((2, 10)))
    traces = CouplingAssignment(graph=g, values=np.ones((2, 11)), dt=0.1)
    assert not traces.is_static
    assert traces.duration == pytest.approx(1.0)


def test_embed_state():
    basis = np.array([1, 2])
    psi = np.array([0.6, 0.8j])
    full = embed_state(psi, basis, 2)
    assert full.shape == (4,)
    assert full[1] == 0.6 and full[2] == 0.8j and full[0] == 0 and full[3] == 0


def test_dump_csv():
    g = build_graph("stick", "chain", 1)
    H = build_hamiltonian(g, [1.0])
    buf = io.StringIO()
    n = dump_hamiltonian_csv(H, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) == n + 1
    assert "1,2,2" in [ln for ln in lines]  # flip-flop element 2J between |01> and |10>
