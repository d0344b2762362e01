import numpy as np
from scipy import sparse

# Emitter levels |1> (ground) and |2> (excited) sit at local indices 0 and 1
EMITTER_DIM = 2


def joint_dim(n_max):
    """Dimension 2 (N + 1) of the truncated cavity x emitter Hilbert space."""
    return EMITTER_DIM * (n_max + 1)


def basis_index(n, i):
    """
    Position of |n, i> in the joint basis.

    Args:
        n: An integer photon number, 0 <= n <= N.
        i: An integer emitter level, 1 (ground) or 2 (excited), following the level labels of A_ij.
    """
    return EMITTER_DIM * n + (i - 1)


def vec_index(n, i, m, j, n_max):
    """Row-major position of rho_{n,i;m,j} in the vectorized density matrix."""
    return basis_index(n, i) * joint_dim(n_max) + basis_index(m, j)


def joint_operators(n_max):
    """
    Builds the truncated joint-space operators.

    Returns:
        A dictionary of sparse CSR matrices: "a" (cavity annihilation), "A12" = |1><2|, "A21" = |2><1|,
        "A22" = |2><2| and "identity".
    """
    photon_numbers = np.arange(1, n_max + 1)
    a_cavity = sparse.diags(np.sqrt(photon_numbers), offsets=1, format="csr", dtype=complex)
    identity_cavity = sparse.identity(n_max + 1, dtype=complex, format="csr")
    identity_emitter = sparse.identity(EMITTER_DIM, dtype=complex, format="csr")

    a12 = sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    a22 = sparse.csr_matrix(np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex))

    return {
        "a": sparse.kron(a_cavity, identity_emitter, format="csr"),
        "A12": sparse.kron(identity_cavity, a12, format="csr"),
        "A21": sparse.kron(identity_cavity, a12.T, format="csr"),
        "A22": sparse.kron(identity_cavity, a22, format="csr"),
        "identity": sparse.identity(joint_dim(n_max), dtype=complex, format="csr"),
    }


def hamiltonian(params, ops):
    """H = delta_x A22 + rabi (A12 + A21) + delta_c a^dag a + g (a^dag A12 + A21 a), with hbar = 1."""
    a = ops["a"]
    a_dag = a.conj().T
    return (
        params.delta_x * ops["A22"]
        + params.rabi * (ops["A12"] + ops["A21"])
        + params.delta_c * (a_dag @ a)
        + params.g * (a_dag @ ops["A12"] + ops["A21"] @ a)
    )


def collapse_channels(params, ops):
    """Lindblad channels (rate, O) of the generator (rate / 2) L_O with L_O[rho] = 2 O rho O^dag - {O^dag O, rho}."""
    channels = [
        (params.gamma, ops["A12"]),
        (params.kappa, ops["a"]),
        (params.gamma_d, ops["A22"]),
        (params.p_x, ops["A21"]),
        (params.p_c, ops["a"].conj().T.tocsr()),
    ]
    return [(rate, op) for rate, op in channels if rate > 0]


def liouvillian_superoperator(params, n_max):
    """
    Full Liouvillian acting on the row-major vectorized density matrix.

    Uses vec(A rho B) = (A kron B^T) vec(rho) for row-major vectorization.
    """
    ops = joint_operators(n_max)
    identity = ops["identity"]

    h = hamiltonian(params, ops)
    superop = -1j * (sparse.kron(h, identity) - sparse.kron(identity, h.T))

    for rate, op in collapse_channels(params, ops):
        op_dag_op = op.conj().T @ op
        superop = superop + (rate / 2) * (
            2 * sparse.kron(op, op.conj())
            - sparse.kron(op_dag_op, identity)
            - sparse.kron(identity, op_dag_op.T)
        )

    return superop.tocsr()


def diagonal_indices(n_max):
    dim = joint_dim(n_max)
    return np.arange(dim) * (dim + 1)
