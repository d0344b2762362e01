import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, expm_multiply, spsolve

from squeezecheck import config
from squeezecheck.CavitySolver.utils import (
    diagonal_indices,
    joint_dim,
    joint_operators,
    liouvillian_superoperator,
)
from squeezecheck.types.EmitterModel import EmitterModel
from squeezecheck.types.Exceptions import InvalidParamsError, NonConvergenceError, SingularSystemError
from squeezecheck.types.QubitState import QubitState

__all__ = [
    "JointState",
    "SolveReport",
    "build_liouvillian",
    "steady_state",
    "converged_steady_state",
    "exact_relation_residuals",
    "reduced_qubit_state",
    "propagate",
    "dump_liouvillian",
    "CavityEmitter",
]

TRACKED_MOMENTS = ("excitation", "coherence", "a", "n_cav", "a22_a")


@dataclass
class JointState:
    """Truncated density matrix of cavity and emitter together with its moments.

    Attributes:
        n_max: An integer, the Fock-space truncation N.
        rho: A (2(N+1) x 2(N+1)) complex array, rho[2n + i - 1, 2m + j - 1] = rho_{n,i;m,j}.
        moments: A dictionary with the keys "excitation" (<A22>), "coherence" (<A12>), "a" (<a>),
            "n_cav" (<a^dag a>) and "a22_a" (<A22 a>).
        residual: A float, the 2-norm of the Liouvillian applied to rho.
    """

    n_max: int
    rho: np.ndarray
    moments: dict = field(default_factory=dict)
    residual: float = float("nan")

    @property
    def excitation(self):
        return self.moments["excitation"]

    @property
    def coherence(self):
        return self.moments["coherence"]

    @property
    def n_cav(self):
        return self.moments["n_cav"]

    def element(self, n, i, m, j):
        return self.rho[2 * n + i - 1, 2 * m + j - 1]

    def hermiticity_error(self):
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def trace_error(self):
        return float(abs(np.trace(self.rho) - 1.0))

    def min_eigenvalue(self):
        hermitian_part = 0.5 * (self.rho + self.rho.conj().T)
        return float(np.min(np.linalg.eigvalsh(hermitian_part)))


@dataclass
class SolveReport:
    """Outcome of a truncation-converged steady-state solve.

    Attributes:
        state: The JointState at the largest truncation that was solved.
        n_used: An integer, the truncation N of state.
        residual: A float, the Liouvillian residual of state.
        converged: A boolean, True when the tracked moments settled below the tolerance and the residual is
            within the tolerance.
        max_change: A float, the largest moment change between the last two truncations.
    """

    state: JointState
    n_used: int
    residual: float
    converged: bool
    max_change: float = float("nan")

    def raise_for_convergence(self):
        if not self.converged:
            raise NonConvergenceError(
                f"Steady state not converged at N = {self.n_used}: moment change {self.max_change:.3e}, "
                f"residual {self.residual:.3e}"
            )
        return self


def build_liouvillian(params, n_max):
    """
    Builds the steady-state linear system with rho_{0,1;0,1} eliminated through the trace.

    Args:
        params: SystemParams.
        n_max: An integer truncation N >= 1.
    Returns:
        A tuple (matrix, inhomogeneity): a sparse CSR matrix of size 4(N+1)^2 - 1 acting on every density
        matrix element except rho_{0,1;0,1} (row-major over (n, i, m, j)), and the right-hand side that the
        elimination rho_{0,1;0,1} = 1 - sum of the other diagonal elements introduces.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise InvalidParamsError(f"Truncation n_max must be an integer >= 1, got {n_max!r}")

    full = liouvillian_superoperator(params, n_max).tocsc()
    size = full.shape[0]

    eliminated_column = full[1:, 0]
    remaining_diagonal = diagonal_indices(n_max)[1:] - 1
    diagonal_row = sparse.csr_matrix(
        (np.ones(len(remaining_diagonal)), (np.zeros(len(remaining_diagonal), dtype=int), remaining_diagonal)),
        shape=(1, size - 1),
    )

    matrix = full[1:, 1:] - eliminated_column @ diagonal_row
    inhomogeneity = -eliminated_column.toarray().ravel()
    return matrix.tocsr(), inhomogeneity


def _moments(rho, ops):
    def expect(op):
        return complex(np.sum(op.toarray().T * rho))

    a = ops["a"]
    return {
        "excitation": expect(ops["A22"]).real,
        "coherence": expect(ops["A12"]),
        "a": expect(a),
        "n_cav": expect(a.conj().T @ a).real,
        "a22_a": expect(ops["A22"] @ a),
    }


def _joint_state(params, n_max, vector, superop=None):
    if superop is None:
        superop = liouvillian_superoperator(params, n_max)
    dim = joint_dim(n_max)
    rho = vector.reshape(dim, dim)
    residual = float(np.linalg.norm(superop @ vector))
    return JointState(n_max=n_max, rho=rho, moments=_moments(rho, joint_operators(n_max)), residual=residual)


def steady_state(params, n_max):
    """
    Solves the truncated master equation for its steady state at a fixed truncation.

    Args:
        params: SystemParams.
        n_max: An integer truncation N >= 1.
    Returns:
        A JointState with its moments and Liouvillian residual.
    """
    matrix, inhomogeneity = build_liouvillian(params, n_max)

    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            solution = spsolve(matrix.tocsc(), inhomogeneity)
        except (MatrixRankWarning, RuntimeError) as err:
            raise SingularSystemError(f"Steady-state system is singular for {params} at N = {n_max}: {err}")

    if not np.all(np.isfinite(solution)):
        raise SingularSystemError(f"Steady-state solve returned non-finite values for {params} at N = {n_max}")

    vector = np.empty(len(solution) + 1, dtype=complex)
    vector[1:] = solution
    vector[0] = 1.0 - np.sum(vector[diagonal_indices(n_max)[1:]])

    return _joint_state(params, n_max, vector)


def _truncation_schedule(n_cap, schedule):
    schedule = [n for n in schedule if n <= n_cap]
    if not schedule or schedule[-1] < n_cap:
        schedule.append(n_cap)
    return schedule


def _max_moment_change(previous, current):
    return max(abs(previous.moments[key] - current.moments[key]) for key in TRACKED_MOMENTS)


def converged_steady_state(params, tol=None, n_cap=None, schedule=None):
    """
    Solves at increasing truncations until every tracked moment changes by less than tol.

    Args:
        params: SystemParams.
        tol: A float, the convergence tolerance on moments and residual. Defaults to
            config.DEFAULT_SOLVER_PARAMS["tolerance"].
        n_cap: An integer, the largest truncation tried. Defaults to config.DEFAULT_SOLVER_PARAMS["n_cap"].
        schedule: An increasing sequence of truncations. Defaults to config.DEFAULT_SOLVER_PARAMS["schedule"].
    Returns:
        A SolveReport. Non-convergence is reported through SolveReport.converged, never hidden.
    """
    tol = config.DEFAULT_SOLVER_PARAMS["tolerance"] if tol is None else tol
    n_cap = config.DEFAULT_SOLVER_PARAMS["n_cap"] if n_cap is None else n_cap
    schedule = config.DEFAULT_SOLVER_PARAMS["schedule"] if schedule is None else schedule

    if tol <= 0:
        raise InvalidParamsError(f"Tolerance must be > 0, got {tol}")

    previous = None
    max_change = float("nan")
    for n_max in _truncation_schedule(n_cap, list(schedule)):
        state = steady_state(params, n_max)
        if previous is not None:
            max_change = _max_moment_change(previous, state)
            if max_change < tol and state.residual <= tol:
                return SolveReport(
                    state=state, n_used=n_max, residual=state.residual, converged=True, max_change=max_change
                )
        previous = state

    return SolveReport(
        state=previous, n_used=previous.n_max, residual=previous.residual, converged=False, max_change=max_change
    )


def exact_relation_residuals(state, params):
    """
    Residuals of the exact steady-state relations between moments.

    With the environmental channels folded in, the relations read
        (i delta_c + (kappa - p_c)/2) <a> = -i g <A12>,
        (i delta_x + (gamma + gamma_d + p_x)/2) <A12> = i g (2 <A22 a> - <a>) - i rabi (1 - 2 <A22>),
        (gamma + p_x) <A22> = p_x + 2 rabi Im<A21> - (kappa - p_c) <a^dag a> + p_c,
    and reduce to the Purcell proportionality, the coherence equation and the energy balance of the bare
    system when gamma_d = p_x = p_c = 0.

    Returns:
        A tuple of three floats (purcell, coherence, energy_balance).
    """
    m = state.moments
    a, coherence, excitation = m["a"], m["coherence"], m["excitation"]

    purcell = abs(a + 1j * params.g * coherence / (1j * params.delta_c + (params.kappa - params.p_c) / 2))

    v_free = 1j * params.delta_x + (params.gamma + params.gamma_d + params.p_x) / 2
    coherence_balance = abs(
        v_free * coherence - 1j * params.g * (2 * m["a22_a"] - a) + 1j * params.rabi * (1 - 2 * excitation)
    )

    im_a21 = np.imag(np.conj(coherence))
    predicted_excitation = (
        params.p_x
        + 2 * params.rabi * im_a21
        - (params.kappa - params.p_c) * m["n_cav"]
        + params.p_c
    ) / (params.gamma + params.p_x)
    energy_balance = abs(excitation - predicted_excitation)

    return float(purcell), float(coherence_balance), float(energy_balance)


def reduced_qubit_state(state):
    """Traces the cavity out of a JointState."""
    return QubitState(excitation=float(np.real(state.moments["excitation"])), coherence=state.moments["coherence"])


def propagate(params, n_max, times):
    """
    Integrates the master equation from the vacuum, ground-state product state.

    Only meant as a validation oracle for the linear steady-state solve.

    Args:
        params: SystemParams.
        n_max: An integer truncation N >= 1.
        times: An increasing sequence of times, starting at or after 0.
    Returns:
        A list of JointState, one per time.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise InvalidParamsError("times must be a one-dimensional, non-negative, increasing sequence")

    superop = liouvillian_superoperator(params, n_max).tocsc()
    vector = np.zeros(superop.shape[0], dtype=complex)
    vector[0] = 1.0

    states = []
    t_prev = 0.0
    for t in times:
        if t > t_prev:
            vector = expm_multiply(superop * (t - t_prev), vector)
        t_prev = t
        states.append(_joint_state(params, n_max, vector.copy(), superop))
    return states


def dump_liouvillian(params, n_max, path):
    """
    Writes the eliminated steady-state system in coordinate format for cross-implementation diffing.

    Every stored matrix entry becomes a line "row col re im"; the inhomogeneity follows as "rhs row re im"
    lines. Entries are sorted by (row, col).
    """
    matrix, inhomogeneity = build_liouvillian(params, n_max)
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))

    with open(path, "w", newline="\n") as outfile:
        outfile.write(f"# n_max {n_max}\n")
        outfile.write(f"# size {matrix.shape[0]}\n")
        outfile.write(f"# params {params}\n")
        outfile.write("# row col re im\n")
        for k in order:
            value = coo.data[k]
            outfile.write(f"{coo.row[k]} {coo.col[k]} {value.real:.17g} {value.imag:.17g}\n")
        for row in np.flatnonzero(inhomogeneity):
            value = inhomogeneity[row]
            outfile.write(f"rhs {row} {value.real:.17g} {value.imag:.17g}\n")

    return coo.nnz


class CavityEmitter(EmitterModel):
    """Numerical cavity-assisted description of a parameter point.

    It encapsulates the parameter point and the solver settings and runs the truncation-converged solve
    lazily on first access.

    Attributes:
        params: SystemParams of the parameter point.
        tol: A float, the solver tolerance.
        n_cap: An integer, the largest truncation tried.

    Methods:
        solve(self): Runs (once) and returns the SolveReport.
        qubit_state(self): Returns the reduced emitter state of the converged solve.
        is_valid(self): Returns whether the solve converged.
    """

    def __init__(self, params, tol=None, n_cap=None):
        EmitterModel.__init__(self, params)
        self.tol = config.DEFAULT_SOLVER_PARAMS["tolerance"] if tol is None else tol
        self.n_cap = config.DEFAULT_SOLVER_PARAMS["n_cap"] if n_cap is None else n_cap
        self._report = None

    def solve(self):
        if self._report is None:
            self._report = converged_steady_state(self.params, tol=self.tol, n_cap=self.n_cap)
        return self._report

    def qubit_state(self):
        return reduced_qubit_state(self.solve().state)

    def is_valid(self):
        return self.solve().converged
