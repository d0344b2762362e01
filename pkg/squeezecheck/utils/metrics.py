# Numerical noise floor of the sparse LU solve on the density matrix
HEALTH_TOLERANCE = 1e-8


def state_health(joint_state):
    """
    Returns:
        A dictionary with the hermiticity error, trace error and smallest eigenvalue of a JointState.
    """
    return {
        "hermiticity_error": joint_state.hermiticity_error(),
        "trace_error": joint_state.trace_error(),
        "min_eigenvalue": joint_state.min_eigenvalue(),
    }


def health_issues(joint_state, tol=HEALTH_TOLERANCE):
    """Lists the density-matrix invariants a JointState violates by more than tol."""
    health = state_health(joint_state)
    issues = []
    if health["hermiticity_error"] > tol:
        issues.append(f"non-hermitian rho ({health['hermiticity_error']:.3g})")
    if health["trace_error"] > tol:
        issues.append(f"trace off by {health['trace_error']:.3g}")
    if health["min_eigenvalue"] < -tol:
        issues.append(f"negative eigenvalue {health['min_eigenvalue']:.3g}")
    return issues


def moment_distance(first, second):
    """
    Largest component difference between two QubitStates in the (excitation, coherence) plane.

    Args:
        first: A QubitState.
        second: A QubitState.
    """
    return max(
        abs(first.excitation - second.excitation),
        abs(complex(first.coherence) - complex(second.coherence)),
    )
