"""Shared oracles built without the package's own lattice code."""
import warnings

import numpy as np
import pytest

from epdyn.models import Family, ModelSpec


def chain_matrix(model: ModelSpec, n_sites: int) -> np.ndarray:
    """Dense Hamiltonian assembled directly from the model description."""
    local = 2 if model.family is Family.QUBIT else 1
    dim = local + n_sites
    H = np.zeros((dim, dim))
    for i in range(local, dim - 1):
        H[i, i + 1] = H[i + 1, i] = -1.0
    if model.family is Family.QUBIT:
        H[0, 1] = H[1, 0] = -model.V
        H[1, 2] = H[2, 1] = -model.g
    else:
        H[0, 0] = model.eps_d
        H[0, model.n] = H[model.n, 0] = -model.g
    return H


def resolvent_00(model: ModelSpec, E: complex, n_sites: int = 1500) -> complex:
    """``<0|(E - H)^-1|0>`` of a long finite chain; needs ``Im E`` well above 1/n_sites."""
    H = chain_matrix(model, n_sites)
    rhs = np.zeros(H.shape[0], dtype=complex)
    rhs[0] = 1.0
    return complex(np.linalg.solve(E * np.eye(H.shape[0]) - H, rhs)[0])


def propagator_00(model: ModelSpec, t, n_sites: int) -> np.ndarray:
    """``<0|exp(-iHt)|0>`` via ``eigh`` of ``chain_matrix``."""
    w, U = np.linalg.eigh(chain_matrix(model, n_sites))
    c = U[0] ** 2
    return np.exp(-1j * np.outer(np.asarray(t, float), w)) @ c


def side_dot(g, eps_d, n):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ModelSpec.side_dot(g, eps_d, n)


@pytest.fixture
def qubit_ep2b_model():
    return ModelSpec.qubit(0.75, 1.0 - np.sqrt(1.0 - 0.75 ** 2))


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
