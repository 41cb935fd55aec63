"""Exact propagation on a finite chain (the reference oracle)."""
from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from ..exceptions import ReflectionError
from ..models import Family, ModelSpec
from .series import TimeSeries, as_time_grid

GROUP_VELOCITY = 2.0
SITE_MARGIN = 20


def required_sites(model: ModelSpec, t_max: float, margin: int = SITE_MARGIN) -> int:
    """Chain length keeping boundary reflections away from the dot up to ``t_max``."""
    return int(math.ceil(2.0 * GROUP_VELOCITY * t_max)) + margin + model.site


def lattice_hamiltonian(model: ModelSpec, n_sites: int) -> np.ndarray:
    """Real symmetric Hamiltonian; index 0 is the initially occupied level.

    Chain sites follow the local levels (one for the dots, two for the
    qubit), with hopping ``-1`` between neighbours.
    """
    if n_sites < model.site:
        raise ValueError("chain shorter than the attachment site")
    local = 2 if model.family is Family.QUBIT else 1
    dim = local + n_sites
    H = np.zeros((dim, dim))
    idx = np.arange(local, dim - 1)
    H[idx, idx + 1] = H[idx + 1, idx] = -1.0
    if model.family is Family.QUBIT:
        H[0, 1] = H[1, 0] = -model.V
        H[1, 2] = H[2, 1] = -model.g
    else:
        H[0, 0] = model.eps_d
        j = local + model.site - 1
        H[0, j] = H[j, 0] = -model.g
    return H


def lattice_survival(model: ModelSpec, t_grid, n_sites: int | None = None,
                     check_norm: bool = True) -> TimeSeries:
    """Survival probability from full diagonalisation of a finite chain.

    Parameters
    ----------
    n_sites : int, optional
        Chain length.  Defaults to the smallest reflection-free length.
    check_norm : bool
        Record the largest deviation of the total norm from 1 in
        ``meta['norm_drift']``.

    Raises
    ------
    ReflectionError
        If ``n_sites`` is too short for ``max(t_grid)``.
    """
    t = as_time_grid(t_grid)
    need = required_sites(model, t[-1])
    if n_sites is None:
        n_sites = need
    elif n_sites < need:
        raise ReflectionError(f"{n_sites} sites allow reflections before t = {t[-1]:g}; "
                              f"need at least {need}", required_sites=need)
    H = lattice_hamiltonian(model, n_sites)
    w, U = linalg.eigh(H)
    c = U[0, :]
    phase = np.exp(-1j * np.outer(t, w))
    amp = phase @ (c * c)
    meta = {"n_sites": n_sites}
    if check_norm:
        drift = 0.0
        for chunk in np.array_split(np.arange(len(t)), max(1, len(t) // 64)):
            psi = (phase[chunk] * c) @ U.T
            drift = max(drift, float(np.max(np.abs(np.sum(np.abs(psi) ** 2, axis=1) - 1.0))))
        meta["norm_drift"] = drift
    return TimeSeries(t, np.abs(amp) ** 2, "lattice", model, amp, meta)
