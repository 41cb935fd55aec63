"""Discrete spectra: dispersion polynomials, pencils, roots and norms."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as P
from scipy import linalg

from .exceptions import EPDegeneracyError, ModelMismatchError
from .models import (
    Family,
    ModelSpec,
    energy_from_lambda,
    lambda_polynomial,
    self_energy,
    self_energy_derivative,
)

__all__ = [
    "StateClass",
    "DispersionPolynomial",
    "DiscreteState",
    "PencilPair",
    "COALESCENCE_RTOL",
    "dispersion_polynomial",
    "energy_polynomial",
    "lambda_roots",
    "discrete_states",
    "classify_root",
    "build_pencil",
    "pencil_eigenvalues",
    "eigenstate_norm",
    "residue_weight",
    "closed_form_energies",
    "closed_form_lambdas",
    "discriminant",
    "min_root_separation",
]

COALESCENCE_RTOL = 1e-6
SPURIOUS_RTOL = 1e-8
REAL_RTOL = 1e-12


class StateClass(str, enum.Enum):
    BOUND = "bound"
    VIRTUAL = "virtual"
    RESONANCE = "resonance"
    ANTI_RESONANCE = "anti_resonance"


@dataclass(frozen=True)
class DispersionPolynomial:
    """Discrete-state condition in both representations (ascending order)."""

    model: ModelSpec
    lambda_coeffs: np.ndarray
    energy_coeffs: np.ndarray

    @property
    def lambda_degree(self) -> int:
        return len(np.trim_zeros(self.lambda_coeffs, "b")) - 1

    @property
    def energy_degree(self) -> int:
        return len(np.trim_zeros(self.energy_coeffs, "b")) - 1

    def eval_lambda(self, lam):
        return P.polyval(lam, self.lambda_coeffs)

    def eval_energy(self, E):
        return P.polyval(E, self.energy_coeffs)


@dataclass(frozen=True)
class DiscreteState:
    energy: complex
    lam: complex
    classification: StateClass
    norm: complex | None
    near_coalescent: bool = False

    @property
    def weight(self) -> complex | None:
        """Residue of the Green's function in E (``norm * (1 - lam**2)``)."""
        return None if self.norm is None else self.norm * (1.0 - self.lam ** 2)


@dataclass(frozen=True)
class PencilPair:
    F: np.ndarray
    G: np.ndarray

    @property
    def dimension(self) -> int:
        return self.F.shape[0]


def _chebyshev_in_energy(n):
    """Power-series coefficients in E of T_n(-E/2) and U_{n-1}(-E/2)."""
    t = cheb.cheb2poly([0] * n + [1])
    u = P.polyder(t) / n
    scale_t = (-0.5) ** np.arange(len(t))
    scale_u = (-0.5) ** np.arange(len(u))
    return t * scale_t, u * scale_u


def energy_polynomial(model: ModelSpec) -> np.ndarray:
    """Ascending coefficients of the discrete-state polynomial in E.

    The side-dot form follows from writing the pole condition with
    ``lam**n = T_n + (s/2) U_{n-1}`` (``s = sqrt(E**2 - 4)``), squaring
    out ``s`` and using ``T_n**2 - (c**2 - 1) U_{n-1}**2 = 1``:

        p(E) = -[(E - eps)**2 + 2 g**2 (E - eps) U T + g**4 U**2]

    which has degree 2n and reproduces the printed octic for n = 4.
    """
    g2 = model.g ** 2
    if model.family is Family.QUBIT:
        V2 = model.V ** 2
        return np.array([V2 ** 2, 0.0, g2 ** 2 + (g2 - 2.0) * V2, 0.0, 1.0 - g2])
    eps = model.eps_d
    if model.family is Family.END_DOT:
        return np.array([eps ** 2 + g2 ** 2, -eps * (2.0 - g2), 1.0 - g2])
    t, u = _chebyshev_in_energy(model.n)
    shift = np.array([-eps, 1.0])
    out = P.polyadd(P.polymul(shift, shift), 2.0 * g2 * P.polymul(shift, P.polymul(u, t)))
    out = P.polyadd(out, g2 ** 2 * P.polymul(u, u))
    return -np.asarray(out, dtype=float)


def dispersion_polynomial(model: ModelSpec) -> DispersionPolynomial:
    return DispersionPolynomial(model, lambda_polynomial(model), energy_polynomial(model))


def _polish(coeffs, roots, iterations=6):
    dcoeffs = P.polyder(coeffs)
    out = np.array(roots, dtype=complex)
    for i, x in enumerate(out):
        fx = P.polyval(x, coeffs)
        for _ in range(iterations):
            d = P.polyval(x, dcoeffs)
            if d == 0 or fx == 0:
                break
            trial = x - fx / d
            ft = P.polyval(trial, coeffs)
            if abs(ft) >= abs(fx):
                break
            x, fx = trial, ft
        out[i] = x
    return out


def _scrub_real(roots, coeffs):
    # real polynomial: snap numerically-real roots onto the axis
    out = roots.copy()
    mask = np.abs(out.imag) <= REAL_RTOL * (1.0 + np.abs(out))
    out[mask] = out[mask].real
    return out


def _pole_residual(model, lam):
    E = energy_from_lambda(lam)
    sig = self_energy(model, lam)
    scale = 1.0 + abs(E) + abs(model.onsite) + abs(sig)
    return abs(E - model.onsite - sig) / scale


def lambda_roots(model: ModelSpec, polish=True) -> np.ndarray:
    """All discrete-state roots in lam (companion matrix, Newton polished).

    Roots failing the pole-condition residual check (cleared denominators,
    lam = 0) are dropped.
    """
    coeffs = lambda_polynomial(model)
    roots = np.roots(coeffs[::-1]).astype(complex)
    if polish:
        roots = _polish(coeffs, roots)
    roots = _scrub_real(roots, coeffs)
    keep = [r for r in roots if r != 0 and _pole_residual(model, r) <= SPURIOUS_RTOL]
    return np.array(keep, dtype=complex)


def min_root_separation(roots) -> float:
    """Smallest relative pairwise distance ``|li - lj| / (1 + |li|)``."""
    roots = np.asarray(roots)
    if len(roots) < 2:
        return np.inf
    diff = np.abs(roots[:, None] - roots[None, :]) / (1.0 + np.abs(roots[:, None]))
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def _coalescent_mask(roots, rtol=COALESCENCE_RTOL):
    roots = np.asarray(roots)
    diff = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(diff, np.inf)
    return (diff < rtol * (1.0 + np.abs(roots))[:, None]).any(axis=1)


def classify_root(lam) -> StateClass:
    lam = complex(lam)
    E = energy_from_lambda(lam)
    if abs(E.imag) <= REAL_RTOL * (1.0 + abs(E)) or lam.imag == 0:
        return StateClass.BOUND if abs(lam) < 1.0 else StateClass.VIRTUAL
    return StateClass.RESONANCE if E.imag < 0 else StateClass.ANTI_RESONANCE


def _norm_from_lambda(model, lam):
    lam2 = lam * lam
    return 1.0 / (1.0 - lam2 - lam2 * self_energy_derivative(model, lam))


def discrete_states(model: ModelSpec) -> list[DiscreteState]:
    """Every discrete solution, classified, with its norm.

    Near-coalescent roots are flagged (``near_coalescent``) and carry
    ``norm=None``; they are never merged.
    """
    roots = lambda_roots(model)
    flags = _coalescent_mask(roots) if len(roots) > 1 else np.zeros(len(roots), bool)
    states = []
    for lam, flag in zip(roots, flags):
        E = energy_from_lambda(lam)
        if E.imag != 0 and abs(E.imag) <= REAL_RTOL * (1.0 + abs(E)):
            E = complex(E.real, 0.0)
        norm = None if flag else complex(_norm_from_lambda(model, lam))
        states.append(DiscreteState(complex(E), complex(lam), classify_root(lam), norm, bool(flag)))
    states.sort(key=lambda s: (round(s.energy.real, 12), s.energy.imag))
    return states


def eigenstate_norm(model: ModelSpec, state) -> complex:
    """Norm ``<d|psi><psi~|d>`` of a discrete state in the lam formalism.

    Equals ``1 / (1 - lam**2 - lam**2 dSigma/dlam)``; for the end dot this
    is ``1 / (1 - (1 - g**2) lam**2)`` and for the qubit it reproduces the
    ``V**2 lam**2 / (...)`` form for ``<d1|psi>**2``.  ``state`` may be a
    ``DiscreteState`` or a root ``lam``.
    """
    lam = complex(state.lam if isinstance(state, DiscreteState) else state)
    roots = lambda_roots(model)
    if len(roots) > 1:
        others = roots[np.argsort(np.abs(roots - lam))[1:]]
        if np.min(np.abs(others - lam)) < COALESCENCE_RTOL * (1.0 + abs(lam)):
            raise EPDegeneracyError(
                f"state lam={lam:.12g} is coalescent at an exceptional point; its norm diverges")
    return complex(_norm_from_lambda(model, lam))


def residue_weight(model: ModelSpec, state) -> complex:
    """Residue of the initial-level Green's function in E at the state."""
    lam = complex(state.lam if isinstance(state, DiscreteState) else state)
    return eigenstate_norm(model, lam) * (1.0 - lam * lam)


def build_pencil(model: ModelSpec) -> PencilPair:
    """Linearised pencil ``(F, G)`` with ``det(F - lam G) = 0``."""
    g2 = model.g ** 2
    if model.family is Family.QUBIT:
        V = model.V
        F = np.array([[0, 0, 1, 0],
                      [0, 0, 0, 1],
                      [1, 0, 0, -V],
                      [0, 1, -V, 0]], dtype=float)
        G = np.diag([1.0, 1.0, -1.0, g2 - 1.0])
    elif model.family is Family.END_DOT:
        F = np.array([[0.0, 1.0], [1.0, model.eps_d]])
        G = np.diag([1.0, -1.0 + g2])
    else:
        raise ModelMismatchError("no linearised pencil for the side-coupled dot")
    return PencilPair(F, G)


def pencil_eigenvalues(pencil: PencilPair) -> np.ndarray:
    return linalg.eigvals(pencil.F, pencil.G)


def closed_form_energies(model: ModelSpec) -> np.ndarray:
    """Explicit discrete energies for the qubit (four) and end dot (two)."""
    g2 = model.g ** 2
    if model.family is Family.QUBIT:
        V2 = model.V ** 2
        inner = np.sqrt(complex(g2 ** 2 + 2 * (g2 - 2) * V2 + V2 ** 2))
        out = []
        for s_in in (1, -1):
            e2 = ((2 - g2) * V2 - g2 ** 2 + s_in * g2 * inner) / (2 * (1 - g2))
            root = np.sqrt(complex(e2))
            out += [root, -root]
        return np.array(out)
    if model.family is Family.END_DOT:
        eps = model.eps_d
        root = np.sqrt(complex(eps ** 2 - 4 * (1 - g2)))
        return np.array([(eps * (2 - g2) + s * g2 * root) / (2 * (1 - g2)) for s in (1, -1)])
    raise ModelMismatchError("closed-form energies exist for hq and hd only")


def closed_form_lambdas(model: ModelSpec) -> np.ndarray:
    g2 = model.g ** 2
    if model.family is Family.QUBIT:
        V2 = model.V ** 2
        inner = np.sqrt(complex(g2 ** 2 + 2 * (g2 - 2) * V2 + V2 ** 2))
        out = []
        for s_in in (1, -1):
            l2 = (V2 + g2 - 2 + s_in * inner) / (2 * (1 - g2))
            root = np.sqrt(complex(l2))
            out += [root, -root]
        return np.array(out)
    if model.family is Family.END_DOT:
        eps = model.eps_d
        root = np.sqrt(complex(eps ** 2 - 4 * (1 - g2)))
        return np.array([(-eps - root) / (2 * (1 - g2)), (-eps + root) / (2 * (1 - g2))])
    raise ModelMismatchError("closed-form roots exist for hq and hd only")


def discriminant(model: ModelSpec, roots=None) -> float:
    """Discriminant of the lam-polynomial from its root multiset.

    Real for real coefficients; its sign is ``(-1)**(number of complex
    pairs)``.
    """
    coeffs = np.trim_zeros(lambda_polynomial(model), "b")
    if roots is None:
        roots = lambda_roots(model)
    roots = np.asarray(roots)
    d = len(roots)
    prod = complex(coeffs[-1]) ** (2 * d - 2)
    for i in range(d):
        for j in range(i + 1, d):
            prod *= (roots[i] - roots[j]) ** 2
    return float(prod.real)
