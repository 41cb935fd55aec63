"""Hamiltonian families, continuum dispersion and self-energies.

Three single-particle models are supported, all built on a semi-infinite
tight-binding chain with hopping ``-J`` (``J = 1`` sets the energy unit):

``Family.QUBIT`` (``hq``)
    Two-site qubit ``d1 - d2`` (coupling ``-V``) whose second site couples
    with ``-g`` to the chain end.
``Family.END_DOT`` (``hd``)
    Single dot with potential ``eps_d`` coupled with ``-g`` to the chain end.
``Family.SIDE_DOT`` (``hn``)
    Single dot with potential ``eps_d`` side-coupled with ``-g`` to chain
    site ``n``.

All internal work uses the uniformising variable ``lam = exp(i k)`` with
``E = -lam - 1/lam``.  Self-energies are rational (for the dots, polynomial)
in ``lam`` and therefore free of branch bookkeeping; the square root
``sqrt(E**2 - 4)`` only appears in the E-plane helpers at the boundary.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ModelMismatchError

__all__ = [
    "Family",
    "ModelSpec",
    "continuum_dispersion",
    "energy_from_lambda",
    "lambda_from_energy",
    "form_factor",
    "self_energy",
    "self_energy_derivative",
    "self_energy_energy_plane",
    "local_green",
    "lambda_coefficients",
    "lambda_coefficient_gradient",
    "lambda_polynomial",
    "lambda_polynomial_gradient",
]

#: Even attachment sites for which the side-dot EP3A has been established.
VALIDATED_SIDE_SITES = (2, 4, 6)


class Family(str, enum.Enum):
    QUBIT = "hq"
    END_DOT = "hd"
    SIDE_DOT = "hn"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"h_q": "hq", "h_d": "hd", "h_n": "hn", "qubit": "hq",
                   "end_dot": "hd", "side_dot": "hn"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of one model instance.

    Use the ``qubit``, ``end_dot`` and ``side_dot`` constructors rather than
    filling the fields by hand.
    """

    family: Family
    g: float
    V: float | None = None
    eps_d: float | None = None
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if not np.isfinite(self.g) or self.g < 0:
            raise ValueError(f"coupling g must be finite and >= 0, got {self.g}")
        if self.family is Family.QUBIT:
            if self.V is None:
                raise ValueError("qubit model needs V")
            if self.eps_d is not None:
                raise ValueError("qubit model has no eps_d")
            if self.n != 1:
                raise ValueError("qubit model has no attachment site")
        else:
            if self.eps_d is None:
                raise ValueError(f"{self.family.value} model needs eps_d")
            if self.V is not None:
                raise ValueError(f"{self.family.value} model has no V")
            if int(self.n) != self.n or self.n < 1:
                raise ValueError(f"attachment site n must be an integer >= 1, got {self.n}")
            object.__setattr__(self, "n", int(self.n))
            if self.family is Family.END_DOT and self.n != 1:
                raise ValueError("end-coupled dot sits at n = 1")

    @classmethod
    def qubit(cls, g, V):
        return cls(Family.QUBIT, float(g), V=float(V))

    @classmethod
    def end_dot(cls, g, eps_d):
        return cls(Family.END_DOT, float(g), eps_d=float(eps_d))

    @classmethod
    def side_dot(cls, g, eps_d, n):
        spec = cls(Family.SIDE_DOT, float(g), eps_d=float(eps_d), n=int(n))
        if spec.n not in VALIDATED_SIDE_SITES:
            warnings.warn(f"side-coupled site n={spec.n} is outside the validated "
                          f"set {VALIDATED_SIDE_SITES}", stacklevel=2)
        return spec

    @property
    def site(self) -> int:
        """Chain site the dot (or qubit) couples to."""
        return self.n

    @property
    def param_name(self) -> str:
        return "V" if self.family is Family.QUBIT else "eps_d"

    @property
    def param(self) -> float:
        """Value of the scan parameter (V for the qubit, eps_d otherwise)."""
        return self.V if self.family is Family.QUBIT else self.eps_d

    @property
    def onsite(self) -> float:
        return 0.0 if self.family is Family.QUBIT else self.eps_d

    @property
    def validated(self) -> bool:
        return self.family is not Family.SIDE_DOT or self.n in VALIDATED_SIDE_SITES

    def with_param(self, value) -> "ModelSpec":
        if self.family is Family.QUBIT:
            return replace(self, V=float(value))
        return replace(self, eps_d=float(value))

    def with_g(self, g) -> "ModelSpec":
        return replace(self, g=float(g))

    def label(self) -> str:
        if self.family is Family.QUBIT:
            return f"hq(g={self.g:g}, V={self.V:g})"
        if self.family is Family.END_DOT:
            return f"hd(g={self.g:g}, eps_d={self.eps_d:g})"
        return f"hn(n={self.n}, g={self.g:g}, eps_d={self.eps_d:g})"


def continuum_dispersion(k):
    """Band energy ``-2 cos k``; complex ``k`` continues analytically."""
    return -2.0 * np.cos(k)


def energy_from_lambda(lam):
    return -lam - 1.0 / lam


def lambda_from_energy(E, sheet="first"):
    """Invert ``E = -lam - 1/lam``.

    The first sheet is ``|lam| < 1``; for real ``E`` inside the band the
    boundary value ``E + i0`` is returned (``lam = exp(ik)``, ``0 < k < pi``).
    The second sheet is the reciprocal.
    """
    E = np.asarray(E, dtype=complex)
    root = np.sqrt(E * E - 4.0 + 0j)
    r1 = (-E + root) / 2.0
    r2 = (-E - root) / 2.0
    a1, a2 = np.abs(r1), np.abs(r2)
    on_circle = np.isclose(a1, 1.0, rtol=0, atol=1e-14) & np.isclose(a2, 1.0, rtol=0, atol=1e-14)
    pick1 = np.where(on_circle, r1.imag > 0, a1 < a2)
    first = np.where(pick1, r1, r2)
    if sheet == "first":
        out = first
    elif sheet == "second":
        out = 1.0 / first
    else:
        raise ValueError("sheet must be 'first' or 'second'")
    return out[()] if out.ndim == 0 else out


def _require_side(model):
    if model.family is not Family.SIDE_DOT:
        raise ModelMismatchError("form factor is defined for the side-coupled dot only")


def form_factor(model: ModelSpec, k):
    """Coupling form factor ``-sqrt(2/pi) sin(n k)`` of the side-coupled dot."""
    _require_side(model)
    return -np.sqrt(2.0 / np.pi) * np.sin(model.n * np.asarray(k, dtype=float))


def _check_lambda(lam):
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ZeroDivisionError("lam = 0 is an essential singularity of the dispersion")
    return lam


def _dot_series(lam, n):
    # 1 + lam^2 + ... + lam^(2n-2)
    lam2 = lam * lam
    acc = np.zeros_like(lam)
    for _ in range(n):
        acc = acc * lam2 + 1.0
    return acc


def self_energy(model: ModelSpec, lam):
    """Self-energy seen by the initially occupied level, as a function of lam.

    For the dots this is ``g**2`` times the chain Green's function at the
    attachment site, ``Sigma = g**2 lam (1 - lam**(2n)) / (lam**2 - 1)``,
    a polynomial in ``lam`` (``-g**2 lam`` for ``n = 1``).  For the qubit it
    is the self-energy of ``d1`` after eliminating ``d2`` and the chain,
    ``V**2 / (E + g**2 lam)``.
    """
    lam = _check_lambda(lam)
    g2 = model.g ** 2
    if model.family is Family.QUBIT:
        out = model.V ** 2 / (energy_from_lambda(lam) + g2 * lam)
    else:
        out = -g2 * lam * _dot_series(lam, model.n)
    return out[()] if out.ndim == 0 else out


def self_energy_derivative(model: ModelSpec, lam):
    """Total derivative ``dSigma/dlam`` (with ``E = E(lam)`` where it enters)."""
    lam = _check_lambda(lam)
    g2 = model.g ** 2
    if model.family is Family.QUBIT:
        denom = energy_from_lambda(lam) + g2 * lam
        ddenom = -1.0 + 1.0 / lam ** 2 + g2
        out = -model.V ** 2 * ddenom / denom ** 2
    else:
        lam2 = lam * lam
        acc = np.zeros_like(lam)
        for j in range(model.n - 1, -1, -1):
            acc = acc * lam2 + (2 * j + 1)
        out = -g2 * acc
    return out[()] if out.ndim == 0 else out


def self_energy_energy_plane(model: ModelSpec, E, sheet="first"):
    """Self-energy as a function of E on the requested sheet.

    Raises at the band edges ``E = +-2`` where the E-plane form is singular.
    """
    E = np.asarray(E, dtype=complex)
    if np.any(np.isclose(E, 2.0, rtol=0, atol=1e-15) | np.isclose(E, -2.0, rtol=0, atol=1e-15)):
        raise ZeroDivisionError("band edge E = +-2 is a branch point of the E-plane self-energy")
    return self_energy(model, lambda_from_energy(E, sheet))


def local_green(model: ModelSpec, lam):
    """Green's function of the initial level, ``1/(E - eps - Sigma)``, at lam."""
    lam = _check_lambda(lam)
    out = 1.0 / (energy_from_lambda(lam) - model.onsite - self_energy(model, lam))
    return out[()] if out.ndim == 0 else out


def lambda_coefficients(family, g, param, n=1) -> np.ndarray:
    """Ascending coefficients of the lam-polynomial for explicit parameters.

    ``g`` and ``param`` may be complex (used by the exceptional-point
    Newton solvers); see ``lambda_polynomial`` for the form.
    """
    family = Family.parse(family)
    g2 = g * g
    dtype = complex if np.iscomplexobj(g) or np.iscomplexobj(param) else float
    if family is Family.QUBIT:
        return np.array([1.0, 0.0, 2.0 - g2 - param * param, 0.0, 1.0 - g2], dtype=dtype)
    coeffs = np.zeros(2 * n + 1, dtype=dtype)
    coeffs[0] = 1.0
    coeffs[1] = param
    coeffs[2] = 1.0
    coeffs[2::2] -= g2
    return coeffs


def lambda_coefficient_gradient(family, g, param, n=1, wrt="param") -> np.ndarray:
    """Derivative of ``lambda_coefficients`` w.r.t. ``'g'`` or ``'param'``."""
    family = Family.parse(family)
    coeffs = np.zeros_like(lambda_coefficients(family, g, param, n))
    if wrt == "g":
        if family is Family.QUBIT:
            coeffs[2] = coeffs[4] = -2.0 * g
        else:
            coeffs[2::2] = -2.0 * g
    elif wrt == "param":
        if family is Family.QUBIT:
            coeffs[2] = -2.0 * param
        else:
            coeffs[1] = 1.0
    else:
        raise ValueError("wrt must be 'g' or 'param'")
    return coeffs


def lambda_polynomial(model: ModelSpec) -> np.ndarray:
    """Ascending real coefficients of the discrete-state condition in lam.

    Normalised so the constant term is 1:

    * qubit: ``1 + (2 - g**2 - V**2) lam**2 + (1 - g**2) lam**4``
    * dots:  ``1 + eps lam + lam**2 - g**2 lam**2 (1 + lam**2 + ... + lam**(2n-2))``

    The dot Green's function is ``-lam / q(lam)``; the qubit one is
    ``-lam ((1 - g**2) lam**2 + 1) / q(lam)``.
    """
    return lambda_coefficients(model.family, model.g, model.param, model.n)


def lambda_polynomial_gradient(model: ModelSpec, wrt: str) -> np.ndarray:
    """Derivative of ``lambda_polynomial`` coefficients w.r.t. a parameter.

    ``wrt`` is ``'g'`` or ``'param'`` (V for the qubit, eps_d otherwise).
    """
    return lambda_coefficient_gradient(model.family, model.g, model.param, model.n, wrt)
