"""Closed-form approximants to the survival probability and timescales."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import EPNotRealError, ModelMismatchError
from ..models import Family, ModelSpec
from .series import TimeSeries, as_time_grid
from .spectral import green_derivative, spectral_survival

__all__ = [
    "ApproximantForm",
    "Approximant",
    "Timescales",
    "REFERENCE_COEFFICIENTS",
    "build_approximant",
    "evaluate_approximant",
    "timescales",
    "ep2b_coefficients",
]

#: Reference half-power coefficients C1..C6 at the EP3A for n = 4 and 6.
REFERENCE_COEFFICIENTS = {
    4: (-0.0217969, 0.0286801, -0.0122409, -0.00225201, 0.000980366, -0.000076716),
    6: (-0.011098, 0.0101236, -0.0029150, -0.00050665, 0.000128822, -0.000006557),
}


class ApproximantForm(str, enum.Enum):
    ZENO_Q = "zeno-q"
    ZENO_D = "zeno-d"
    EP2B_INTERMEDIATE = "ep2b-intermediate"
    EP2B_LONG = "ep2b-long"
    EP2A_BANDEDGE = "ep2a-bandedge"
    EP2A_LONG = "ep2a-long"
    EP3A_LONG = "ep3a-long"
    EP3A_HALFPOWER = "ep3a-halfpower"

    @classmethod
    def parse(cls, value) -> "ApproximantForm":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        return cls(key)


_FAMILIES = {
    ApproximantForm.ZENO_Q: (Family.QUBIT,),
    ApproximantForm.ZENO_D: (Family.END_DOT, Family.SIDE_DOT),
    ApproximantForm.EP2B_INTERMEDIATE: (Family.QUBIT,),
    ApproximantForm.EP2B_LONG: (Family.QUBIT,),
    ApproximantForm.EP2A_BANDEDGE: (Family.END_DOT,),
    ApproximantForm.EP2A_LONG: (Family.END_DOT,),
    ApproximantForm.EP3A_LONG: (Family.SIDE_DOT,),
    ApproximantForm.EP3A_HALFPOWER: (Family.SIDE_DOT,),
}

_PARAMS = {
    ApproximantForm.ZENO_Q: ("V",),
    ApproximantForm.ZENO_D: ("g",),
    ApproximantForm.EP2B_INTERMEDIATE: ("gamma", "D1", "D2"),
    ApproximantForm.EP2B_LONG: ("C",),
    ApproximantForm.EP2A_BANDEDGE: ("delta",),
    ApproximantForm.EP2A_LONG: ("C",),
    ApproximantForm.EP3A_LONG: ("C",),
    ApproximantForm.EP3A_HALFPOWER: ("C1", "C2", "C3", "C4", "C5", "C6"),
}

_ANCHORED = (ApproximantForm.EP2B_LONG, ApproximantForm.EP2A_LONG, ApproximantForm.EP3A_LONG)


def ep2b_coefficients(g: float) -> dict:
    """Decay rate and polynomial prefactor coefficients at the qubit EP2B."""
    if g >= 1.0:
        raise EPNotRealError(f"EP2B is not real-valued for g = {g:g} >= 1")
    s = math.sqrt(1.0 - g * g)
    g2 = g * g
    return {
        "gamma": 2.0 * math.sqrt((2.0 - g2) / s - 2.0),
        "D1": g2 * (1.0 + s) / (2.0 * (1.0 - g2) ** 0.75),
        "D2": g2 * g2 * (2.0 - g2 + 2.0 * s) / (16.0 * (1.0 - g2) ** 1.5),
    }


def _edge_gap(g):
    if g >= 1.0:
        raise EPNotRealError(f"EP2A is not real-valued for g = {g:g} >= 1")
    return (2.0 - g * g) / math.sqrt(1.0 - g * g) - 2.0


@dataclass(frozen=True)
class Approximant:
    """One approximant with its fixed, validated parameter set."""

    form: ApproximantForm
    params: dict
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        want = set(_PARAMS[self.form])
        if set(self.params) != want:
            raise ValueError(f"{self.form.value} takes parameters {sorted(want)}, got {sorted(self.params)}")
        for k, v in self.params.items():
            if not np.isfinite(v):
                raise ValueError(f"parameter {k} must be finite")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        f = self.form
        if f is ApproximantForm.ZENO_Q:
            return 1.0 - p["V"] ** 2 * t * t
        if f is ApproximantForm.ZENO_D:
            return 1.0 - p["g"] ** 2 * t * t
        if f is ApproximantForm.EP2B_INTERMEDIATE:
            return (1.0 + p["D1"] * t + p["D2"] * t * t) * np.exp(-p["gamma"] * t)
        if f is ApproximantForm.EP2B_LONG:
            with np.errstate(divide="ignore"):
                return p["C"] * np.cos(2.0 * t + 0.25 * np.pi) ** 2 / t ** 3
        if f is ApproximantForm.EP2A_BANDEDGE:
            x = t * p["delta"]
            return 1.0 - 4.0 * np.sqrt(2.0 * x / np.pi) + 16.0 * x / np.pi
        if f is ApproximantForm.EP3A_HALFPOWER:
            out = np.ones_like(t)
            for k in range(1, 7):
                out = out + p[f"C{k}"] * t ** (0.5 * k)
            return out
        with np.errstate(divide="ignore"):
            return p["C"] / t ** 3


def _printed_constant(form, model):
    g = model.g
    if form is ApproximantForm.EP2A_LONG:
        if g >= 1.0:
            raise EPNotRealError(f"EP2A is not real-valued for g = {g:g} >= 1")
        return g ** 4 / (4.0 * math.pi * (1.0 - math.sqrt(1.0 - g * g)) ** 8)
    if form is ApproximantForm.EP3A_LONG:
        n = model.n
        return n ** 4 * g ** 4 / (4.0 * math.pi * (2.0 + model.eps_d - n * g * g) ** 4)
    return None


def _edge_constant(form, model):
    # |leading edge amplitude|**2 * t**3 from G'(+-1); a derived cross-check
    d1 = complex(green_derivative(model, 1.0))
    if form is ApproximantForm.EP2B_LONG:
        return abs(d1) ** 2 / math.pi
    dm1 = complex(green_derivative(model, -1.0))
    return (abs(d1) ** 2 + abs(dm1) ** 2) / (4.0 * math.pi)


def _default_anchor(form, t):
    t = t[t > 0]
    mid = math.sqrt(t[0] * t[-1])
    if form is ApproximantForm.EP2B_LONG:
        m = round((2.0 * mid + 0.25 * math.pi) / math.pi)
        return max(1, m) * math.pi / 2.0 - 0.125 * math.pi
    return mid


def build_approximant(form, model: ModelSpec, *, coefficients=None, anchor_time=None,
                      t_grid=None, spectral_tol: float = 1e-10) -> Approximant:
    """Derive an approximant's parameters from ``model``.

    Anchored forms (the ``t**-3`` laws) take their overall constant from
    ``spectral_survival`` at ``anchor_time``.  ``EP2B_LONG`` is always
    anchored (its constant is not printed); ``EP2A_LONG`` and ``EP3A_LONG``
    use their closed-form constant unless ``anchor_time`` is given.  When
    ``t_grid`` is passed without an anchor, ``EP2B_LONG`` anchors at the
    envelope maximum nearest the geometric middle of the grid.
    ``EP3A_HALFPOWER`` needs ``coefficients`` (C1..C6) or falls back to
    ``REFERENCE_COEFFICIENTS`` for n = 4, 6.
    """
    form = ApproximantForm.parse(form)
    if model.family not in _FAMILIES[form]:
        raise ModelMismatchError(f"{form.value} does not apply to the {model.family.value} family")
    meta = {}
    if form is ApproximantForm.ZENO_Q:
        params = {"V": model.V}
    elif form is ApproximantForm.ZENO_D:
        params = {"g": model.g}
    elif form is ApproximantForm.EP2B_INTERMEDIATE:
        params = ep2b_coefficients(model.g)
    elif form is ApproximantForm.EP2A_BANDEDGE:
        params = {"delta": _edge_gap(model.g)}
    elif form is ApproximantForm.EP3A_HALFPOWER:
        if coefficients is None:
            if model.n not in REFERENCE_COEFFICIENTS:
                raise ValueError(f"no reference coefficients for n = {model.n}; pass coefficients")
            coefficients = REFERENCE_COEFFICIENTS[model.n]
        coefficients = tuple(float(c) for c in coefficients)
        if len(coefficients) != 6:
            raise ValueError("EP3A half-power form takes six coefficients C1..C6")
        params = {f"C{k + 1}": c for k, c in enumerate(coefficients)}
    else:
        printed = _printed_constant(form, model)
        meta["edge_constant"] = _edge_constant(form, model)
        if printed is not None:
            meta["printed_constant"] = printed
        if anchor_time is None and form is ApproximantForm.EP2B_LONG:
            if t_grid is None:
                raise ValueError("ep2b-long needs anchor_time or t_grid to fix its constant")
            anchor_time = _default_anchor(form, as_time_grid(t_grid))
        if anchor_time is not None:
            ref = spectral_survival(model, [float(anchor_time)], tol=spectral_tol).values[0]
            shape = Approximant(form, {"C": 1.0})(np.array([float(anchor_time)]))[0]
            constant = ref / shape
            meta.update(anchor_time=float(anchor_time), anchor_value=float(ref))
        else:
            constant = printed
        params = {"C": float(constant)}
    return Approximant(form, {k: float(v) for k, v in params.items()}, meta)


def evaluate_approximant(form, model: ModelSpec, t_grid, **kwargs) -> TimeSeries:
    """Pointwise evaluation of an approximant on ``t_grid``.

    Keyword arguments go to ``build_approximant``.  Parameters and any
    anchoring data are recorded in ``meta``.
    """
    t = as_time_grid(t_grid)
    kwargs.setdefault("t_grid", t)
    approx = build_approximant(form, model, **kwargs)
    meta = {"form": approx.form.value, "params": dict(approx.params), **approx.meta}
    return TimeSeries(t, approx(t), f"approximant:{approx.form.value}", model, None, meta)


@dataclass(frozen=True)
class Timescales:
    """Zeno and EP timescales and their ordering.

    ``ep_before_zeno`` is the literal ``T_EP < T_Z``; ``window_squeezed``
    flags that no decade separates the two (``T_EP < 10 T_Z``), i.e. no
    room for an intermediate fractional-power window.
    """

    T_Z: float
    T_EP: float

    @property
    def ep_before_zeno(self) -> bool:
        return self.T_EP < self.T_Z

    @property
    def window_squeezed(self) -> bool:
        return self.T_EP < 10.0 * self.T_Z


def timescales(model: ModelSpec, ep) -> Timescales:
    """``T_Z`` (``1/V`` for the qubit, ``1/|eps_d|`` for the dots) and ``T_EP = 1/gap``."""
    scale = model.V if model.family is Family.QUBIT else abs(model.eps_d)
    T_Z = math.inf if scale == 0 else 1.0 / scale
    T_EP = math.inf if ep.gap == 0 else 1.0 / ep.gap
    return Timescales(T_Z, T_EP)
