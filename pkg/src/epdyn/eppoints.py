"""Exceptional points: closed forms, searches, classification, Puiseux series.

EPs are located as multiple roots of the lam-polynomial ``q(lam; s)`` where
``s`` is the scan parameter (V or eps_d).  A scan of the smallest root
separation brackets candidates; each is refined by Newton on
``q = dq/dlam = 0`` in the complex pair ``(lam, s)`` and accepted when ``s``
comes out real.  Third-order points add ``d2q/dlam2 = 0`` and free ``g``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P

from .exceptions import (
    ClassificationError,
    EPNotRealError,
    ModelMismatchError,
    NotFoundError,
)
from .models import (
    Family,
    ModelSpec,
    energy_from_lambda,
    lambda_coefficient_gradient,
    lambda_coefficients,
    lambda_from_energy,
)
from .spectra import (
    COALESCENCE_RTOL,
    StateClass,
    classify_root,
    lambda_roots,
)

__all__ = [
    "EPType",
    "EPRecord",
    "PuiseuxExpansion",
    "closed_form_eps",
    "locate_ep2",
    "locate_ep3",
    "classify_ep",
    "puiseux",
    "EP3_DEFAULT_WINDOWS",
]

PARAM_TOL = 1e-10
MERGE_TOL = 1e-9
SIDE_OFFSET = 1e-4

#: (g window, eps window) bracketing the EP2A-pair merger for each site.
EP3_DEFAULT_WINDOWS = {
    4: ((0.06, 0.12), (-2.2, -1.9)),
    6: ((0.03, 0.07), (-2.1, -1.95)),
}


class EPType(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class EPRecord:
    """One exceptional point.

    ``param`` is V for the qubit and eps_d for the dots; ``g`` is the
    coupling (a search result for third-order points).  ``gap`` is the
    distance from the nearest band edge, ``|threshold - energy|``.
    """

    family: Family
    g: float
    param: float
    energy: complex
    lam: complex
    order: int
    ep_type: EPType | None
    n: int = 1
    gap: float = field(init=False)
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        threshold = -2.0 if self.energy.real <= 0 else 2.0
        object.__setattr__(self, "gap", abs(threshold - self.energy))

    @property
    def threshold(self) -> float:
        return -2.0 if self.energy.real <= 0 else 2.0

    @property
    def model(self) -> ModelSpec:
        if self.family is Family.QUBIT:
            return ModelSpec.qubit(self.g, self.param)
        if self.family is Family.END_DOT:
            return ModelSpec.end_dot(self.g, self.param)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ModelSpec.side_dot(self.g, self.param, self.n)

    def with_type(self, ep_type) -> "EPRecord":
        return EPRecord(self.family, self.g, self.param, self.energy, self.lam,
                        self.order, EPType(ep_type), self.n, info=dict(self.info))


def _q_derivs(family, g, s, n, lam, upto):
    c = lambda_coefficients(family, g, s, n)
    out = []
    for _ in range(upto + 1):
        out.append(P.polyval(lam, c))
        c = P.polyder(c)
    return out


def _grad_derivs(family, g, s, n, lam, wrt, upto):
    c = lambda_coefficient_gradient(family, g, s, n, wrt)
    out = []
    for _ in range(upto + 1):
        out.append(P.polyval(lam, c))
        c = P.polyder(c)
    return out


def _newton(fun, x0, tol=1e-14, maxiter=60):
    x = np.array(x0, dtype=complex)
    # a diverging seed is simply rejected, so overflow is not worth a warning
    with np.errstate(all="ignore"):
        for _ in range(maxiter):
            f, J = fun(x)
            if not (np.all(np.isfinite(f)) and np.all(np.isfinite(J))):
                return None
            try:
                step = np.linalg.solve(J, f)
            except np.linalg.LinAlgError:
                return None
            x = x - step
            if not np.all(np.isfinite(x)):
                return None
            if np.max(np.abs(step) / (1.0 + np.abs(x))) < tol:
                return x
    return None


def _newton_ep2(family, g, n, lam0, s0):
    def fun(x):
        lam, s = x
        q = _q_derivs(family, g, s, n, lam, 2)
        qs = _grad_derivs(family, g, s, n, lam, "param", 1)
        return (np.array([q[0], q[1]]),
                np.array([[q[1], qs[0]], [q[2], qs[1]]]))
    return _newton(fun, [lam0, s0])


def _newton_ep3(n, lam0, eps0, g0):
    family = Family.SIDE_DOT

    def fun(x):
        lam, eps, g = x
        q = _q_derivs(family, g, eps, n, lam, 3)
        qe = _grad_derivs(family, g, eps, n, lam, "param", 2)
        qg = _grad_derivs(family, g, eps, n, lam, "g", 2)
        f = np.array([q[0], q[1], q[2]])
        J = np.array([[q[k + 1], qe[k], qg[k]] for k in range(3)])
        return f, J
    return _newton(fun, [lam0, eps0, g0])


def _scrub(z, scale=1.0, tol=1e-12):
    z = complex(z)
    if abs(z.imag) <= tol * (scale + abs(z)):
        z = complex(z.real, 0.0)
    if abs(z.real) <= tol * (scale + abs(z)):
        z = complex(0.0, z.imag)
    return z + 0.0


def _record(family, g, s, lam, order, n, ep_type=None, info=None):
    lam = _scrub(lam)
    energy = _scrub(energy_from_lambda(lam))
    return EPRecord(Family.parse(family), float(g), float(s), energy, lam, order,
                    None if ep_type is None else EPType(ep_type), n, info=info or {})


# -- closed forms -----------------------------------------------------------

def closed_form_eps(model: ModelSpec) -> list[EPRecord]:
    """Closed-form EP2s of the qubit and the end-coupled dot.

    Qubit: EP2A at ``V = 1 + sqrt(1 - g**2)`` (virtual pairs at ``+-E_A``)
    and EP2B at ``V = 1 - sqrt(1 - g**2)`` (resonance pair at
    ``-i Gamma_B/2`` and anti-resonance pair at ``+i Gamma_B/2``).
    End dot: EP2A at ``eps_d = -+2 sqrt(1 - g**2)`` with
    ``E = -+(2 - g**2)/sqrt(1 - g**2)``.  Records are sorted by parameter.

    Raises
    ------
    EPNotRealError
        If ``g >= 1``; the EPs then leave the real parameter axis.
    """
    g = model.g
    if model.family is Family.SIDE_DOT:
        raise ModelMismatchError("no closed-form EPs for the side-coupled dot; use locate_ep2")
    if g >= 1.0:
        raise EPNotRealError(f"EPs are not real-valued for g = {g:g} >= 1")
    root = math.sqrt(1.0 - g * g)
    out = []
    if model.family is Family.QUBIT:
        va, vb = 1.0 + root, 1.0 - root
        g2, v2 = g * g, va * va
        ea = math.sqrt(((2.0 - g2) * v2 - g2 * g2) / (2.0 * (1.0 - g2)))
        for energy in (-ea, ea):
            lam = lambda_from_energy(energy, sheet="second")
            out.append(_record(model.family, g, va, lam, 2, 1, EPType.A))
        half_gamma = math.sqrt((2.0 - g2) / root - 2.0)
        for energy in (-1j * half_gamma, 1j * half_gamma):
            lam = lambda_from_energy(energy, sheet="second")
            out.append(_record(model.family, g, vb, lam, 2, 1, EPType.B))
    else:
        for sign in (-1.0, 1.0):
            lam = -sign / root
            out.append(_record(model.family, g, 2.0 * sign * root, lam, 2, 1, EPType.A))
    return sorted(out, key=_order_key)


def _order_key(rec):
    return (rec.param, rec.energy.real, rec.energy.imag)


# -- searches ---------------------------------------------------------------

def _scan_params(model, window, samples):
    lo, hi = map(float, window)
    if not lo < hi:
        raise ValueError("parameter window must satisfy lo < hi")
    return np.linspace(lo, hi, samples)


def _close_pairs(roots, factor=100.0, limit=6):
    # several nearby pairs: near an EP3 two distinct pairs coalesce within one scan cell
    roots = np.asarray(roots)
    d = np.abs(roots[:, None] - roots[None, :]) / (1.0 + np.abs(roots[:, None]))
    iu = np.triu_indices(len(roots), 1)
    dist = d[iu]
    if dist.size == 0:
        return []
    order = np.argsort(dist, kind="stable")[:limit]
    best = dist[order[0]]
    return [(roots[iu[0][k]], roots[iu[1][k]]) for k in order if dist[k] <= factor * best]


def locate_ep2(model: ModelSpec, window, samples: int = 401, classify: bool = True) -> list[EPRecord]:
    """Second-order EPs of ``model``'s family at fixed ``g`` inside ``window``.

    ``window`` is a ``(lo, hi)`` range of the scan parameter (V or eps_d);
    only ``model.family``, ``model.g`` and ``model.n`` are used.  Returns one
    record per coalescing pair, so a point where two pairs coalesce
    simultaneously (qubit symmetry) yields two records.  Empty if none.
    """
    params = _scan_params(model, window, samples)
    lo, hi = params[0], params[-1]
    margin = 1e-9 * (1.0 + max(abs(lo), abs(hi)))
    seps = []
    roots_at = []
    for s in params:
        r = lambda_roots(model.with_param(s))
        roots_at.append(r)
        d = np.abs(r[:, None] - r[None, :]) / (1.0 + np.abs(r[:, None]))
        np.fill_diagonal(d, np.inf)
        seps.append(d.min() if len(r) > 1 else np.inf)
    seps = np.array(seps)
    candidates = [i for i in range(len(seps))
                  if (i == 0 or seps[i] <= seps[i - 1]) and (i == len(seps) - 1 or seps[i] <= seps[i + 1])]
    found: list[tuple[float, complex]] = []
    for i in candidates:
        for a, b in _close_pairs(roots_at[i]):
            sol = _newton_ep2(model.family, model.g, model.n, 0.5 * (a + b), params[i])
            if sol is None:
                continue
            lam, s = sol
            if abs(s.imag) > 1e-9 * (1.0 + abs(s.real)) or not (lo - margin <= s.real <= hi + margin):
                continue
            s = s.real
            # refine lam at the real parameter
            sol = _newton_ep2(model.family, model.g, model.n, lam, s)
            if sol is not None and abs(sol[1].imag) < 1e-12:
                lam, s = sol[0], sol[1].real
            if abs(lam) < 1e-12:
                continue
            dup = any(abs(s - fs) <= 1e-8 * (1.0 + abs(s)) and abs(lam - fl) <= 1e-6 * (1.0 + abs(lam))
                      for fs, fl in found)
            if not dup:
                found.append((s, lam))
    records = []
    for s, lam in found:
        order = _multiplicity(model.family, model.g, s, model.n, lam)
        rec = _record(model.family, model.g, s, lam, order, model.n)
        if classify:
            gaps = [abs(s - o) for o, _ in found if abs(s - o) > 1e-8 * (1.0 + abs(s))]
            limit = 0.25 * min(gaps) if gaps else None
            try:
                rec = rec.with_type(classify_ep(rec, max_offset=limit))
            except ClassificationError as exc:
                rec.info["classification_error"] = str(exc)
        records.append(rec)
    return sorted(records, key=_order_key)


def _multiplicity(family, g, s, n, lam):
    q = _q_derivs(family, g, s, n, lam, 3)
    scale = max(1.0, abs(q[1]) + abs(q[2]) + abs(q[3]))
    return 3 if abs(q[2]) < 1e-6 * scale else 2


def _merging_pair(records):
    # adjacent lower-edge A-type EP2s, closest in eps
    lower = [r for r in records if r.ep_type is EPType.A and r.energy.real < 0]
    if len(lower) < 2:
        return None
    pairs = [(abs(a.param - b.param), a, b) for a, b in zip(lower, lower[1:])]
    return min(pairs, key=lambda t: t[0])[1:]


def locate_ep3(n: int, g_window=None, eps_window=None, max_steps: int = 400) -> EPRecord:
    """Third-order EP (EP3A) of the side-coupled dot at even site ``n``.

    Tracks the two EP2A branches bracketed by ``eps_window`` upward from
    ``g_window[0]``.  Their eps-separation closes like ``sqrt(g_EP3 - g)``;
    once a square-root extrapolation predicts the merger, a Newton solve of
    ``q = q' = q'' = 0`` in ``(lam, eps, g)`` pins it down.

    Raises
    ------
    NotFoundError
        If the branches do not merge inside the window.  ``data`` holds the
        last tracked ``(g, eps_1, eps_2)``.
    """
    if n % 2:
        raise ModelMismatchError("EP3 search is defined for even attachment sites")
    if g_window is None or eps_window is None:
        if n not in EP3_DEFAULT_WINDOWS:
            raise ValueError(f"no default search window for n = {n}")
        gw, ew = EP3_DEFAULT_WINDOWS[n]
        g_window = g_window or gw
        eps_window = eps_window or ew
    g_lo, g_hi = map(float, g_window)
    e_lo, e_hi = map(float, eps_window)
    family = Family.SIDE_DOT
    start = _record(family, g_lo, 0.5 * (e_lo + e_hi), -1.0, 2, n).model
    pair = _merging_pair(locate_ep2(start, (e_lo, e_hi)))
    if pair is None:
        raise NotFoundError(f"fewer than two EP2As in eps window at g = {g_lo:g}",
                            data={"g": g_lo, "eps": None})
    branches = [(p.lam, complex(p.param)) for p in pair]
    g = g_lo
    history = []
    h = (g_hi - g_lo) / 40.0

    def try_ep3(lam0, eps0, g0):
        sol = _newton_ep3(n, lam0, eps0, g0)
        if sol is None:
            return None
        lam, eps, gg = sol
        if max(abs(eps.imag), abs(gg.imag)) > 1e-10:
            return None
        if not (g_lo <= gg.real <= g_hi and e_lo <= eps.real <= e_hi):
            return None
        return sol

    for _ in range(max_steps):
        sep = abs(branches[0][1] - branches[1][1])
        history.append((g, branches[0][1].real, branches[1][1].real))
        sol = None
        if len(history) >= 2:
            (g1, a1, b1), (g2, a2, b2) = history[-2], history[-1]
            d1, d2 = (a1 - b1) ** 2, (a2 - b2) ** 2
            if d1 != d2:
                g_pred = g2 + d2 * (g2 - g1) / (d1 - d2)
                lam_mid = 0.5 * (branches[0][0] + branches[1][0])
                eps_mid = 0.5 * (branches[0][1] + branches[1][1])
                if g_pred > g2 and g_pred - g2 < 4 * h:
                    sol = try_ep3(lam_mid, eps_mid, g_pred)
        if sol is None and sep < 1e-3:
            sol = try_ep3(0.5 * (branches[0][0] + branches[1][0]),
                          0.5 * (branches[0][1] + branches[1][1]), g)
        if sol is not None:
            lam, eps, gg = sol
            rec = _record(family, gg.real, eps.real, lam, 3, n,
                          info={"tracked_separation": float(sep), "tracked_g": g})
            return rec.with_type(classify_ep(rec))
        # advance the branches
        while h > 1e-14:
            g_new = g + h
            if g_new > g_hi:
                break
            new = [_newton_ep2(family, g_new, n, lam0, s0) for lam0, s0 in branches]
            ok = all(x is not None and abs(x[1].imag) < 1e-10 for x in new)
            if ok and abs(new[0][1] - new[1][1]) > 1e-12 and abs(new[0][1] - new[1][1]) < sep * 1.5:
                branches = [(x[0], complex(x[1].real)) for x in new]
                g = g_new
                break
            h /= 2.0
        else:
            break
        if g + h > g_hi and h <= 1e-14:
            break
        if g >= g_hi:
            break
    raise NotFoundError("EP2A branches did not merge inside the window",
                        data={"g": g, "eps": (branches[0][1].real, branches[1][1].real),
                              "history": history[-5:]})


# -- classification ---------------------------------------------------------

def _model_at(ep, s):
    if ep.family is Family.QUBIT:
        return ModelSpec(ep.family, ep.g, V=s)
    return ModelSpec(ep.family, ep.g, eps_d=s, n=ep.n)


def _nearest_states(model, lam, count):
    roots = lambda_roots(model)
    idx = np.argsort(np.abs(roots - lam))[:count]
    return roots[idx]


def _side_classes(ep, offset, sign):
    s = ep.param + sign * offset
    roots = _nearest_states(_model_at(ep, s), ep.lam, ep.order)
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    clustered = d.min() < COALESCENCE_RTOL * (1.0 + abs(ep.lam))
    classes = []
    for r in roots:
        c = classify_root(r)
        classes.append("real" if c in (StateClass.BOUND, StateClass.VIRTUAL) else c.value)
    return sorted(classes), clustered


def classify_ep(ep: EPRecord, model: ModelSpec | None = None, max_offset: float | None = None) -> EPType:
    """A/B type from the states on the two sides of the EP.

    Samples the parameter at ``+-1e-4 * max(1, |param|)`` and classifies the
    ``order`` states nearest the coalesced root.  A-type: real (virtual)
    states on one side and a resonance/anti-resonance pair on the other, or
    for order 3 virtual + resonance + anti-resonance on both sides.
    B-type: resonances (or anti-resonances) on both sides.  ``max_offset``
    caps the offset when another EP lies close by in the parameter.

    Raises
    ------
    ClassificationError
        If the samples stay ambiguous after widening the offset once.
    """
    if model is not None and (Family.parse(model.family) is not ep.family):
        raise ModelMismatchError("EP does not belong to this model family")
    offset = SIDE_OFFSET * max(1.0, abs(ep.param))
    if max_offset is not None:
        offset = min(offset, max_offset)
    for _ in range(2):
        left, cl = _side_classes(ep, offset, -1.0)
        right, cr = _side_classes(ep, offset, +1.0)
        if not (cl or cr):
            verdict = _verdict(ep.order, left, right)
            if verdict is not None:
                return verdict
        offset *= 10.0
    raise ClassificationError(f"cannot classify EP at param={ep.param:.12g}: sides {left} / {right}")


def _verdict(order, left, right):
    pair = ["anti_resonance", "resonance"]
    if order == 2:
        sides = {tuple(left), tuple(right)}
        if sides == {("real", "real"), tuple(pair)}:
            return EPType.A
        if left == right and left in (["resonance", "resonance"], ["anti_resonance", "anti_resonance"]):
            return EPType.B
        return None
    triple = ["anti_resonance", "real", "resonance"]
    if left == triple and right == triple:
        return EPType.A
    return None


# -- Puiseux series ---------------------------------------------------------

@dataclass(frozen=True)
class PuiseuxExpansion:
    """Fractional-power series of one branch around an EP.

    ``coefficients`` maps a power ``p`` (``Fraction``) of the detuning to its
    coefficient for the ``+`` branch; the ``-`` branch flips the sign of the
    half-odd powers.  ``detuning`` is ``'delta'`` (``param - param_EP``) or
    ``'delta_sq'`` (``V**2 - V_EP**2``, used for the qubit).  Half-odd
    powers use the principal square root of ``delta``.
    """

    center: EPRecord
    variable: str
    coefficients: dict
    order: int
    detuning: str = "delta"
    source: str = "closed_form"

    def detuning_of(self, param):
        p0 = self.center.param
        return param * param - p0 * p0 if self.detuning == "delta_sq" else param - p0

    def evaluate(self, delta, branch: int = 1):
        delta = np.asarray(delta, dtype=complex)
        root = np.sqrt(delta)
        out = np.zeros_like(delta)
        for p, c in self.coefficients.items():
            twice = int(2 * p)
            sign = branch if twice % 2 else 1
            term = sign * c * root ** twice if twice >= 0 else sign * c / root ** (-twice)
            out = out + term
        return out[()] if out.ndim == 0 else out

    def leading(self):
        half = [p for p in self.coefficients if p.denominator == 2]
        return self.coefficients[min(half)] if half else 0.0


def _closed_form_coeffs(ep, variable):
    g = ep.g
    if ep.family is Family.END_DOT and ep.lam.real > 0:
        lb = ep.lam.real
        if variable == "lambda":
            return {Fraction(0): lb, Fraction(1, 2): 1j * lb ** 1.5, Fraction(1): -lb * lb / 2}
        if variable == "norm":
            return {Fraction(-1, 2): 1j / (2.0 * math.sqrt(lb)), Fraction(0): 0.5}
        if variable == "E":
            return {Fraction(0): ep.energy, Fraction(1, 2): 1j * math.sqrt(lb) * (1.0 / lb - lb),
                    Fraction(1): (lb * lb + 1.0) / 2.0}
    if ep.family is Family.QUBIT and ep.ep_type is EPType.B and variable == "E":
        root = math.sqrt(1.0 - g * g)
        c = g * g / (2.0 * math.sqrt((1.0 - g * g) * (2.0 - g * g - 2.0 * root)))
        if ep.energy.imag > 0:
            c = -c
        return {Fraction(0): ep.energy, Fraction(1, 2): c}
    return None


def _lambda_lead(ep, detuning):
    # leading lam splitting from q(lam) ~ q''/2 x**2 + q_delta delta
    q = _q_derivs(ep.family, ep.g, ep.param, ep.n, ep.lam, 2)
    qs = _grad_derivs(ep.family, ep.g, ep.param, ep.n, ep.lam, "param", 0)[0]
    if detuning == "delta_sq":
        qs = qs / (2.0 * ep.param)
    return np.sqrt(-2.0 * qs / q[2] + 0j)


def _branch_values(ep, detuning, delta, lead):
    p0 = ep.param
    s = math.sqrt(p0 * p0 + delta) if detuning == "delta_sq" else p0 + delta
    m = _model_at(ep, s)
    roots = _nearest_states(m, ep.lam, 2)
    # + branch: splitting aligned with lead * sqrt(delta)
    proj = ((roots - ep.lam) / (lead * np.sqrt(complex(delta)))).real
    plus, minus = (roots[0], roots[1]) if proj[0] >= proj[1] else (roots[1], roots[0])
    return m, plus, minus


def _values(model, lam, variable):
    from .spectra import _norm_from_lambda
    if variable == "lambda":
        return lam
    if variable == "E":
        return energy_from_lambda(lam)
    return _norm_from_lambda(model, lam)


def puiseux(model: ModelSpec, ep: EPRecord, variable: str = "E", order: int = 3,
            ladder=None, numeric: bool = False) -> PuiseuxExpansion:
    """Puiseux expansion of ``variable`` (``'E'``, ``'lambda'`` or ``'norm'``).

    Closed forms are used for the end dot (E, lam, norm at the lower EP)
    and the qubit EP2B energy.  Otherwise, or with ``numeric=True``, the
    coefficients are fitted to exact root splitting over a log-spaced
    detuning ladder.  ``order`` counts half-steps beyond the leading term
    (at most 3).  The qubit uses ``V**2 - V_EP**2`` as detuning.
    """
    if order < 1 or order > 3:
        raise ValueError("order must be 1, 2 or 3 half-steps")
    if variable not in ("E", "lambda", "norm"):
        raise ValueError("variable must be 'E', 'lambda' or 'norm'")
    if Family.parse(model.family) is not ep.family or model.g != ep.g or model.n != ep.n:
        raise ModelMismatchError("EP does not belong to this model")
    if ep.order != 2:
        raise ModelMismatchError("Puiseux expansions are implemented for second-order EPs")
    detuning = "delta_sq" if ep.family is Family.QUBIT else "delta"
    if not numeric:
        coeffs = _closed_form_coeffs(ep, variable)
        if coeffs is not None:
            base = Fraction(-1, 2) if variable == "norm" else Fraction(0)
            keep = {p: c for p, c in coeffs.items() if p <= base + Fraction(order, 2)}
            avail = max(coeffs) - base
            return PuiseuxExpansion(ep, variable, keep, min(order, int(2 * avail)), detuning)
    return _fit_puiseux(ep, variable, order, detuning, ladder)


def _fit_puiseux(ep, variable, order, detuning, ladder):
    scale = max(1.0, abs(ep.param)) ** (2 if detuning == "delta_sq" else 1)
    if ladder is None:
        ladder = scale * np.logspace(-3, -7, 13)
    ladder = np.asarray(ladder, dtype=float)
    lead = _lambda_lead(ep, detuning)
    rows = []
    for d in ladder:
        m, lp, lm = _branch_values(ep, detuning, d, lead)
        if abs(lp - lm) < COALESCENCE_RTOL * (1.0 + abs(ep.lam)):
            continue
        rows.append((d, _values(m, lp, variable), _values(m, lm, variable)))
    if len(rows) < len(ladder):
        warnings.warn(f"dropped {len(ladder) - len(rows)} ladder rungs inside the root-clustering "
                      "regime", RuntimeWarning, stacklevel=3)
    if len(rows) < 4:
        raise NotFoundError("too few usable ladder rungs for a Puiseux fit", data={"ladder": ladder})
    d = np.array([r[0] for r in rows])
    xp = np.array([r[1] for r in rows])
    xm = np.array([r[2] for r in rows])
    root = np.sqrt(d)
    even = 0.5 * (xp + xm)
    odd = 0.5 * (xp - xm)
    coeffs = {}
    if variable == "norm":
        base = Fraction(-1, 2)
        # odd part: c_{-1/2} d^{-1/2} + c_{1/2} d^{1/2} + ...
        A = np.vstack([d ** k for k in range(3)]).T
        c_odd = np.linalg.lstsq(A, odd * root, rcond=None)[0]
        c_even = np.linalg.lstsq(A, even, rcond=None)[0]
        for k in range(3):
            coeffs[Fraction(2 * k - 1, 2)] = complex(c_odd[k])
            coeffs[Fraction(k)] = complex(c_even[k])
    else:
        base = Fraction(0)
        center = ep.lam if variable == "lambda" else ep.energy
        A = np.vstack([d ** k for k in range(3)]).T
        c_odd = np.linalg.lstsq(A, odd / root, rcond=None)[0]
        c_even = np.linalg.lstsq(A, (even - center) / d, rcond=None)[0]
        coeffs[Fraction(0)] = complex(center)
        for k in range(3):
            coeffs[Fraction(2 * k + 1, 2)] = complex(c_odd[k])
            coeffs[Fraction(k + 1)] = complex(c_even[k])
    reference = _closed_form_coeffs(ep, variable)
    if reference is not None:
        p_lead = base + Fraction(1, 2) if variable != "norm" else base
        if (coeffs[p_lead] * np.conj(reference[p_lead])).real < 0:
            coeffs = {p: (-c if p.denominator == 2 else c) for p, c in coeffs.items()}
    keep = {p: c for p, c in coeffs.items() if p <= base + Fraction(order, 2)}
    return PuiseuxExpansion(ep, variable, keep, order, detuning, source="fit")
