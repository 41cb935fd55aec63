"""Survival amplitude from the spectral representation.

The initial-level Green's function is rational in ``lam``,
``G(lam) = num(lam) / q(lam)``, so both routes below work with exact
polynomial evaluations:

* ``real_axis``: bound-state poles plus the continuum integral written in
  ``k`` (``E = -2 cos k`` removes the edge square roots), composite
  Gauss-Legendre with panels graded around ``k = 0, pi`` and around the
  angles of poles near the unit circle, refined by doubling.
* ``steepest_descent``: the continuum integral is deformed from the band
  onto vertical paths ``E = -+2 - i y`` hanging from both edges, picking
  up the residues of resonances with ``|Re E| < 2``.  Clusters of nearly
  coalescent resonances are integrated together on a small circle in
  ``lam`` instead of summing divergent residues.  This route is the one
  that reaches ``t ~ 1e7``.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import special
from scipy.integrate import quad_vec

from ..exceptions import QuadratureError
from ..models import Family, ModelSpec, energy_from_lambda, lambda_polynomial
from ..spectra import StateClass, discrete_states, lambda_roots
from .series import TimeSeries, as_time_grid

__all__ = [
    "green_lambda",
    "green_derivative",
    "spectral_density",
    "spectral_survival",
    "spectral_amplitude",
    "edge_asymptote",
    "bessel_amplitude",
    "bessel_survival_amplitude",
]

T_SWITCH = 40.0
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_ROW_CHUNK = 128
_TAIL_W = 7.0


def _numerator(model: ModelSpec) -> np.ndarray:
    if model.family is Family.QUBIT:
        return np.array([0.0, -1.0, 0.0, -(1.0 - model.g ** 2)])
    return np.array([0.0, -1.0])


def green_lambda(model: ModelSpec, lam):
    """Initial-level Green's function ``G = num(lam) / q(lam)``."""
    lam = np.asarray(lam, dtype=complex)
    return P.polyval(lam, _numerator(model)) / P.polyval(lam, lambda_polynomial(model))


def green_derivative(model: ModelSpec, lam):
    """``dG/dlam``."""
    num, q = _numerator(model), lambda_polynomial(model)
    lam = np.asarray(lam, dtype=complex)
    qv = P.polyval(lam, q)
    return (P.polyval(lam, P.polyder(num)) * qv - P.polyval(lam, num) * P.polyval(lam, P.polyder(q))) / qv ** 2


def spectral_density(model: ModelSpec, E):
    """Local density of continuum states ``-Im G(E + i0) / pi`` for ``|E| < 2``."""
    E = np.asarray(E, dtype=float)
    k = np.arccos(np.clip(-E / 2.0, -1.0, 1.0))
    return -green_lambda(model, np.exp(1j * k)).imag / np.pi


def _bound_terms(model):
    states = discrete_states(model)
    return [(s.energy.real, s.weight) for s in states
            if s.classification is StateClass.BOUND and s.weight is not None]


# -- real-axis route --------------------------------------------------------

def _breakpoints(model):
    pts = {0.0, math.pi}
    for j in range(1, 40):
        h = math.pi * 2.0 ** -j
        if h < 1e-12:
            break
        pts.update((h, math.pi - h))
    for r in lambda_roots(model):
        d = abs(math.log(abs(r)))
        if d > 0.5:
            continue
        theta = abs(np.angle(r))
        d = max(d, 1e-14)
        pts.add(theta)
        step = d
        while step < 1.0:
            pts.update((theta - step, theta + step))
            step *= 2.0
    return np.array(sorted(p for p in pts if 0.0 <= p <= math.pi))


def _panel_nodes(breaks, h_max):
    lefts, widths = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        m = max(1, int(math.ceil((b - a) / h_max)))
        edges = np.linspace(a, b, m + 1)
        lefts.append(edges[:-1])
        widths.append(np.diff(edges))
    lefts = np.concatenate(lefts)
    widths = np.concatenate(widths)
    half = 0.5 * widths
    nodes = (lefts + half)[:, None] + half[:, None] * GL_NODES[None, :]
    weights = half[:, None] * GL_WEIGHTS[None, :]
    return nodes.ravel(), weights.ravel()


def _continuum_real_axis(model, t, nodes, weights):
    lam = np.exp(1j * nodes)
    rho = -green_lambda(model, lam).imag / np.pi
    f = weights * 2.0 * np.sin(nodes) * rho
    cosk = 2.0 * np.cos(nodes)
    out = np.empty(len(t), dtype=complex)
    for i in range(0, len(t), _ROW_CHUNK):
        tt = t[i:i + _ROW_CHUNK]
        out[i:i + _ROW_CHUNK] = np.exp(1j * np.outer(tt, cosk)) @ f
    return out


def _real_axis_amplitude(model, t, tol, max_doublings=6):
    breaks = _breakpoints(model)
    h = math.pi / (16.0 * max(1.0, float(t.max(initial=0.0))))
    h = min(h, math.pi / 16.0)
    prev = None
    err = np.inf
    for _ in range(max_doublings + 1):
        nodes, weights = _panel_nodes(breaks, h)
        cur = _continuum_real_axis(model, t, nodes, weights)
        if prev is not None:
            err = float(np.max(np.abs(cur - prev)))
            if err < tol:
                return cur, err
        prev = cur
        h /= 2.0
    raise QuadratureError(f"continuum quadrature did not reach {tol:g} (last change {err:.3g})",
                          error_estimate=err)


# -- steepest-descent route -------------------------------------------------

def _first_sheet(E):
    s = np.sqrt((E - 2.0) * (E + 2.0))
    r1 = 0.5 * (-E + s)
    r2 = 0.5 * (-E - s)
    return np.where(np.abs(r1) < np.abs(r2), r1, r2)


def _edge_jump(model, E):
    lam = _first_sheet(E)
    return green_lambda(model, lam) - green_lambda(model, 1.0 / lam)


def _enclosed_poles(model):
    roots = lambda_roots(model)
    out = []
    for r in roots:
        E = energy_from_lambda(r)
        if abs(r) > 1.0 and E.imag < 0 and abs(E.real) < 2.0:
            out.append(r)
    return np.array(out, dtype=complex), roots


def _clusters(poles, rtol=1e-2):
    groups = []
    for p in poles:
        for grp in groups:
            if any(abs(p - q) < rtol * (1.0 + abs(q)) for q in grp):
                grp.append(p)
                break
        else:
            groups.append([p])
    return groups


def _residue_weight(model, lam):
    num, q = _numerator(model), lambda_polynomial(model)
    dE = -1.0 + 1.0 / lam ** 2
    return P.polyval(lam, num) / P.polyval(lam, P.polyder(q)) * dE


def _cluster_contour(model, grp, roots, t):
    center = np.mean(grp)
    spread = max(abs(p - center) for p in grp)
    others = [abs(r - center) for r in roots if all(abs(r - p) > 1e-300 for p in grp)]
    Ec = energy_from_lambda(center)
    dE = abs(-1.0 + 1.0 / center ** 2)
    radius = min(0.5 * min(others, default=1.0), 0.5 * abs(Ec.imag) / max(dE, 1e-12), 0.25 * abs(center))
    if radius < 4.0 * spread:
        return None
    m = int(min(2 ** 16, 128 + 8 * math.ceil(radius * dE * float(np.max(t)))))
    theta = 2.0 * np.pi * np.arange(m) / m
    lam = center + radius * np.exp(1j * theta)
    E = energy_from_lambda(lam)
    g = green_lambda(model, lam) * (-1.0 + 1.0 / lam ** 2) * (lam - center) / m
    out = np.empty(len(t), dtype=complex)
    for i in range(0, len(t), _ROW_CHUNK):
        out[i:i + _ROW_CHUNK] = np.exp(-1j * np.outer(t[i:i + _ROW_CHUNK], E)) @ g
    return out


def _pole_sum(model, t):
    poles, roots = _enclosed_poles(model)
    total = np.zeros(len(t), dtype=complex)
    for grp in _clusters(poles):
        Ec = energy_from_lambda(np.mean(grp))
        live = t * abs(Ec.imag) < 150.0
        if not np.any(live):
            continue
        part = None
        if len(grp) > 1:
            part = _cluster_contour(model, grp, roots, t[live])
        if part is None:
            part = np.zeros(int(live.sum()), dtype=complex)
            for p in grp:
                part += _residue_weight(model, p) * np.exp(-1j * energy_from_lambda(p) * t[live])
        total[live] += part
    return total


def _edge_integrals(model, t, tol):
    def integrand(w):
        y = w * w / t
        up = _edge_jump(model, 2.0 - 1j * y) * np.exp(-2j * t)
        lo = _edge_jump(model, -2.0 - 1j * y) * np.exp(2j * t)
        return w * math.exp(-w * w) * (up - lo) / (np.pi * t)

    scale = min(1.0, (T_SWITCH / t.min()) ** 1.5)
    val, err = quad_vec(integrand, 0.0, _TAIL_W, epsabs=1e-2 * tol * scale, epsrel=1e-10,
                        norm="max", limit=20000)
    if not np.isfinite(err) or err > tol * max(1.0, float(np.max(np.abs(val)))):
        raise QuadratureError(f"edge integral error {err:.3g} above tolerance", error_estimate=err)
    return val, err


def _steepest_descent_amplitude(model, t, tol):
    out = np.empty(len(t), dtype=complex)
    err = 0.0
    decades = np.floor(np.log10(t))
    for dec in np.unique(decades):
        sel = decades == dec
        for chunk in np.array_split(np.flatnonzero(sel), max(1, int(sel.sum()) // 64)):
            val, e = _edge_integrals(model, t[chunk], tol)
            out[chunk] = val
            err = max(err, e)
    return out + _pole_sum(model, t), err


# -- public -----------------------------------------------------------------

def spectral_amplitude(model: ModelSpec, t_grid, method: str = "auto", tol: float = 1e-10,
                       t_switch: float = T_SWITCH):
    """Complex survival amplitude and an error estimate.

    ``method`` is ``'real_axis'``, ``'steepest_descent'`` or ``'auto'``
    (real axis up to ``t_switch``, steepest descent beyond).
    """
    t = as_time_grid(t_grid)
    if method not in ("auto", "real_axis", "steepest_descent"):
        raise ValueError(f"unknown method {method!r}")
    bound = _bound_terms(model)
    amp = np.zeros(len(t), dtype=complex)
    for E, w in bound:
        amp += w * np.exp(-1j * E * t)
    if method == "real_axis":
        near = np.ones(len(t), bool)
    elif method == "steepest_descent":
        if np.any(t <= 0):
            raise ValueError("steepest-descent route needs t > 0")
        near = np.zeros(len(t), bool)
    else:
        near = t <= t_switch
    err = 0.0
    if np.any(near):
        part, e = _real_axis_amplitude(model, t[near], tol)
        amp[near] += part
        err = max(err, e)
    if np.any(~near):
        part, e = _steepest_descent_amplitude(model, t[~near], tol)
        amp[~near] += part
        err = max(err, e)
    return amp, err


def spectral_survival(model: ModelSpec, t_grid, method: str = "auto", tol: float = 1e-10,
                      t_switch: float = T_SWITCH) -> TimeSeries:
    """Survival probability from the spectral representation.

    Raises
    ------
    QuadratureError
        If panel refinement (real axis) or the adaptive edge integrals
        (steepest descent) cannot reach ``tol``.
    """
    t = as_time_grid(t_grid)
    amp, err = spectral_amplitude(model, t, method, tol, t_switch)
    meta = {"error_estimate": err, "route": method, "t_switch": t_switch,
            "bound_weight": float(sum(w.real for _, w in _bound_terms(model)))}
    return TimeSeries(t, np.abs(amp) ** 2, "spectral", model, amp, meta)


def edge_asymptote(model: ModelSpec, t):
    """Leading long-time band-edge amplitude.

    ``A ~ t**-1.5 / (2 sqrt(pi)) [sqrt(i) G'(1) e^{2it} + sqrt(-i) G'(-1) e^{-2it}]``;
    valid once ``t`` is large compared with the inverse distance of every
    pole from the edges.  Bound-state and resonance terms are not included.
    """
    t = np.asarray(t, dtype=float)
    lo = np.exp(0.25j * np.pi) * green_derivative(model, 1.0) * np.exp(2j * t)
    hi = np.exp(-0.25j * np.pi) * green_derivative(model, -1.0) * np.exp(-2j * t)
    return (lo + hi) / (2.0 * np.sqrt(np.pi) * t ** 1.5)


# -- double-pole Bessel form ------------------------------------------------

def _cumulative(f, t, panel=0.25):
    """``int_0^t f`` at every grid time (Gauss-Legendre on short panels)."""
    out = np.zeros(len(t), dtype=complex)
    acc = 0.0 + 0.0j
    prev = 0.0
    for i, ti in enumerate(t):
        if ti > prev:
            m = max(1, int(math.ceil((ti - prev) / panel)))
            edges = np.linspace(prev, ti, m + 1)
            half = 0.5 * np.diff(edges)
            x = (edges[:-1] + half)[:, None] + half[:, None] * GL_NODES
            acc += np.sum(half[:, None] * GL_WEIGHTS * f(x))
            prev = ti
        out[i] = acc
    return out


def _j1_over_t(x):
    return 2.0 * special.j1(2.0 * x) / (2.0 * x)


def _check_lambda_bar(lambda_bar):
    lb = complex(lambda_bar)
    if lb.imag != 0 or lb.real <= 1.0:
        raise ValueError("lambda_bar must be real and > 1 (virtual-side EP2A)")
    return lb.real


def bessel_amplitude(lambda_bar, t_grid):
    """``I(t) = e^{-iEt} [1/lam - i int_0^t e^{iEt'} J1(2t')/t' dt']``, ``E = -lam - 1/lam``.

    ``J1(2t')/t'`` tends to 1 as ``t' -> 0``; Gauss nodes never touch 0.
    """
    lb = _check_lambda_bar(lambda_bar)
    t = as_time_grid(t_grid)
    Eb = -lb - 1.0 / lb
    inner = _cumulative(lambda x: np.exp(1j * Eb * x) * _j1_over_t(x), t)
    return np.exp(-1j * Eb * t) * (1.0 / lb - 1j * inner)


def bessel_survival_amplitude(lambda_bar, t_grid):
    """Survival amplitude ``-lam**2 dI/dlam`` at an end-dot EP2A.

    The derivative is taken analytically:
    ``dI/dlam = -i t E' I + e^{-iEt} [-1/lam**2 + E' int_0^t e^{iEt'} J1(2t') dt']``
    with ``E' = -1 + 1/lam**2``.
    """
    lb = _check_lambda_bar(lambda_bar)
    t = as_time_grid(t_grid)
    Eb = -lb - 1.0 / lb
    dEb = -1.0 + 1.0 / lb ** 2
    I = bessel_amplitude(lb, t)
    inner = _cumulative(lambda x: np.exp(1j * Eb * x) * special.j1(2.0 * x), t)
    dI = -1j * t * dEb * I + np.exp(-1j * Eb * t) * (-1.0 / lb ** 2 + dEb * inner)
    return -lb ** 2 * dI
