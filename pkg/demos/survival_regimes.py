"""Survival probability near EP2B and EP2A points, compared with approximants.

Run with ``python demos/survival_regimes.py``.  Prints short tables; use
``epdyn survival ... --plot-script`` for figures.
"""
import numpy as np

from epdyn.dynamics import (
    evaluate_approximant,
    lattice_survival,
    linear_grid,
    log_grid,
    spectral_survival,
    timescales,
)
from epdyn.eppoints import EPType, closed_form_eps
from epdyn.fitting import loglog_slope
from epdyn.models import ModelSpec


def table(title, t, columns):
    print(title)
    print("  " + "t".rjust(10) + "".join(name.rjust(22) for name in columns))
    for i in range(len(t)):
        print(f"  {t[i]:10.4g}" + "".join(f"{col[i]:22.6g}" for col in columns.values()))


# EP2B of the qubit: power-law times exponential, then t**-3 with cos**2 ripples
g = 0.75
qubit_eps = closed_form_eps(ModelSpec.qubit(g, 1.0))
ep2b = next(e for e in qubit_eps if e.ep_type is EPType.B)
model = ep2b.model
t = linear_grid(15.0, 2.5)
table("qubit at the EP2B, intermediate times", t, {
    "lattice": lattice_survival(model, t).values,
    "(1+D1t+D2t^2)e^-Gt": evaluate_approximant("ep2b-intermediate", model, t).values,
})
long = spectral_survival(model, np.linspace(50, 500, 9001))
print(f"  long-time envelope slope: {loglog_slope(long):.4f}")

# EP2A of the end dot near the band edge: t**(1/2) decay, then t**-3
model = ModelSpec.end_dot(0.1, -1.989974)
ep = closed_form_eps(model)[0]
ts = timescales(model, ep)
print(f"end dot g=0.1: T_Z = {ts.T_Z:.3f}, T_EP = {ts.T_EP:.4g}")
t = log_grid(10.0, 1e4, 3)
table("end dot near the EP2A, band-edge regime", t, {
    "spectral": spectral_survival(model, t).values,
    "band-edge law": evaluate_approximant("ep2a-bandedge", model, t).values,
})
t = log_grid(1e6, 1e7, 2)
table("end dot near the EP2A, long times", t, {
    "spectral": spectral_survival(model, t).values,
    "t^-3 law": evaluate_approximant("ep2a-long", model, t).values,
})

# Far from the band edge the fractional window disappears
model = ModelSpec.end_dot(0.9, -0.87)
ts = timescales(model, closed_form_eps(model)[0])
print(f"end dot g=0.9: T_Z = {ts.T_Z:.3f}, T_EP = {ts.T_EP:.3f}, no decade between them: {ts.window_squeezed}")
t = linear_grid(1.0, 0.25)
table("end dot g=0.9, short times", t, {
    "lattice": lattice_survival(model, t).values,
    "1-g^2t^2": evaluate_approximant("zeno-d", model, t).values,
    "band-edge law": evaluate_approximant("ep2a-bandedge", model, t).values,
})
