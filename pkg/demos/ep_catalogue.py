"""Tour of the exceptional points of the three model families.

Run with ``python demos/ep_catalogue.py``.
"""
import warnings

import numpy as np

from epdyn.eppoints import closed_form_eps, locate_ep2, locate_ep3, puiseux
from epdyn.models import ModelSpec
from epdyn.spectra import discrete_states


def show(records, title):
    print(title)
    for ep in records:
        kind = ep.ep_type.value if ep.ep_type else "?"
        print(f"  EP{ep.order}{kind}  param={ep.param:+.8f}  E={ep.energy:.8f}  gap={ep.gap:.3e}")


# Qubit: an EP2A at large V and an EP2B at small V
qubit = ModelSpec.qubit(0.75, 1.0)
show(closed_form_eps(qubit), "qubit, g = 0.75, closed forms")
show(locate_ep2(qubit, (0.1, 2.0)), "qubit, g = 0.75, numerical search")

# End dot: the lower EP2A sits just below the band edge for weak coupling
for g in (0.1, 0.5, 0.9):
    show(closed_form_eps(ModelSpec.end_dot(g, 0.0))[:1], f"end dot, g = {g}")

# Crossing the lower EP2A turns two virtual states into a resonance pair
g = 0.1
eps_bar = closed_form_eps(ModelSpec.end_dot(g, 0.0))[0].param
for delta in (-1e-4, 1e-4):
    states = discrete_states(ModelSpec.end_dot(g, eps_bar + delta))
    print(f"  delta={delta:+.0e}: " + ", ".join(s.classification.value for s in states))

# Side-coupled dot: two EP2As approach and merge into an EP3
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for g in (0.06, 0.08, 0.09):
        show(locate_ep2(ModelSpec.side_dot(g, -2.0, 4), (-2.2, -1.9)), f"side dot n = 4, g = {g}")
for n in (4, 6):
    ep = locate_ep3(n)
    print(f"EP3 for n = {n}: g = {ep.g:.8f}, eps_d = {ep.param:.8f}, E = {ep.energy.real:.8f}, "
          f"T_EP3 = {1 / ep.gap:.4f}")

# Square-root splitting near the end-dot EP2A
model = ModelSpec.end_dot(g, 0.0)
ep = closed_form_eps(model)[0]
pu = puiseux(model, ep, "E")
fit = puiseux(model, ep, "E", numeric=True)
print("Puiseux leading coefficient: closed form", np.round(pu.leading(), 10), "fitted", np.round(fit.leading(), 10))
