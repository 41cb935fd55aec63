"""Short-time fits of the survival probability at the side-dot EP3.

Run with ``python demos/ep3_fit.py``.  The half-integer basis is compared with
an integer basis and with the stored reference coefficients, and the window
is halved to show how sensitive the individual coefficients are.
"""
import numpy as np

from epdyn.dynamics import REFERENCE_COEFFICIENTS, linear_grid, spectral_survival
from epdyn.eppoints import locate_ep3
from epdyn.fitting import fit_half_powers, fit_integer_powers

for n in (4, 6):
    ep = locate_ep3(n)
    T = 1.0 / ep.gap
    series = spectral_survival(ep.model, linear_grid(T, 0.05))
    half = fit_half_powers(series, (0.0, T))
    short = fit_half_powers(series, (0.0, T / 2))
    integer = fit_integer_powers(series, (0.0, T))
    print(f"n = {n}: g = {ep.g:.7f}, eps_d = {ep.param:.7f}, fit window [0, {T:.3f}]")
    print(f"  rms: half powers {half.rms:.2e}, integer powers {integer.rms:.2e}")
    print("  " + "power".rjust(6) + "fitted".rjust(14) + "half window".rjust(14) + "reference".rjust(14))
    for key, c, c2, ref in zip(half.as_dict(), half.coefficients, short.coefficients, REFERENCE_COEFFICIENTS[n]):
        print(f"  {key:>6}{c:14.6g}{c2:14.6g}{ref:14.6g}")
    print(f"  max |fit - reference model| on the window: "
          f"{np.max(np.abs(half.evaluate(series.times) - 1 - sum(r * series.times ** float(e) for r, e in zip(REFERENCE_COEFFICIENTS[n], half.exponents)))):.2e}")
