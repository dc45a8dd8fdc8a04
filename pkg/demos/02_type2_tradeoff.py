"""Brightness against heralding efficiency for type-II PPKTP.

Run: python demos/02_type2_tradeoff.py [--step 0.05]
"""
import argparse

import numpy as np

from spdcmodes import ktp_source
from spdcmodes.sweep import (fit_tradeoff, grid_sweep, strategy_fixed_collection,
                             strategy_fixed_pump, strategy_max_H_at_B)

ap = argparse.ArgumentParser()
ap.add_argument("--step", type=float, default=0.1, help="log10(xi) step")
args = ap.parse_args()

# %% Every (xi_p, xi_s = xi_i) cell on a log grid.  B is relative to the
# brightest cell; H is the symmetric heralding efficiency.
sweep = grid_sweep(ktp_source("type2", 0.04), (-2.0, 1.0, args.step), threads=2)
best = sweep.point(sweep.argmax)
print(f"brightest cell: xi_p={best.xi_p:.3f} xi_s={best.xi_s:.3f} H={best.H:.4f}")

# %% Three ways to move along the trade-off.
targets = np.round(np.arange(0.05, 1.0001, 0.05), 4)
curves = {
    "fixed collection": strategy_fixed_collection(sweep),
    "fixed pump": strategy_fixed_pump(sweep),
    "max H at B": strategy_max_H_at_B(sweep, targets),
}
for name, pts in curves.items():
    sel = [p for p in pts if p.B > 0.1][:: max(1, len(pts) // 6)]
    print(name + ": " + ", ".join(f"(B={p.B:.2f}, H={p.H:.3f})" for p in sel))

# %% The optimal curve is well described by a cubic in B.
fit = fit_tradeoff(curves["max H at B"])
print("H(B) cubic:", ", ".join(f"{c:.4f}" for c in fit.coefficients),
      f"rms {fit.residual_rms:.1e}")
low = max((p for p in curves["max H at B"] if p.B <= 0.15), key=lambda p: p.H)
print(f"H={low.H:.4f} needs B={low.B:.3f}, about {1 / low.B:.0f}x dimmer than the brightest cell")
