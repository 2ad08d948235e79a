"""
Reading the fidelity off a discord curve
========================================

Simulate the full experiment for rho1 on five c values, then find the
white-noise weight whose model curve best matches the measured discord.
The implied mean fidelity summarizes how faithful the bench is.
"""

from spinorbit import Family, discord, family, perturb
from spinorbit.experiments import ExperimentConfig, cmd_fit, cmd_tomo
from spinorbit.optics import CALIBRATED_NOISE

points = cmd_tomo(ExperimentConfig(family=Family.RHO1, noise=CALIBRATED_NOISE))
print(" c     F_tomo   Q_measured   Q_ideal")
for p in points:
    print(f"{p.c:4.2f}  {p.report.fidelity_vs_target:.4f}   {p.discord.discord:.4f}      "
          f"{p.discord_ideal:.4f}")

fit = cmd_fit([(p.c, p.discord.discord) for p in points], Family.RHO1)
print(f"\nalpha_hat = {fit.alpha_hat:.4f}, implied mean F = {fit.mean_fidelity:.4f}, "
      f"SSE = {fit.residual_sse:.2e}")
for c, measured, model in fit.points:
    print(f"  c={c:4.2f}  measured {measured:.4f}  model {model:.4f}")

# sanity check: noiseless model points give back their own alpha
pts = [(c, discord(perturb(family(Family.RHO2, c), 0.15)).discord)
       for c in (0, 0.25, 0.5, 0.75, 1)]
print("\nrho2 model at alpha=0.15 ->", round(cmd_fit(pts, Family.RHO2).alpha_hat, 4))
