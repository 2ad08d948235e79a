"""
Discord of the three X-state families
=====================================

Sweep the family weight c, mix in some white noise and watch the
quantum discord fall.  Everything is printed as a small table; pipe the
CSV from ``spinorbit curve`` into your plotting tool of choice for
figures.
"""

import numpy as np

from spinorbit import Family, discord, family, mean_fidelity, perturb

cs = np.linspace(0, 1, 11)
alphas = (0.0, 0.1, 0.2, 0.3)

for fam in (Family.RHO1, Family.RHO2, Family.RHO3):
    print(f"\n{fam.value}: discord versus c (columns are alpha = {alphas})")
    for c in cs:
        vals = [discord(perturb(family(fam, c), a)).discord for a in alphas]
        print(f"  c={c:4.2f}  " + "  ".join(f"{v:6.4f}" for v in vals))
    # fidelity of the noisy state to the ideal one, averaged over five c values
    print("  mean F:", "  ".join(f"{mean_fidelity(fam, a):.3f}" for a in alphas))

# rho2 is Bell-diagonal, so its curve is symmetric about c = 0.5 where it vanishes
print("\nrho2 at c=0.5:", discord(family(Family.RHO2, 0.5)).discord)

# the optimal measurement on the mode qubit is returned with the result
res = discord(family(Family.RHO1, 0.5))
print("rho1(0.5): Q = %.6f, I = %.6f, C = %.6f" % (res.discord, res.mutual_information,
                                                   res.classical_correlation))
print("optimal measurement angles (theta, phi):", res.argmin.theta, res.argmin.phi)
