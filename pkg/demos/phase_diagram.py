"""Equilibrium branches of the uniaxial Bingham model against alpha.

Prints the nematic roots eta and the order parameters S2, S4 on a sweep
through the critical strength, then the tumbling parameter on the stable
branch.
"""
import numpy as np

from binghamq.equilibria import critical_alpha, solve_branches
from binghamq.leslie import leslie_coefficients

a_star, e_star = critical_alpha()
print(f"critical alpha {a_star:.12f} at eta {e_star:.12f}")
print(f"{'alpha':>7} {'roots':>5} {'eta1':>10} {'S2':>8} {'S4':>8} {'lambda':>8}")
for alpha in np.round(np.linspace(6.0, 12.0, 13), 3):
    br = solve_branches(alpha)
    if br.nematic:
        c = leslie_coefficients(alpha)
        print(f"{alpha:7.3f} {len(br.roots):5d} {br.eta1:10.5f} {c.s2:8.5f} {c.s4:8.5f} {c.lambda_:8.5f}")
    else:
        print(f"{alpha:7.3f} {len(br.roots):5d} {'-':>10}")
