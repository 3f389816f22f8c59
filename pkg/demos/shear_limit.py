"""Small-Deborah convergence of homogeneous shear to the director model.

At alpha = 7 the director aligns with the flow; at alpha = 10 it tumbles.
The table shows the director error halving with De.
"""
from binghamq.dynamics import FlowParams
from binghamq.dynamics.director import measured_tumbling_period, steady_shear_angle, tumbling_period
from binghamq.dynamics.limit import limit_study
from binghamq.leslie import leslie_coefficients

p = FlowParams(alpha_ms=7.0)
table = limit_study([0.1, 0.05, 0.025], "homogeneous-shear", p, t_end=2.0)
for row in table.rows:
    print(f"De {row.de:6.3f}  error {row.error:.3e}  order {row.order:5.2f}  "
          f"|Q - Q_eq(n)| {row.manifold_distance:.2e}")

c7 = leslie_coefficients(7.0)
print(f"alpha 7: lambda {c7.lambda_:.5f}, aligning angle {steady_shear_angle(c7):.5f} rad")
c10 = leslie_coefficients(10.0)
print(f"alpha 10: lambda {c10.lambda_:.5f}, period {tumbling_period(c10):.6f} "
      f"(integrated {measured_tumbling_period(c10):.6f})")
