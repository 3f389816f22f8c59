"""Bingham closure inversion on random admissible tensors."""
from binghamq.closure import roundtrip_study

rep = roundtrip_study(samples=200, seed=0)
print(f"samples {rep.samples}")
print(f"max |moment(B) - Q| {rep.max_residual:.2e}")
print(f"median Newton iterations: cold {rep.median_cold:g}, warm {rep.median_warm:g}")
print(f"worst case {rep.max_iterations} iterations")
