"""Capacity region of the asymmetric clipper and its searched frontier."""
from cifc import asymmetric_clipper, capacity_det, search_frontier
from cifc.prob import RoleTag as R, product, uniform_on

ch = asymmetric_clipper()
p_in = product(uniform_on(4, range(4), R.X1), uniform_on(8, range(8), R.X2))
region = capacity_det(ch, p_in)
print("rows:")
for c in region.constraints:
    print("  ", c)
print("vertices:", region.vertices)

print("\nfrontier over all input laws (lambda, R1, R2):")
for p in search_frontier(ch, "DET", weights=9, budget=200, seed=0):
    print(f"  {p.lam:.3f}  {p.point[0]:.6f}  {p.point[1]:.6f}")
