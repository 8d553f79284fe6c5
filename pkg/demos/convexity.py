"""
Why the change of variables helps
=================================

The original integrand is not convex; after delta = sqrt(2 gamma) it is.
"""
from brachistochrone import Rectangle, brachistochrone_lagrangian, convexity_report, hessian, transformed_lagrangian

L = brachistochrone_lagrangian()
M = transformed_lagrangian()

rep = convexity_report(L, Rectangle(0.1, 10.0, -10.0, 10.0), 1000, seed=0)
print("L:", rep.verdict, "witness", rep.witness, "eigenvalue", rep.witness_min_eigenvalue)

rep = convexity_report(M, Rectangle(0.01, 100.0, -100.0, 100.0), 1000, seed=0)
print("M:", rep.verdict, "min relative eigenvalue", rep.min_relative_eigenvalue)

# the determinant of L's Hessian changes sign at |y| = sqrt 3
for y in (1.5, 3**0.5, 2.0):
    print(f"y = {y:.4f}  det = {hessian(L, 1.0, y).determinant():+.3e}")
