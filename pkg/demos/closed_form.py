"""
Closed-form solution of the fastest-descent problem
===================================================

Solve for the cycloid through (0, 0) and (b, beta) and look at what the
solution record contains.
"""
import math

import numpy as np

from brachistochrone import BrachProblem, make_mesh, sample_solution, solve

# the unit problem: one unit across, one unit down
s = solve(BrachProblem(1.0, 1.0))
print(s.to_record())

# theta_tilde < pi, so the curve is still going down when it reaches (1, 1)
print("theta_tilde < pi:", s.theta_tilde < math.pi, "class:", s.shape.value)

# a shallow target: the optimal path dips below the target and climbs back
deep = solve(BrachProblem(1.0, 0.1))
c = sample_solution(deep, make_mesh(512, 1.0))
print("beta = 0.1 -> class", deep.shape.value, "max depth", c.values.max(), "k", deep.k)

# the first integral gamma (1 + gamma'^2) is the constant k along the sample
k_i = c.values[1:] * (1 + c.slopes[1:] ** 2)
print("max |gamma(1+gamma'^2) - k| =", np.max(np.abs(k_i - deep.k)))
