"""
Checking stationarity three ways
================================

Strong Euler-Lagrange residual, the Beltrami first integral and the weak
form with hat test functions, for a line and for the true minimiser.
"""
from brachistochrone import (
    BrachProblem,
    beltrami_residual,
    directional_derivative,
    el_residual,
    finite_difference_derivative,
    line_curve,
    make_admissible_perturbation,
    make_mesh,
    sample_solution,
    solve,
    weak_form_residual,
)

m = make_mesh(256, 1.0)
line = line_curve(1.0, 1.0, m)
cyc = sample_solution(solve(BrachProblem(1.0, 1.0)), m)

for name, c in (("line", line), ("cycloid", cyc)):
    print(name)
    print("  strong residual sup on [0.1, 1]:", el_residual(c, cutoff=0.1).sup)
    print("  Beltrami k deviation:", beltrami_residual(c).k_deviation)
    print("  weak residual sup (100 hats):", weak_form_residual(c, n_test=100, c=0.1).sup)

# a bump supported away from the singular end: the analytic derivative
# agrees with a central difference of the travel time
v = make_admissible_perturbation(7, 0.1, 1.0, 0.2, m)
print("line: d_v =", directional_derivative(line, v), " FD =", finite_difference_derivative(line, v))
print("cycloid: d_v =", directional_derivative(cyc, v))
