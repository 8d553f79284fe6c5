"""
Sweeping the aspect ratio
=========================

theta_tilde decreases with beta/b; the shape class flips at beta/b = 2/pi,
where the curve arrives horizontally.
"""
from brachistochrone.cli import sweep_rows

for row in sweep_rows(0.2, 1.2, 10, mark_critical=True):
    print(f"{row['ratio']:.6f}  theta {row['theta_tilde']:.6f}  k {row['k']:.6f}  {row['class']}")
