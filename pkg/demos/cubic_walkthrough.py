"""From a reflexive triangle to the MLE of the cubic surface model.

Run with ``python demos/cubic_walkthrough.py``.
"""
import numpy as np

from toricmle.birch import solve_birch
from toricmle.closedform import eliminate_to_univariate, mle_closed_form
from toricmle.lattice import lookup, polytope_to_matrix, singularity_profile
from toricmle.mldegree import ml_degree
from toricmle.model import kernel_binomials, parametrize

entry = lookup("S3")
polygon = entry.polygon
print("vertices:", polygon.vertices)
print("singularities:", singularity_profile(polygon))

lifted = polytope_to_matrix(polygon, label="S3")
print("lifted matrix:")
for row in lifted.matrix:
    print("   ", row)
# the catalog fixes a column order; the radical formulas for theta assume it
model = entry.model()
print("catalog column order:", model.columns)
print("toric ideal:", [str(b) for b in kernel_binomials(model)])

u = [3, 5, 7, 11]
newton = solve_birch(model, u)
print("\ncounts", u)
print("Newton estimate     ", np.round(newton.p_hat, 12))

# each coordinate of the MLE is a root of an exact cubic
for k in range(1, 5):
    print(f"eliminant for p{k}:", eliminate_to_univariate(model, u, k))

closed = mle_closed_form(model, u)
print("closed-form estimate", np.round(closed.p_hat, 12))
print("largest difference  ", float(np.max(np.abs(closed.p_hat - newton.p_hat))))
print("theta by radicals   ", closed.theta_hat)
print("round trip error    ", float(np.max(np.abs(parametrize(model, closed.theta_hat) - closed.p_hat))))

report = ml_degree(model, trials=3, seed=1)
print("\nML degree:", report.count, "(degree of the surface:", report.degree_of_variety, ")")
