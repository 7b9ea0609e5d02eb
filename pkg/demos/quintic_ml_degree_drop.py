"""The two quintic models have the same degree but different ML degrees.

For generic data, S5' has five complex critical points while S5 has only
three.  The eliminant for S5 still has degree five, but two of its roots
(two real values tied to the golden ratio) make the partition sum
S(theta) vanish.  There the probabilities are undefined, so those points
are not critical points of the likelihood.

Run with ``python demos/quintic_ml_degree_drop.py``.
"""
from toricmle.lattice import lookup
from toricmle.mldegree import likelihood_equations, ml_degree, solve_likelihood_system

for label in ("S5'", "S5"):
    model = lookup(label).model()
    report = ml_degree(model, trials=4, seed=42)
    print(f"{label}: degree {report.degree_of_variety}, ML degree {report.count}, "
          f"consistent over {len(report.trials)} draws: {report.consistent}")

model = lookup("S5").model()
u = [12, 7, 30, 5, 19, 8]
solved = solve_likelihood_system(likelihood_equations(model, u))
print(f"\nS5 with counts {u}:")
print("  eliminant degree:", solved["eliminant_degree"])
print("  factors removed: ", solved["removed"])
print("  critical points: ", len(solved["solutions"]))
for theta in solved["solutions"]:
    print("    theta =", [complex(round(z.real, 6), round(z.imag, 6)) for z in theta])
