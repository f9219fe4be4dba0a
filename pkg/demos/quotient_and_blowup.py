"""
From S to T to X
================

T is P^1 x P^1 blown up at sixteen points; X blows up one more point on
C11.  The quotient rules fix the self-intersections of fixed curves.
"""

from kummer_forms import build_kummer_config, build_T, build_X, certify_rigid_linear_system, gram_determinant
from kummer_forms.automorphisms import descend_to_T, lift_to_X, make_iota, ns_action
from kummer_forms.lattice import pair
from kummer_forms.surface import branch_images_T

S, T, X = build_kummer_config(), build_T(), build_X()

branch = branch_images_T()
print("branch images on T:", {n: T.curve(n).self_int for n in branch})
total = T.lattice.zero()
for n in branch:
    total = total + T.cls(n)
print("sum of branch images == -2 K_T:", total == -2 * T.canonical)

# every component has negative square and they are disjoint: peel them off
cert = certify_rigid_linear_system(T, {n: 1 for n in branch})
for step in cert.steps:
    print("  remove", step["removed"], "-> remaining square", step["remaining_square"])
print(cert.conclusion)

print("NS(X): rank", X.lattice.rank, "det", gram_determinant(X.lattice), "K_X^2 =", pair(X.canonical, X.canonical))

iota_T = descend_to_T(make_iota(), S, T)
iota_X = lift_to_X(iota_T, T, X)
print("fixed curves of iota on T:", [(c.name, c.self_int) for c in iota_T.declared_fixed_curves])
print("fixed curves of iota on X:", [(c.name, c.self_int) for c in iota_X.declared_fixed_curves],
      "+", iota_X.declared_fixed_points, "isolated point")
print("iota_X is an isometry of NS(X):", ns_action(iota_X, X).is_isometry())
