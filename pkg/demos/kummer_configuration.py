"""
The 24 curves on a Kummer surface
=================================

Build the E_j, F_i, C_ij configuration, look at its intersection matrix and
find the two elliptic fibrations hiding inside it.
"""

from kummer_forms import build_kummer_config, check_fiber, check_section, incidence_graph, matrix_rank
from kummer_forms.configurations import D1, D2, D2_prime, divisor_class
from kummer_forms.lattice import pair

S = build_kummer_config()
names = [n for n in S.curve_names if not S.curve(n).is_opaque]
print(len(names), "curves, Gram rank", matrix_rank(S.lattice.gram))

# each C_ij meets exactly one E and one F
print("C23 meets", [n for n in names if n != "C23" and S.intersection("C23", n)])

# an 8-cycle of (-2)-curves: a fiber of type I8
g = incidence_graph(S, D1())
print("D1 edges:", [(a, b) for a, b, _ in g.edges])
print("D1 is", check_fiber(S, D1()).label)

# the weighted star 3F1 + 2C1j + E_j is an IV* fiber, and so is D2'
for name, d in (("D2", D2()), ("D2'", D2_prime())):
    print(name, "is", check_fiber(S, d).label)
print("D2 . D2' =", pair(divisor_class(S, D2()), divisor_class(S, D2_prime())))

# C31 meets both fibers once, so it serves as a zero section
print("C31 section of D1, D2:", check_section(S, "C31", D1()), check_section(S, "C31", D2()))
