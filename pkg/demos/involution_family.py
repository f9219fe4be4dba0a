"""
Infinitely many involutions, infinitely many classes
====================================================

Conjugating iota by powers of f1 gives involutions x -> 2^(1-n) - x on C.
Over the integer affine group their centres never become congruent, while
the dyadic translations from f3 collapse everything into one class.
"""

from fractions import Fraction

from kummer_forms import make_f3, make_iota_n
from kummer_forms.automorphisms import C, conjugate_by_f1_power
from kummer_forms.groups import (
    DyadicClosure, count_conjugacy_classes, dyadic_model, escape_witness, integer_model,
    is_finitely_generated, real_form_classes,
)

for n in (-2, 0, 1, 3):
    print(f"iota_{n}|C:", make_iota_n(n).restriction(C).mobius)

f3 = make_f3()
print("f3|C:", f3.restriction(C).mobius)
for n in range(4):
    print(f"  f1^-{n} f3 f1^{n}|C:", conjugate_by_f1_power(f3, n).restriction(C).mobius)

# the translations 1/2^n generate Z[1/2], which needs infinitely many generators
fg, cert = is_finitely_generated(DyadicClosure(1))
print("finitely generated:", fg, "| first witnesses", [str(w) for w in cert.witness[:4]])
print("outside <1/8, 3/4>:", escape_witness(DyadicClosure(1), [Fraction(1, 8), Fraction(3, 4)]))

centers = [make_iota_n(n).restriction(C).mobius.as_affine().offset for n in range(21)]
part = count_conjugacy_classes(centers, integer_model())
print("classes under the integer model:", part.count)
print("classes under the dyadic model:", count_conjugacy_classes(centers, dyadic_model()).count)
print(real_form_classes(part, galois_action_trivial=True))
