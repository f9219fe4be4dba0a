import json

import pytest
from hypothesis import given, settings, strategies as st

from kummer_forms.automorphisms import compose_records, identity_record, make_f1, make_iota, make_theta
from kummer_forms.configurations import (
    D1, D2, D2_prime, FixedComponentError, Kodaira, NotRigidError, certify_rigid_linear_system,
    check_fiber, check_section, divisor_class, fixed_locus_table, incidence_graph, isolated_point_count,
    unique_fixed_component_through,
)
from kummer_forms.lattice import is_negative_definite, pair
from kummer_forms.surface import (
    KUMMER_BRANCH, InsufficientData, PointSpec, add_ruling, branch_images_T, build_kummer_config,
    build_T, make_quadric, rename_curves,
)

S = build_kummer_config()
T = build_T()


def test_D1_is_an_8_cycle():
    g = incidence_graph(S, D1())
    assert len(g.nodes) == 8 and len(g.edges) == 8
    assert all(m == 1 for _, m in g.nodes)
    assert all(g.degree(n) == 2 for n, _ in g.nodes)
    assert g.is_connected()


def test_D2_is_a_weighted_star():
    g = incidence_graph(S, D2())
    assert dict(g.nodes)["F1"] == 3
    assert sorted(g.neighbours("F1")) == ["C11", "C12", "C13"]
    for c, leaf in (("C11", "E1"), ("C12", "E2"), ("C13", "E3")):
        assert dict(g.nodes)[c] == 2
        assert sorted(g.neighbours(c)) == sorted(["F1", leaf])


def test_single_curve_graph():
    g = incidence_graph(S, {"C22": 1})
    assert g.nodes == (("C22", 1),) and g.edges == ()
    with pytest.raises(KeyError):
        incidence_graph(S, {"nope": 1})


@pytest.mark.parametrize("div, label", [(D1(), "I8"), (D2(), "IV*"), (D2_prime(), "IV*")])
def test_fiber_types(div, label):
    rep = check_fiber(S, div)
    assert rep.self_int_zero and rep.connected and rep.components_orthogonal_to_fiber
    assert rep.label == label
    d = divisor_class(S, div)
    assert pair(d, d) == 0
    assert all(pair(S.cls(n), d) == 0 for n in div)


def test_two_IV_star_fibers_are_orthogonal():
    assert pair(divisor_class(S, D2()), divisor_class(S, D2_prime())) == 0


def test_non_fibers_are_unknown():
    rep = check_fiber(S, {"E1": 1, "C11": 1})
    assert rep.kodaira_type is Kodaira.UNKNOWN and not rep.self_int_zero
    # correct shape, wrong multiplicities
    bad = dict(D2())
    bad["F1"] = 2
    assert check_fiber(S, bad).kodaira_type is Kodaira.UNKNOWN


def test_opaque_component_rejected():
    with pytest.raises(InsufficientData):
        check_fiber(S, {"Sigma0": 1})


@settings(max_examples=25, deadline=None)
@given(st.permutations([f"E{j}" for j in range(1, 5)] + [f"F{i}" for i in range(1, 5)]
                       + [f"C{i}{j}" for i in range(1, 5) for j in range(1, 5)]))
def test_fiber_type_invariant_under_relabeling(perm):
    names = [f"E{j}" for j in range(1, 5)] + [f"F{i}" for i in range(1, 5)] + \
        [f"C{i}{j}" for i in range(1, 5) for j in range(1, 5)]
    mapping = {a: f"x{b}" for a, b in zip(names, perm)}
    relabeled = rename_curves(S, mapping)
    for div in (D1(), D2(), D2_prime()):
        moved = {mapping[n]: m for n, m in reversed(list(div.items()))}
        assert check_fiber(relabeled, moved).label == check_fiber(S, div).label


def test_I0_star_and_In_star_shapes():
    # the D~4 and D~5 diagrams inside the configuration
    d4 = {"F1": 2, "C11": 1, "C12": 1, "C13": 1, "C14": 1}
    assert check_fiber(S, d4).label == "I0*"
    d5 = {"C11": 1, "C21": 1, "E1": 2, "C31": 2, "F3": 2, "C32": 1, "C33": 1}
    # E1 and F3 are joined through C31: a chain of three doubled nodes
    assert check_fiber(S, d5).label == "I2*"


def test_sections():
    assert check_section(S, "C31", D1())
    assert check_section(S, "C31", D2())
    assert check_section(S, "C41", D2())
    assert not check_section(S, "C11", D2())


def test_branch_divisor_is_rigid():
    branch = {n: 1 for n in branch_images_T()}
    cert = certify_rigid_linear_system(T, branch)
    assert len(cert.steps) == 8
    assert [s["removed"] for s in cert.steps] == [n for n in T.curve_names if n in branch]
    assert cert.steps[-1]["remaining"] == {}
    data = cert.to_json()
    assert list(data) == ["divisor", "steps", "conclusion"]
    json.dumps(data)


def test_multiplicity_counts_steps():
    cert = certify_rigid_linear_system(T, {"C11_T": 3, "E2_T": 1})
    assert len(cert.steps) == 4
    assert all(s["remaining_square"] < 0 for s in cert.steps[:-1])


def test_single_exceptional_curve():
    assert certify_rigid_linear_system(T, {"C23_T": 1}).conclusion == "dim|D| = 0"


def test_rejections_name_the_pair():
    q = add_ruling(make_quadric(), "H1c", "a", 0)
    with pytest.raises(NotRigidError) as e:
        certify_rigid_linear_system(q, {"H1c": 1})
    assert e.value.pair == ("H1c", "H1c")
    with pytest.raises(NotRigidError) as e:
        certify_rigid_linear_system(T, {"E1_T": 1, "C11_T": 1})
    assert set(e.value.pair) == {"E1_T", "C11_T"}


T_NAMES = [n for n in T.curve_names if not T.curve(n).is_opaque]


@settings(max_examples=80, deadline=None)
@given(st.dictionaries(st.sampled_from(T_NAMES), st.integers(1, 3), min_size=1, max_size=6))
def test_rigidity_iff_definite_and_disjoint(div):
    support = list(div)
    disjoint = all(T.intersection(x, y) == 0 for i, x in enumerate(support) for y in support[i + 1:])
    definite = is_negative_definite([T.cls(n) for n in support])
    try:
        certify_rigid_linear_system(T, div)
        ok = True
    except NotRigidError:
        ok = False
    assert ok == (definite and disjoint)


def test_unique_fixed_components():
    branch = list(KUMMER_BRANCH)
    assert unique_fixed_component_through(S, PointSpec.on("C11", "inf"), branch) == "E1"
    assert unique_fixed_component_through(S, PointSpec.on("C11", 0), branch) == "F1"
    with pytest.raises(FixedComponentError) as e:
        unique_fixed_component_through(S, PointSpec.on("C11", 7), branch)
    assert e.value.matches == []
    with pytest.raises(FixedComponentError) as e:
        unique_fixed_component_through(S, PointSpec.on("C11", 0), branch + ["C11"])
    assert sorted(e.value.matches) == ["C11", "F1"]


def test_fixed_locus_of_iota():
    tab = fixed_locus_table(make_iota(), S)
    assert [(e.curve, e.self_int) for e in tab] == [("C11", -2), ("C31", -2), ("C34", -2), ("Sigma0", 6)]
    assert tab[-1].genus == 4


def test_fixed_locus_of_theta():
    assert [e.curve for e in fixed_locus_table(make_theta(), S)] == list(KUMMER_BRANCH)


def test_iota_theta_has_eight_points():
    for rec in (compose_records(make_iota(), make_theta()), compose_records(make_theta(), make_iota())):
        tab = fixed_locus_table(rec, S)
        assert sorted(e.curve for e in tab) == ["E1", "E4", "F1", "F3"]
        assert isolated_point_count(tab) == 8


def test_fixed_locus_guards():
    with pytest.raises(ValueError):
        fixed_locus_table(identity_record(), S)
    with pytest.raises(LookupError):
        fixed_locus_table(make_f1(), S)
