"""No-signalling constraints and post-selection membership."""

from fractions import Fraction
from itertools import product

import pytest

from causalbox import (
    CausalDag,
    Kernel,
    LATENT,
    MultiLatentError,
    OBSERVED,
    build_hypergraph,
    check_nested,
    chsh_graph,
    ci_constraints,
    ci_holds,
    classical_member,
    enumerate_classical_vertices,
    gyni_box,
    gyni_graph,
    gyni_projected,
    instrumental_graph,
    instrumental_score,
    join_inputs,
    lift_network,
    lp_solve,
    mediation_graph,
    ns_constraints,
    ns_member,
    pr_box,
    project,
    ps_member,
    ps_system,
    split_joint,
    swapping_box,
    swapping_graph,
    tripartite_bell_graph,
    uniform_table,
)
from causalbox.networks import random_network


def _score2_table():
    """p(a, b | x) = [a = 0][b = x], joint with uniform x."""
    return Kernel.from_function(
        (("A", 2), ("B", 2), ("X", 2)),
        (),
        lambda v: Fraction(1, 2) if v["A"] == 0 and v["B"] == v["X"] else Fraction(0),
    )


# -- no-signalling equalities ----------------------------------------------------


def test_chsh_ns_equalities():
    h = build_hypergraph(chsh_graph())
    equalities = ns_constraints(h)
    # two inputs, each with 2 kept-output assignments x 2 other-input values
    assert len(equalities) == 8
    per_input = {}
    for eq in equalities:
        per_input.setdefault(eq.input_vertex, 0)
        per_input[eq.input_vertex] += 1
    assert per_input == {"X": 4, "Y": 4}


def test_tripartite_ns_counts_and_gyni_box():
    h = build_hypergraph(tripartite_bell_graph())
    equalities = ns_constraints(h)
    # per input: 4 kept-output assignments x 4 other-input assignments
    assert len(equalities) == 48
    assert ns_member(gyni_box(), h)


def test_single_party_graph_has_no_ns_equalities():
    dag = CausalDag(
        [("X", OBSERVED, 2), ("A", OBSERVED, 2), ("L", LATENT)],
        [("X", "A"), ("L", "A")],
    )
    assert ns_constraints(build_hypergraph(dag)) == []


def test_signalling_box_detected():
    h = build_hypergraph(chsh_graph())
    signalling = Kernel.from_function(
        (("A", 2), ("B", 2)),
        (("X", 2), ("Y", 2)),
        lambda v: Fraction(1, 2) if v["A"] == v["Y"] else Fraction(0),
    )
    assert not ns_member(signalling, h)
    assert ns_member(pr_box(), h)


def test_multi_latent_ns_rejected():
    with pytest.raises(MultiLatentError):
        ns_constraints(build_hypergraph(swapping_graph()))


def test_ns_equalities_follow_from_lifted_independences(rng):
    """Cross-module consistency: product-input joints built from o box
    satisfy the hypergraph's d-separation statements iff the box satisfies
    the no-signalling equalities."""
    h = build_hypergraph(chsh_graph())
    records = ci_constraints(h.base)
    boxes = [pr_box(), pr_box(1, 1, 0)]
    from causalbox import local_box

    boxes += [local_box(rng.randrange(16)) for _ in range(3)]
    for box in boxes:
        joint = join_inputs(box, uniform_table((("X", 2), ("Y", 2))))
        assert ns_member(box, h)
        for record in records:
            assert ci_holds(joint, {record.a}, {record.b}, record.given), str(record)


# -- instrumental functional -------------------------------------------------------


def test_instrumental_score_examples():
    uniform = Kernel.from_function(
        (("A", 2), ("B", 2)), (("X", 2),), lambda v: Fraction(1, 4)
    )
    assert instrumental_score(uniform) == Fraction(1, 2)
    bad, _ = split_joint(_score2_table(), ["X"])
    assert instrumental_score(bad) == 2


def test_deterministic_strategies_respect_instrumental_bound():
    responses = [(0, 0), (1, 1), (0, 1), (1, 0)]
    for fa in responses:
        for gb in responses:
            table = Kernel.from_function(
                (("A", 2), ("B", 2)),
                (("X", 2),),
                lambda v: Fraction(int(v["A"] == fa[v["X"]] and v["B"] == gb[v["A"]])),
            )
            assert instrumental_score(table) <= 1


# -- post-selection membership --------------------------------------------------------


def test_score2_table_separates_ps_from_nested():
    joint = _score2_table()
    g = instrumental_graph()
    assert check_nested(joint, g).member
    verdict = ps_member(joint, g)
    assert verdict.status == "not_member"


def test_classical_vertices_accepted_with_reprojecting_certificates():
    for g in (instrumental_graph(), chsh_graph()):
        h = build_hypergraph(g)
        in_vars = tuple((i, 2) for i in sorted(v for v in g.observed() if not g.parents(v) and g.children(v)))
        for vertex in enumerate_classical_vertices(g):
            joint = join_inputs(vertex.table, uniform_table(in_vars))
            verdict = ps_member(joint, g)
            assert verdict.member
            from causalbox import bell_inputs

            lift_inputs = tuple((i, h.base.cardinality(i)) for i in bell_inputs(h.base))
            lifted = join_inputs(verdict.certificate, uniform_table(lift_inputs))
            projected = project(lifted, h.copies)
            for env, value in joint.cells():
                assert projected.value(env) == value


def test_gyni_projected_is_ps_member_with_exact_certificate():
    g = gyni_graph()
    joint = join_inputs(gyni_projected(), uniform_table((("X", 2),)))
    verdict = ps_member(joint, g)
    assert verdict.member and verdict.scale > 0
    h = build_hypergraph(g)
    from causalbox import bell_inputs

    lift_inputs = tuple((i, 2) for i in bell_inputs(h.base))
    lifted = join_inputs(verdict.certificate, uniform_table(lift_inputs))
    projected = project(lifted, h.copies)
    for env, value in joint.cells():
        assert projected.value(env) == value
    assert ns_member(verdict.certificate, h)


def test_uniform_copy_prior_is_normative(rng):
    """The uniform copy marginal is part of the model, not a free knob.

    Under the uniform prior the LP accepts every classical mixture (as it
    must, since the network lift realizes them), and rejections such as the
    signalling score-2 table stay rejected under any full-support prior.
    A skewed copy prior, by contrast, can reject classical mixtures, which
    is why the copy marginal is pinned rather than left to choice."""
    g = instrumental_graph()
    skew = {"A_B": {0: Fraction(1, 3), 1: Fraction(2, 3)}}
    vertices = enumerate_classical_vertices(g)
    mixtures = []
    for _ in range(5):
        raw = [Fraction(rng.randint(0, 4)) for _ in vertices]
        total = sum(raw) or Fraction(1)
        weights = [w / total for w in raw]
        box = Kernel.from_function(
            vertices[0].table.outcome_vars,
            vertices[0].table.index_vars,
            lambda v: sum(w * vert.table.value(v) for w, vert in zip(weights, vertices)),
        )
        mixtures.append(join_inputs(box, uniform_table((("X", 2),))))
    for joint in mixtures:
        result = lp_solve(ps_system(joint, g)[0])
        assert result.is_optimal and result.value > 0
    for priors in (None, skew):
        result = lp_solve(ps_system(_score2_table(), g, input_priors=priors)[0])
        assert not result.is_optimal or result.value == 0
    # the recorded counterexample: an equal mixture of the strategies
    # (a = 0, b = 0) and (a = x, b = 0) is classical, hence accepted under
    # the uniform prior, yet its skewed-prior system is infeasible
    def counterexample(v):
        a_const = Fraction(int(v["A"] == 0 and v["B"] == 0))
        a_track = Fraction(int(v["A"] == v["X"] and v["B"] == 0))
        return (a_const + a_track) / 2

    box = Kernel.from_function(
        vertices[0].table.outcome_vars, vertices[0].table.index_vars, counterexample
    )
    joint = join_inputs(box, uniform_table((("X", 2),)))
    assert lp_solve(ps_system(joint, g)[0]).value > 0
    skewed = lp_solve(ps_system(joint, g, input_priors=skew)[0])
    assert skewed.status == "infeasible"


def test_skewed_setting_priors_are_designated_inputs(rng):
    """A classical model with a non-uniform setting prior is a member once
    that prior is designated; under the default uniform designation the
    same joint asks a different question and may be refused."""
    from fractions import Fraction as F

    from causalbox import Kernel
    from causalbox.networks import ClassicalNetwork, random_network

    g = instrumental_graph()
    net = random_network(g, rng, latent_cardinality=3)
    cpts = dict(net.cpts)
    cpts["X"] = Kernel.from_mapping((("X", 2),), (), {(0,): F(1, 5), (1,): F(4, 5)})
    p = ClassicalNetwork(g, cpts).joint_observed()
    matched = ps_member(p, g, input_priors={"X": {0: F(1, 5), 1: F(4, 5)}})
    assert matched.member and matched.scale > 0
    assert check_nested(p, g).member


def test_swapping_needs_certificate_and_accepts_itself():
    g = swapping_graph()
    joint = join_inputs(swapping_box(), uniform_table((("X", 2), ("Z", 2))))
    verdict = ps_member(joint, g)
    assert verdict.status == "unsupported"
    # the graph is already Bell-type, so the joint is its own candidate lift
    verdict = ps_member(joint, g, certificate=joint)
    assert verdict.member


def test_certificate_rejected_when_it_violates_independences():
    g = swapping_graph()
    joint = join_inputs(swapping_box(), uniform_table((("X", 2), ("Z", 2))))
    # a signalling candidate: A copies Z
    bad = Kernel.from_function(
        joint.outcome_vars,
        (),
        lambda v: Fraction(1, 8) if v["A"] == v["Z"] and v["C"] == v["B"] else 0,
    )
    verdict = ps_member(joint, g, certificate=bad)
    assert verdict.status == "not_member"


def test_mediation_unsupported_but_lift_certificate_verifies(rng):
    """The mediation hypergraph has an outcome vertex untouched by the
    latent, so the LP route declines; the explicit network lift serves as a
    verifiable certificate."""
    g = mediation_graph()
    h = build_hypergraph(g)
    net = random_network(g, rng, latent_cardinality=3)
    joint = net.joint_observed()
    verdict = ps_member(joint, g)
    assert verdict.status == "unsupported"
    certificate = lift_network(net, h).joint_observed()
    verdict = ps_member(joint, g, certificate=certificate)
    assert verdict.member


def test_inclusion_chain_fixture_witnesses():
    # PR box: inside NS and PS on the Bell structure, outside classical
    g = chsh_graph()
    pr_joint = join_inputs(pr_box(), uniform_table((("X", 2), ("Y", 2))))
    assert ps_member(pr_joint, g).member
    assert check_nested(pr_joint, g).member
    assert not classical_member(pr_box(), g).member
    # score-2 table: nested member, PS non-member (shown above)
    # GYNI projection: PS member, classical non-member
    gg = gyni_graph()
    assert not classical_member(gyni_projected(), gg).member
    joint = join_inputs(gyni_projected(), uniform_table((("X", 2),)))
    assert ps_member(joint, gg).member
