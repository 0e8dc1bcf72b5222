import random
from fractions import Fraction

import pytest

from causalbox import (
    CausalDag,
    LATENT,
    OBSERVED,
    chsh_graph,
    gyni_graph,
    instrumental_graph,
    mediation_graph,
    swapping_graph,
    triangle_graph,
    tripartite_bell_graph,
)

ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"  {name}: {ACCEPTANCE_RESULTS[name]}")


def all_test_graphs():
    return {
        "chsh": chsh_graph(),
        "instrumental": instrumental_graph(),
        "mediation": mediation_graph(),
        "gyni": gyni_graph(),
        "tripartite_bell": tripartite_bell_graph(),
        "swapping": swapping_graph(),
        "triangle": triangle_graph(),
    }


def district_demo_graph() -> CausalDag:
    """Seven observed vertices, three latents, districts {X}, {Y} and
    {A, B, C, D, E}: every bidirected-adjacency case appears once."""
    return CausalDag(
        [
            ("A", OBSERVED, 2),
            ("B", OBSERVED, 2),
            ("C", OBSERVED, 2),
            ("D", OBSERVED, 2),
            ("E", OBSERVED, 2),
            ("X", OBSERVED, 2),
            ("Y", OBSERVED, 2),
            ("L1", LATENT),
            ("L2", LATENT),
            ("L3", LATENT),
        ],
        [
            ("X", "A"),
            ("Y", "C"),
            ("L1", "A"),
            ("L1", "B"),
            ("L2", "B"),
            ("L2", "C"),
            ("L2", "D"),
            ("L3", "C"),
            ("L3", "D"),
            ("L3", "E"),
        ],
    )


@pytest.fixture
def rng():
    return random.Random(20240811)


def random_rational_table(rng, variables, weight_range=9):
    """Full-support joint table with random small rational entries."""
    from causalbox import Kernel
    from causalbox.tables import assignments

    cells = list(assignments(tuple(variables)))
    weights = [rng.randint(1, weight_range) for _ in cells]
    total = sum(weights)
    table = {cell: Fraction(w, total) for cell, w in zip(cells, weights)}
    return Kernel.from_mapping(tuple(variables), (), table)
