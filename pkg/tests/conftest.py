import pytest

from revca.core import make_automaton
from revca.constructions import product_intersection
from revca.mcm import doubling_example, hartmanis_example
from revca.valc import build_valc1, build_valc2


def toy_stationary_counter():
    """One stationary counter bump then a moving bump per letter; accepts a*."""
    return make_automaton(
        [
            ("q0", "<", "Z", "q1", 1, (0,)),
            ("q1", "a", "Z", "q1s", 0, (1,)),
            ("q1", "a", "P", "q1s", 0, (1,)),
            ("q1s", "a", "P", "q1", 1, (1,)),
            ("q1", ">", "Z", "qacc", 0, (0,)),
            ("q1", ">", "P", "qacc", 0, (0,)),
        ],
        initial="q0",
        accepting=["qacc"],
        k=1,
        name="toy-stationary",
    )


def toy_burst_machine():
    """Accepts a^n c b^(3n): three bumps per a via two stationary moves."""
    return make_automaton(
        [
            ("q0", "<", "Z", "qa", 1, (0,)),
            ("qa", "a", "Z", "qa1", 0, (1,)),
            ("qa", "a", "P", "qa1", 0, (1,)),
            ("qa1", "a", "P", "qa2", 0, (1,)),
            ("qa2", "a", "P", "qa", 1, (1,)),
            ("qa", "c", "Z", "qb", 1, (0,)),
            ("qa", "c", "P", "qb", 1, (0,)),
            ("qb", "b", "P", "qb", 1, (-1,)),
            ("qb", ">", "Z", "qacc", 0, (0,)),
        ],
        initial="q0",
        accepting=["qacc"],
        k=1,
        name="toy-burst",
    )


def toy_parity_dfa():
    """Even number of a's, no counters, no stationary moves."""
    return make_automaton(
        [
            ("q0", "<", "", "even", 1, ""),
            ("even", "a", "", "odd", 1, ""),
            ("odd", "a", "", "even", 1, ""),
            ("even", "b", "", "even", 1, ""),
            ("odd", "b", "", "odd", 1, ""),
            ("even", ">", "", "acc", 0, ""),
        ],
        initial="q0",
        accepting=["acc"],
        k=0,
        name="toy-parity",
    )


@pytest.fixture(scope="session")
def valc_machines():
    """Sped-up part acceptors and their products for the two sample machines."""
    out = {}
    for mk in (hartmanis_example, doubling_example):
        machine = mk()
        v1 = build_valc1(machine)
        v2 = build_valc2(machine)
        out[machine.name] = (machine, v1, v2, product_intersection(v1, v2))
    return out
