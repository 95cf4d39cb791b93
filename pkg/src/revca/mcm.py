"""Multiplying counter machines: one register holding an arbitrary-precision
positive integer, multiplied by rationals from a fixed stock, branching on
whether the product stays integral."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

MULTIPLICANDS = (
    Fraction(2),
    Fraction(3),
    Fraction(5),
    Fraction(7),
    Fraction(1, 2),
    Fraction(1, 3),
    Fraction(1, 5),
    Fraction(1, 7),
)


class McmError(Exception):
    pass


class McmRule(NamedTuple):
    state: str
    mult: Fraction
    on_integer: str
    on_fraction: str


class McmConfig(NamedTuple):
    state: str
    n: int


class McmStatus(enum.Enum):
    HALTED_FINAL = "HALTED_FINAL"
    HALTED_STUCK = "HALTED_STUCK"
    FUEL_EXHAUSTED = "FUEL_EXHAUSTED"


@dataclass(frozen=True)
class MultCounterMachine:
    states: frozenset[str]
    rules: tuple[McmRule, ...]
    initial: str = "q0"
    final: str = "qf"
    name: str = field(default="", compare=False)

    @property
    def rule_map(self) -> dict[str, McmRule]:
        return {r.state: r for r in self.rules}

    def validate(self) -> list[str]:
        defects = []
        seen = set()
        for r in self.rules:
            if r.state in seen:
                defects.append(f"two rules share first component {r.state!r}")
            seen.add(r.state)
            if r.state == self.final:
                defects.append(f"rule on the final state {self.final!r}")
            if self.initial in (r.on_integer, r.on_fraction):
                defects.append(f"rule {r.state!r} targets the initial state")
            if r.mult not in MULTIPLICANDS:
                defects.append(f"multiplicand {r.mult} outside the stock")
            for st in (r.state, r.on_integer, r.on_fraction):
                if st not in self.states:
                    defects.append(f"rule {r.state!r} references unknown state {st!r}")
        if self.initial not in self.states:
            defects.append(f"initial state {self.initial!r} unknown")
        if self.final not in self.states:
            defects.append(f"final state {self.final!r} unknown")
        if self.initial == self.final:
            defects.append("initial and final states coincide")
        return defects


@dataclass
class McmRun:
    status: McmStatus
    trace: list[McmConfig]

    @property
    def final(self) -> McmConfig:
        return self.trace[-1]


def make_mcm(rules, initial="q0", final="qf", states=None, name="") -> MultCounterMachine:
    rs = tuple(
        sorted(McmRule(q, Fraction(mult), p, r) for (q, mult, p, r) in rules)
    )
    if states is None:
        states = {initial, final}
        for r in rs:
            states |= {r.state, r.on_integer, r.on_fraction}
    machine = MultCounterMachine(frozenset(states), rs, initial, final, name)
    defects = machine.validate()
    if defects:
        raise McmError("; ".join(defects))
    return machine


def mcm_step(machine: MultCounterMachine, cfg: McmConfig) -> Optional[McmConfig]:
    """Apply the rule for the current state: multiply when the product is an
    integer, otherwise keep the register and take the fraction branch.  None
    when no rule exists (always the case in the final state)."""
    rule = machine.rule_map.get(cfg.state)
    if rule is None:
        return None
    product = rule.mult * cfg.n
    if product.denominator == 1:
        return McmConfig(rule.on_integer, int(product))
    return McmConfig(rule.on_fraction, cfg.n)


def mcm_run(machine: MultCounterMachine, i: int, fuel: int = 1_000) -> McmRun:
    """Run from the doubled-up start register 2**i, tracing every configuration."""
    if i < 0 or fuel < 0:
        raise ValueError("i and fuel must be non-negative")
    cfg = McmConfig(machine.initial, 2**i)
    trace = [cfg]
    for _ in range(fuel):
        nxt = mcm_step(machine, cfg)
        if nxt is None:
            status = (
                McmStatus.HALTED_FINAL if cfg.state == machine.final else McmStatus.HALTED_STUCK
            )
            return McmRun(status, trace)
        cfg = nxt
        trace.append(cfg)
    if mcm_step(machine, cfg) is None:
        status = (
            McmStatus.HALTED_FINAL if cfg.state == machine.final else McmStatus.HALTED_STUCK
        )
        return McmRun(status, trace)
    return McmRun(McmStatus.FUEL_EXHAUSTED, trace)


def encode_string(text: str) -> int:
    """Weighted base-3 value of a word over {1, 2}: digit t contributes
    x_t * 3**(t-1)."""
    total = 0
    for pos, ch in enumerate(text):
        if ch not in "12":
            raise McmError(f"digit {ch!r} outside {{1, 2}}")
        total += int(ch) * 3**pos
    return total


def hartmanis_example() -> MultCounterMachine:
    """Five-rule machine whose run from 2**4 doubles once then divides down to
    eight; the placeholder branches go to a rule-less sink."""
    return make_mcm(
        [
            ("q0", 2, "q1", "qs"),
            ("q1", Fraction(1, 2), "q2", "qs"),
            ("q2", Fraction(1, 3), "qs", "q3"),
            ("q3", Fraction(1, 2), "q4", "qs"),
            ("q4", Fraction(1, 5), "qs", "qf"),
        ],
        name="hartmanis",
    )


def doubling_example() -> MultCounterMachine:
    """Single rule that doubles the register and accepts."""
    return make_mcm([("q0", 2, "qf", "qf")], name="double")
