"""Deterministic one-way multi-counter automata: model and forward semantics.

A machine reads its input once, left to right, between two endmarkers.  It
carries k counters that can be incremented, decremented, and tested for
zero; the transition table is keyed on (state, scanned token, counter
statuses) and is a partial function, so every configuration has at most one
successor.  A word is accepted when the machine halts (no applicable
transition) in an accepting state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Any, Iterable, NamedTuple, Optional

State = Any  # hashable; plain strings in files, tuples in constructed machines
Token = str

LEFT_END = "<"
RIGHT_END = ">"
ENDMARKERS = (LEFT_END, RIGHT_END)

ZERO = "Z"
POSITIVE = "P"

StatusVector = tuple[str, ...]
Deltas = tuple[int, ...]


class MachineError(Exception):
    """Base class for machine-model errors."""


class UnknownTokenError(MachineError):
    pass


class InvalidConfigurationError(MachineError):
    pass


class InvalidTransitionEffectError(MachineError):
    """A transition would drive a counter below zero (max_delta > 1 only)."""


class NegativeCounterError(MachineError):
    pass


class Transition(NamedTuple):
    state: State
    token: Token
    statuses: StatusVector
    target: State
    move: int
    deltas: Deltas

    @property
    def key(self) -> tuple[State, Token, StatusVector]:
        return (self.state, self.token, self.statuses)


class Configuration(NamedTuple):
    state: State
    word: tuple[Token, ...]
    head: int
    counters: tuple[int, ...]


class Verdict(enum.Enum):
    ACCEPT = "ACCEPT"
    REJECT_HALT = "REJECT"
    FUEL_EXHAUSTED = "FUEL_EXHAUSTED"


@dataclass
class RunOutcome:
    verdict: Verdict
    steps: int
    final: Configuration
    trace: Optional[list[Configuration]] = None
    diagnostic: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT


def status_of(counters: Iterable[int]) -> StatusVector:
    """Componentwise counter status: ZERO for 0, POSITIVE for anything above."""
    out = []
    for value in counters:
        if value < 0:
            raise NegativeCounterError(f"negative counter value {value}")
        out.append(POSITIVE if value else ZERO)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class CounterAutomaton:
    """One-way counter automaton with a partial deterministic transition table.

    ``transitions`` keeps declaration order (handy for table fidelity tests);
    lookups go through the cached ``table``.  Ordinary machines have
    ``max_delta`` 1; larger per-step counter changes are allowed for the
    extended machines that the normalization construction removes.
    """

    states: frozenset
    alphabet: frozenset[str]
    k: int
    transitions: tuple[Transition, ...]
    initial: State
    accepting: frozenset
    max_delta: int = 1
    name: str = ""

    @cached_property
    def table(self) -> dict[tuple[State, Token, StatusVector], Transition]:
        return {t.key: t for t in self.transitions}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CounterAutomaton):
            return NotImplemented
        return (
            self.states == other.states
            and self.alphabet == other.alphabet
            and self.k == other.k
            and self.max_delta == other.max_delta
            and self.initial == other.initial
            and self.accepting == other.accepting
            and set(self.transitions) == set(other.transitions)
        )

    def __hash__(self):
        return hash((self.states, self.alphabet, self.k, self.initial))

    def initial_configuration(self, word: Iterable[Token]) -> Configuration:
        return Configuration(self.initial, tuple(word), 0, (0,) * self.k)

    def scanned(self, cfg: Configuration) -> Token:
        if cfg.head == 0:
            return LEFT_END
        if cfg.head == len(cfg.word) + 1:
            return RIGHT_END
        return cfg.word[cfg.head - 1]


def make_automaton(
    transitions: Iterable[tuple],
    initial: State,
    accepting: Iterable[State],
    k: int,
    alphabet: Iterable[str] | None = None,
    states: Iterable[State] | None = None,
    max_delta: int = 1,
    name: str = "",
) -> CounterAutomaton:
    """Build an automaton from transition 6-tuples, inferring what is omitted.

    Each entry is (state, token, statuses, target, move, deltas); statuses and
    deltas may be given as strings/lists for convenience.
    """
    trans = []
    for (state, token, statuses, target, move, deltas) in transitions:
        trans.append(
            Transition(
                state,
                token,
                tuple(statuses),
                target,
                int(move),
                tuple(int(d) for d in deltas),
            )
        )
    if states is None:
        seen = {initial, *accepting}
        for t in trans:
            seen.add(t.state)
            seen.add(t.target)
        states = seen
    if alphabet is None:
        alphabet = {t.token for t in trans if t.token not in ENDMARKERS}
    return CounterAutomaton(
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        k=k,
        transitions=tuple(trans),
        initial=initial,
        accepting=frozenset(accepting),
        max_delta=max_delta,
        name=name,
    )


def validate(machine: CounterAutomaton) -> list[str]:
    """Check well-formedness; returns one message per defect, empty if clean.

    Besides referential integrity this enforces the model's side conditions:
    determinism of the table, no decrement keyed on a zero status, and no
    rightward move while scanning the right endmarker (so the head can never
    pass the endmarkers).
    """
    defects = []
    if machine.k < 0:
        defects.append(f"counter count k={machine.k} is negative")
    if machine.max_delta < 1:
        defects.append(f"max_delta {machine.max_delta} must be at least 1")
    for token in sorted(machine.alphabet):
        if not token:
            defects.append("empty token in alphabet")
        elif any(ch.isspace() for ch in token):
            defects.append(f"token {token!r} contains whitespace")
        if token in ENDMARKERS:
            defects.append(f"reserved endmarker {token!r} declared in alphabet")
    if machine.initial not in machine.states:
        defects.append(f"initial state {machine.initial!r} not in states")
    for st in machine.accepting:
        if st not in machine.states:
            defects.append(f"accepting state {st!r} not in states")

    seen: dict[tuple, Transition] = {}
    for t in machine.transitions:
        where = f"transition {t.state!r}/{t.token!r}/{''.join(t.statuses)}"
        if t.state not in machine.states:
            defects.append(f"{where}: unknown source state")
        if t.target not in machine.states:
            defects.append(f"{where}: unknown target state {t.target!r}")
        if t.token not in machine.alphabet and t.token not in ENDMARKERS:
            defects.append(f"{where}: unknown token")
        if len(t.statuses) != machine.k:
            defects.append(f"{where}: status vector has length {len(t.statuses)}, expected {machine.k}")
        elif any(s not in (ZERO, POSITIVE) for s in t.statuses):
            defects.append(f"{where}: bad status characters")
        if t.move not in (0, 1):
            defects.append(f"{where}: move {t.move} not in {{0, 1}}")
        if t.token == RIGHT_END and t.move == 1:
            defects.append(f"{where}: rightward move on the right endmarker")
        if len(t.deltas) != machine.k:
            defects.append(f"{where}: delta vector has length {len(t.deltas)}, expected {machine.k}")
        else:
            for i, (status, delta) in enumerate(zip(t.statuses, t.deltas)):
                if abs(delta) > machine.max_delta:
                    defects.append(f"{where}: |delta[{i}]| = {abs(delta)} exceeds max_delta {machine.max_delta}")
                if status == ZERO and delta < 0:
                    defects.append(f"{where}: decrement on zero status at counter {i}")
        prev = seen.get(t.key)
        if prev is None:
            seen[t.key] = t
        elif prev == t:
            defects.append(f"{where}: duplicate transition")
        else:
            defects.append(f"{where}: nondeterministic key (two distinct outputs)")
    return defects


def check_configuration(machine: CounterAutomaton, cfg: Configuration) -> None:
    if cfg.state not in machine.states:
        raise InvalidConfigurationError(f"state {cfg.state!r} not in machine")
    if not (0 <= cfg.head <= len(cfg.word) + 1):
        raise InvalidConfigurationError(f"head {cfg.head} out of range for |w|={len(cfg.word)}")
    if len(cfg.counters) != machine.k:
        raise InvalidConfigurationError(f"expected {machine.k} counters, got {len(cfg.counters)}")
    if any(c < 0 for c in cfg.counters):
        raise InvalidConfigurationError(f"negative counter in {cfg.counters}")


def step(machine: CounterAutomaton, cfg: Configuration) -> Optional[Configuration]:
    """One forward step; None when the table has no entry (the machine halts)."""
    check_configuration(machine, cfg)
    token = machine.scanned(cfg)
    t = machine.table.get((cfg.state, token, status_of(cfg.counters)))
    if t is None:
        return None
    counters = tuple(c + d for c, d in zip(cfg.counters, t.deltas))
    if any(c < 0 for c in counters):
        raise InvalidTransitionEffectError(
            f"transition {t.key} drives a counter below zero from {cfg.counters}"
        )
    return Configuration(t.target, cfg.word, cfg.head + t.move, counters)


def run(
    machine: CounterAutomaton,
    word: Iterable[Token],
    fuel: int,
    trace: bool = False,
) -> RunOutcome:
    """Run from the initial configuration with a step budget.

    ``fuel`` bounds applied transitions; a machine that halts after exactly
    ``fuel`` steps still gets its accept/reject verdict.  Counters driven
    negative by an oversized delta abort the run as a diagnosed reject.
    """
    word = tuple(word)
    for token in word:
        if token not in machine.alphabet:
            raise UnknownTokenError(f"token {token!r} not in alphabet")
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    cfg = machine.initial_configuration(word)
    history = [cfg] if trace else None
    steps = 0
    while True:
        try:
            nxt = step(machine, cfg)
        except InvalidTransitionEffectError as exc:
            return RunOutcome(Verdict.REJECT_HALT, steps, cfg, history, diagnostic=str(exc))
        if nxt is None:
            verdict = Verdict.ACCEPT if cfg.state in machine.accepting else Verdict.REJECT_HALT
            return RunOutcome(verdict, steps, cfg, history)
        if steps == fuel:
            return RunOutcome(Verdict.FUEL_EXHAUSTED, steps, cfg, history)
        cfg = nxt
        steps += 1
        if trace:
            history.append(cfg)


def accepts(machine: CounterAutomaton, word: Iterable[Token], fuel: int = 10_000) -> bool:
    return run(machine, word, fuel).accepted


def all_words(alphabet: Iterable[str], max_len: int):
    """Yield every word up to max_len, shortest first, lexicographic within a length."""
    letters = sorted(alphabet)
    for n in range(max_len + 1):
        for combo in product(letters, repeat=n):
            yield combo


def reachable_states(machine: CounterAutomaton) -> set:
    """States reachable when counter statuses are treated as unconstrained."""
    seen = {machine.initial}
    frontier = [machine.initial]
    by_state: dict[State, list[Transition]] = {}
    for t in machine.transitions:
        by_state.setdefault(t.state, []).append(t)
    while frontier:
        st = frontier.pop()
        for t in by_state.get(st, ()):
            if t.target not in seen:
                seen.add(t.target)
                frontier.append(t.target)
    return seen


def restrict_to_reachable(machine: CounterAutomaton) -> CounterAutomaton:
    live = reachable_states(machine)
    return CounterAutomaton(
        states=frozenset(live),
        alphabet=machine.alphabet,
        k=machine.k,
        transitions=tuple(t for t in machine.transitions if t.state in live),
        initial=machine.initial,
        accepting=frozenset(s for s in machine.accepting if s in live),
        max_delta=machine.max_delta,
        name=machine.name,
    )


def rename_states(machine: CounterAutomaton, prefix: str = "s") -> CounterAutomaton:
    """Deterministically rename states to short strings (breadth-first from the
    initial state, leftovers in repr order); used before serialization since
    constructed machines carry tuple-shaped states."""
    order = [machine.initial]
    seen = {machine.initial}
    by_state: dict[State, list[Transition]] = {}
    for t in machine.transitions:
        by_state.setdefault(t.state, []).append(t)
    i = 0
    while i < len(order):
        outgoing = sorted(by_state.get(order[i], ()), key=lambda t: (t.token, t.statuses))
        for t in outgoing:
            if t.target not in seen:
                seen.add(t.target)
                order.append(t.target)
        i += 1
    for st in sorted(machine.states - seen, key=repr):
        order.append(st)
    names = {st: f"{prefix}{n}" for n, st in enumerate(order)}
    return CounterAutomaton(
        states=frozenset(names.values()),
        alphabet=machine.alphabet,
        k=machine.k,
        transitions=tuple(
            Transition(names[t.state], t.token, t.statuses, names[t.target], t.move, t.deltas)
            for t in machine.transitions
        ),
        initial=names[machine.initial],
        accepting=frozenset(names[s] for s in machine.accepting),
        max_delta=machine.max_delta,
        name=machine.name,
    )
