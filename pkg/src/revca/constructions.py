"""Automaton-to-automaton constructions that preserve reversibility.

Three transformations live here:

* ``normalize_extended`` turns a machine whose steps may change a counter by
  any amount up to ``c`` into an ordinary one, splitting each counter value x
  into the stored value x // c plus a residue x % c kept in the state.
* ``speedup`` removes stationary moves from a quasi-real-time machine by
  collapsing each maximal run of stationary steps plus the following moving
  step into a single macro-step, then normalizing the oversized deltas away.
* ``product_intersection`` runs two machines in lockstep on a shared state
  pair and concatenated counters, accepting exactly the intersection.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Optional

from .core import (
    CounterAutomaton,
    MachineError,
    POSITIVE,
    Transition,
    ZERO,
    restrict_to_reachable,
    status_of,
    validate,
)
from .reversibility import ReverseStep, ReverseTable


class NotQuasiRealtimeError(MachineError):
    pass


class AlphabetMismatchError(MachineError):
    pass


class MoveDisagreementError(MachineError):
    def __init__(self, first: Transition, second: Transition):
        super().__init__(
            f"lockstep product needs agreeing head moves: {first.key} moves "
            f"{first.move}, {second.key} moves {second.move}"
        )
        self.first = first
        self.second = second


def _residue_vectors(c: int, k: int):
    return iproduct(range(c), repeat=k)


def _status_vectors(k: int):
    return iproduct((ZERO, POSITIVE), repeat=k)


def _lift_status(residue: int, status: str) -> str:
    # original counter is zero exactly when both the residue and the stored
    # quotient are zero
    return ZERO if (residue == 0 and status == ZERO) else POSITIVE


def _mod_case(m: int, b: int, c: int) -> tuple[int, int]:
    """Residue update and carry for one counter: new residue in [0, c) plus a
    stored-value delta in {-1, 0, 1}."""
    s = m + b
    if 0 <= s <= c - 1:
        return s, 0
    if s < 0:
        return s + c, -1
    return s - c, 1


def normalize_extended(
    machine: CounterAutomaton,
    reverse: Optional[ReverseTable] = None,
):
    """Simulate an extended machine step for step with ordinary unit deltas.

    States become (state, residues); a counter value x of the source is
    represented as stored value x // c with residue x % c in the state.
    Accepting states keep every residue combination.  Combinations whose carry
    would decrement a zero-status counter are dropped: they correspond to
    source steps that would drive the value negative, which the model forbids.

    With a reverse table for the source supplied, the mirrored construction is
    applied to it and (machine, table) is returned; otherwise just the machine.
    """
    defects = validate(machine)
    if defects:
        raise MachineError("normalize_extended needs a clean machine: " + "; ".join(defects))
    c = machine.max_delta
    k = machine.k
    transitions = []
    for residues in _residue_vectors(c, k):
        for statuses in _status_vectors(k):
            lifted = tuple(_lift_status(m, d) for m, d in zip(residues, statuses))
            for t in machine.transitions:
                if t.statuses != lifted:
                    continue
                new_res = []
                carries = []
                ok = True
                for i in range(k):
                    m2, b = _mod_case(residues[i], t.deltas[i], c)
                    if statuses[i] == ZERO and b < 0:
                        ok = False  # source value would go negative here
                        break
                    new_res.append(m2)
                    carries.append(b)
                if not ok:
                    continue
                transitions.append(
                    Transition(
                        (t.state, residues),
                        t.token,
                        statuses,
                        (t.target, tuple(new_res)),
                        t.move,
                        tuple(carries),
                    )
                )
    states = frozenset((q, tuple(r)) for q in machine.states for r in _residue_vectors(c, k))
    accepting = frozenset(
        (q, tuple(r)) for q in machine.accepting for r in _residue_vectors(c, k)
    )
    out = CounterAutomaton(
        states=states,
        alphabet=machine.alphabet,
        k=k,
        transitions=tuple(transitions),
        initial=(machine.initial, (0,) * k),
        accepting=accepting,
        max_delta=1,
        name=f"norm({machine.name})" if machine.name else "",
    )
    if reverse is None:
        return out
    return out, _normalize_reverse(machine, reverse, c, k)


def _normalize_reverse(machine, reverse: ReverseTable, c: int, k: int) -> ReverseTable:
    entries: dict[tuple, ReverseStep] = {}
    for residues in _residue_vectors(c, k):
        for statuses in _status_vectors(k):
            lifted = tuple(_lift_status(m, d) for m, d in zip(residues, statuses))
            for (state, token, post), out in reverse.entries.items():
                if post != lifted:
                    continue
                new_res = []
                carries = []
                ok = True
                for i in range(k):
                    m2, b = _mod_case(residues[i], out.deltas[i], c)
                    if statuses[i] == ZERO and b < 0:
                        ok = False
                        break
                    new_res.append(m2)
                    carries.append(b)
                if not ok:
                    continue
                entries[((state, residues), token, statuses)] = ReverseStep(
                    (out.target, tuple(new_res)), out.move, tuple(carries)
                )
    return ReverseTable(entries)


def remove_initial_left_loops(machine: CounterAutomaton) -> CounterAutomaton:
    """Drop stationary left-endmarker transitions that land in the initial
    configuration.  Any run through one loops forever without accepting, so
    the language is unchanged."""
    zeros = (ZERO,) * machine.k
    keep = tuple(
        t
        for t in machine.transitions
        if not (
            t.token == "<"
            and t.move == 0
            and t.statuses == zeros
            and t.target == machine.initial
            and all(d == 0 for d in t.deltas)
        )
    )
    if len(keep) == len(machine.transitions):
        return machine
    return CounterAutomaton(
        states=machine.states,
        alphabet=machine.alphabet,
        k=machine.k,
        transitions=keep,
        initial=machine.initial,
        accepting=machine.accepting,
        max_delta=machine.max_delta,
        name=machine.name,
    )


def speedup(machine: CounterAutomaton, ell: int) -> CounterAutomaton:
    """Build an equivalent machine whose accepted runs take at most |w| + 2 steps.

    The input must never do more than ``ell`` consecutive stationary moves in
    an accepting computation.  Stage one normalizes with c = ell + 1, whose
    residue components give every state exact knowledge of counter values
    below c; stage two replays, from every (state, token, statuses) seed, the
    maximal stationary run plus one moving step and emits it as a single
    extended transition (a halting run stays stationary and is emitted with
    the deltas gathered so far).  Normalizing the macro machine again yields
    the ordinary result.

    Seeds use counter stand-ins (1 for a positive status): within ell + 1
    steps a stored value can only reach zero if it started at exactly one, and
    the residue tracking makes the replayed path identical for every counter
    vector matching the seed statuses.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    defects = validate(machine)
    if defects:
        raise MachineError("speedup needs a clean machine: " + "; ".join(defects))
    if ell == 0:
        return machine
    c = ell + 1
    base = CounterAutomaton(
        states=machine.states,
        alphabet=machine.alphabet,
        k=machine.k,
        transitions=machine.transitions,
        initial=machine.initial,
        accepting=machine.accepting,
        max_delta=c,  # deltas stay within 1; room for the macro-step deltas
        name=machine.name,
    )
    norm = restrict_to_reachable(normalize_extended(base))
    norm = remove_initial_left_loops(norm)

    macro_transitions = []
    tokens = sorted(machine.alphabet) + ["<", ">"]
    k = machine.k
    for state in norm.states:
        for token in tokens:
            for statuses in _status_vectors(k):
                macro = _macro_step(norm, state, token, statuses, ell)
                if macro is not None:
                    target, move, deltas = macro
                    macro_transitions.append(
                        Transition(state, token, statuses, target, move, deltas)
                    )
    macro_machine = CounterAutomaton(
        states=norm.states,
        alphabet=machine.alphabet,
        k=k,
        transitions=tuple(macro_transitions),
        initial=norm.initial,
        accepting=norm.accepting,
        max_delta=c,
        name=f"macro({machine.name})" if machine.name else "",
    )
    macro_machine = restrict_to_reachable(macro_machine)
    out = restrict_to_reachable(normalize_extended(macro_machine))
    return CounterAutomaton(
        states=out.states,
        alphabet=out.alphabet,
        k=out.k,
        transitions=out.transitions,
        initial=out.initial,
        accepting=out.accepting,
        max_delta=1,
        name=f"rt({machine.name})" if machine.name else "",
    )


def _macro_step(norm, state, token, statuses, ell):
    """Replay one macro-step of the normalized machine from a seed.

    Returns (target, move, total deltas) or None when the seed has no
    transition at all.  Raises when the stationary run exceeds ell, which
    contradicts the quasi-real-time premise.
    """
    counters = tuple(1 if s == POSITIVE else 0 for s in statuses)
    current = state
    total = [0] * len(counters)
    stationary = 0
    while True:
        t = norm.table.get((current, token, status_of(counters)))
        if t is None:
            if stationary == 0:
                return None
            return current, 0, tuple(total)
        counters = tuple(v + d for v, d in zip(counters, t.deltas))
        for i, d in enumerate(t.deltas):
            total[i] += d
        current = t.target
        if t.move == 1:
            return current, 1, tuple(total)
        stationary += 1
        if stationary > ell:
            raise NotQuasiRealtimeError(
                f"more than {ell} consecutive stationary moves from seed "
                f"({state!r}, {token!r}, {''.join(statuses)})"
            )


def product_intersection(m1: CounterAutomaton, m2: CounterAutomaton) -> CounterAutomaton:
    """Cartesian-product machine accepting L(m1) ∩ L(m2).

    Both factors must share an alphabet and move their heads identically on
    every jointly defined key; keys where exactly one factor has a transition
    simply halt the product.  Only state pairs reachable from the initial pair
    are materialized.  Meaningful when accepting runs of both factors read
    their whole input, which holds for every machine built by this package.
    """
    if m1.alphabet != m2.alphabet:
        raise AlphabetMismatchError(
            f"alphabets differ: {sorted(m1.alphabet)} vs {sorted(m2.alphabet)}"
        )
    tokens = sorted(m1.alphabet) + ["<", ">"]
    initial = (m1.initial, m2.initial)
    seen = {initial}
    frontier = [initial]
    transitions = []
    while frontier:
        pair = frontier.pop()
        s1, s2 = pair
        for token in tokens:
            for d1 in _status_vectors(m1.k):
                t1 = m1.table.get((s1, token, d1))
                if t1 is None:
                    continue
                for d2 in _status_vectors(m2.k):
                    t2 = m2.table.get((s2, token, d2))
                    if t2 is None:
                        continue
                    if t1.move != t2.move:
                        raise MoveDisagreementError(t1, t2)
                    target = (t1.target, t2.target)
                    transitions.append(
                        Transition(
                            pair,
                            token,
                            d1 + d2,
                            target,
                            t1.move,
                            t1.deltas + t2.deltas,
                        )
                    )
                    if target not in seen:
                        seen.add(target)
                        frontier.append(target)
    accepting = frozenset(
        p for p in seen if p[0] in m1.accepting and p[1] in m2.accepting
    )
    return CounterAutomaton(
        states=frozenset(seen),
        alphabet=m1.alphabet,
        k=m1.k + m2.k,
        transitions=tuple(transitions),
        initial=initial,
        accepting=accepting,
        max_delta=max(m1.max_delta, m2.max_delta),
        name=f"({m1.name}&{m2.name})" if m1.name or m2.name else "",
    )
