"""Line-oriented text formats for automata and multiplying counter machines.

Both grammars are flat and diff-friendly: a version line, header lines, then
one record per line.  `#` starts a comment anywhere; `<` and `>` stand for
the endmarkers in transition lines and are banned from alphabets.
"""

from __future__ import annotations

from fractions import Fraction

from .core import (
    CounterAutomaton,
    LEFT_END,
    RIGHT_END,
    Transition,
    validate,
)
from .mcm import McmError, MultCounterMachine, make_mcm


class FormatError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_automaton(text: str) -> CounterAutomaton:
    header: dict[str, list[str]] = {}
    transitions = []
    k = None
    for no, line in _content_lines(text):
        fields = line.split()
        tag = fields[0]
        if tag == "t":
            if k is None:
                raise FormatError(no, "transition before the counters header")
            if len(fields) != 8 or fields[4] != "->":
                raise FormatError(no, "expected: t <state> <token> <status> -> <state> <move> <deltas>")
            _, state, token, status, _arrow, target, move, deltas = fields
            statuses = () if status == "-" else tuple(status)
            if len(statuses) != k or any(s not in "ZP" for s in statuses):
                raise FormatError(no, f"status {status!r} is not a Z/P string of length {k}")
            if move not in ("0", "1"):
                raise FormatError(no, f"move {move!r} not in {{0, 1}}")
            if deltas == "-":
                ds: tuple[int, ...] = ()
            else:
                try:
                    ds = tuple(int(d) for d in deltas.split(","))
                except ValueError:
                    raise FormatError(no, f"bad delta list {deltas!r}")
            if len(ds) != k:
                raise FormatError(no, f"expected {k} deltas, got {len(ds)}")
            transitions.append(Transition(state, token, statuses, target, int(move), ds))
        else:
            header.setdefault(tag, []).append(line)
            if tag == "counters":
                try:
                    k = int(fields[1])
                except (IndexError, ValueError):
                    raise FormatError(no, "counters line needs an integer")

    def one(tag: str, required: bool = True) -> list[str]:
        lines = header.get(tag, [])
        if required and not lines:
            raise FormatError(0, f"missing {tag!r} line")
        if len(lines) > 1:
            raise FormatError(0, f"repeated {tag!r} line")
        return lines

    version = one("revca-format")[0].split()
    if version[1:] != ["1"]:
        raise FormatError(0, f"unsupported format version {version[1:]}")
    if k is None:
        raise FormatError(0, "missing 'counters' line")
    max_delta = 1
    md = one("maxdelta", required=False)
    if md:
        max_delta = int(md[0].split()[1])
    alphabet = one("alphabet")[0].split()[1:]
    for token in alphabet:
        if token in (LEFT_END, RIGHT_END):
            raise FormatError(0, f"endmarker {token!r} cannot be an alphabet token")
    states = one("states")[0].split()[1:]
    initial = one("initial")[0].split()
    if len(initial) != 2:
        raise FormatError(0, "initial line needs exactly one state")
    accepting = one("accepting")[0].split()[1:]
    machine = CounterAutomaton(
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        k=k,
        transitions=tuple(transitions),
        initial=initial[1],
        accepting=frozenset(accepting),
        max_delta=max_delta,
    )
    defects = validate(machine)
    if defects:
        raise FormatError(0, "invalid machine: " + "; ".join(defects))
    return machine


def _token_order(token: str) -> tuple[int, str]:
    return ({LEFT_END: 0, RIGHT_END: 2}.get(token, 1), token)


def serialize_automaton(machine: CounterAutomaton) -> str:
    """Canonical text: states sorted, transitions sorted by key."""
    for st in machine.states:
        if not isinstance(st, str):
            raise TypeError(f"state {st!r} is not a string; rename_states first")
    lines = [
        "revca-format 1",
        f"counters {machine.k}",
    ]
    if machine.max_delta != 1:
        lines.append(f"maxdelta {machine.max_delta}")
    lines.append("alphabet " + " ".join(sorted(machine.alphabet)))
    lines.append("states " + " ".join(sorted(machine.states)))
    lines.append(f"initial {machine.initial}")
    lines.append("accepting " + " ".join(sorted(machine.accepting)))
    for t in sorted(machine.transitions, key=lambda t: (t.state, _token_order(t.token), t.statuses)):
        status = "".join(t.statuses) or "-"
        deltas = ",".join(str(d) for d in t.deltas) or "-"
        lines.append(f"t {t.state} {t.token} {status} -> {t.target} {t.move} {deltas}")
    return "\n".join(lines) + "\n"


def parse_mcm(text: str) -> MultCounterMachine:
    header: dict[str, list[str]] = {}
    rules = []
    for no, line in _content_lines(text):
        fields = line.split()
        if fields[0] == "r":
            if len(fields) != 5:
                raise FormatError(no, "expected: r <state> <mult> <p> <r>")
            _, q, mult, p, rr = fields
            try:
                m = Fraction(mult)
            except ValueError:
                raise FormatError(no, f"bad multiplicand {mult!r}")
            rules.append((q, m, p, rr))
        else:
            header.setdefault(fields[0], []).append(line)

    def one(tag: str) -> str:
        lines = header.get(tag, [])
        if len(lines) != 1:
            raise FormatError(0, f"need exactly one {tag!r} line")
        return lines[0]

    if one("mcm-format").split()[1:] != ["1"]:
        raise FormatError(0, "unsupported mcm format version")
    states = one("states").split()[1:]
    initial = one("initial").split()[1]
    final = one("final").split()[1]
    try:
        return make_mcm(rules, initial=initial, final=final, states=states)
    except McmError as exc:
        raise FormatError(0, str(exc))


def serialize_mcm(machine: MultCounterMachine) -> str:
    lines = [
        "mcm-format 1",
        "states " + " ".join(sorted(machine.states)),
        f"initial {machine.initial}",
        f"final {machine.final}",
    ]
    for r in sorted(machine.rules):
        lines.append(f"r {r.state} {r.mult} {r.on_integer} {r.on_fraction}")
    return "\n".join(lines) + "\n"
