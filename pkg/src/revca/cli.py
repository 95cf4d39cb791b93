"""Command-line interface.

Exit codes: 0 for success (and for ACCEPT verdicts), 1 for REJECT verdicts
and failed checks, 2 for usage, parse, or validation problems.  Results go to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import constructions, formats, mcm, reversibility, valc, witnesses
from .core import CounterAutomaton, MachineError, rename_states, run


def _load_automaton(path: str) -> CounterAutomaton:
    with open(path, encoding="utf-8") as fh:
        return formats.parse_automaton(fh.read())


def _load_mcm(path: str) -> mcm.MultCounterMachine:
    with open(path, encoding="utf-8") as fh:
        return formats.parse_mcm(fh.read())


def _write_automaton(machine: CounterAutomaton, path: str) -> None:
    if any(not isinstance(s, str) for s in machine.states):
        machine = rename_states(machine)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(formats.serialize_automaton(machine))


def _split_word(machine: CounterAutomaton, text: str) -> list[str]:
    """Tokens are whitespace separated; a bare string whose characters are all
    single-character alphabet tokens may be written without spaces."""
    if text == "":
        return []
    parts = text.split()
    if len(parts) > 1 or parts[0] in machine.alphabet:
        return parts
    word = parts[0]
    if all(ch in machine.alphabet for ch in word):
        return list(word)
    return parts


def _fmt_config(cfg) -> str:
    counters = ",".join(str(c) for c in cfg.counters) or "-"
    return f"({cfg.state} head={cfg.head} counters={counters})"


def cmd_run(args) -> int:
    machine = _load_automaton(args.file)
    word = _split_word(machine, args.input)
    outcome = run(machine, word, args.fuel, trace=args.trace or args.backward)
    if args.trace:
        for cfg in outcome.trace:
            print(_fmt_config(cfg))
    if args.backward:
        verdict = reversibility.derive_reverse(machine)
        if not verdict.reversible:
            print("machine is not reversible; cannot replay backward", file=sys.stderr)
            return 2
        cfg = outcome.final
        back = [cfg]
        while True:
            prev = reversibility.step_back(machine, verdict.table, cfg)
            if prev is None:
                break
            back.append(prev)
            cfg = prev
        print("backward replay:")
        for cfg in back:
            print(_fmt_config(cfg))
        if cfg != machine.initial_configuration(word):
            print("backward replay did not reach the initial configuration", file=sys.stderr)
            return 2
    print(f"{outcome.verdict.value} steps={outcome.steps}")
    if outcome.diagnostic:
        print(outcome.diagnostic, file=sys.stderr)
    return 0 if outcome.accepted else 1


def cmd_check(args) -> int:
    machine = _load_automaton(args.file)
    verdict = reversibility.derive_reverse(machine)
    if not verdict.reversible:
        print(f"IRREVERSIBLE ({len(verdict.conflicts)} conflicts)")
        for c in verdict.conflicts:
            print(f"  {c.kind} clash at {c.key}: {c.first.key} vs {c.second.key}")
        return 1
    entries = verdict.table.entries
    print(f"REVERSIBLE ({len(entries)} backward entries)")
    for (state, token, statuses), out in sorted(entries.items(), key=repr):
        status = "".join(statuses) or "-"
        deltas = ",".join(str(d) for d in out.deltas) or "-"
        print(f"  {state} {token} {status} <- {out.target} {out.move} {deltas}")
    if args.mode == "roundtrip":
        bad = reversibility.verify_roundtrip(machine, verdict.table, args.max_len)
        if bad is not None:
            print(f"roundtrip failed on {' '.join(bad.word) or 'the empty word'}")
            return 1
        print(f"roundtrip OK up to length {args.max_len}")
    return 0


def cmd_normalize(args) -> int:
    machine = _load_automaton(args.file)
    _write_automaton(constructions.normalize_extended(machine), args.output)
    return 0


def cmd_speedup(args) -> int:
    machine = _load_automaton(args.file)
    _write_automaton(constructions.speedup(machine, args.ell), args.output)
    return 0


def cmd_product(args) -> int:
    left = _load_automaton(args.first)
    right = _load_automaton(args.second)
    _write_automaton(constructions.product_intersection(left, right), args.output)
    return 0


def cmd_example(args) -> int:
    name = args.name
    if name == "eq-ab":
        machine = witnesses.build_eq_ab()
    elif name == "regular-witness":
        machine = witnesses.build_regular_witness()
    elif name.startswith("balanced-k:"):
        machine = witnesses.build_balanced(int(name.split(":", 1)[1]))
    else:
        print(f"unknown example {name!r}", file=sys.stderr)
        return 2
    text = formats.serialize_automaton(rename_states(machine) if any(
        not isinstance(s, str) for s in machine.states) else machine)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_lk_decide(args) -> int:
    result = witnesses.decide_Lk(args.k, args.word)
    print("true" if result else "false")
    return 0 if result else 1


def cmd_lk_gen(args) -> int:
    print(witnesses.gen_Lk_member(args.k, args.j, args.i, args.seed))
    return 0


def cmd_mcm_run(args) -> int:
    machine = _load_mcm(args.file)
    outcome = mcm.mcm_run(machine, args.i, args.fuel)
    for cfg in outcome.trace:
        print(f"{cfg.state} a^{cfg.n}")
    print(outcome.status.value)
    return 0 if outcome.status is mcm.McmStatus.HALTED_FINAL else 1


def cmd_valc_encode(args) -> int:
    machine = _load_mcm(args.file)
    print(valc.valc_encode(machine, args.i, args.fuel))
    return 0


def cmd_valc_build(args) -> int:
    machine = _load_mcm(args.file)
    if args.part == "1":
        built = valc.build_valc1(machine)
    elif args.part == "2":
        built = valc.build_valc2(machine)
    else:
        built = valc.build_valc(machine)
    _write_automaton(built, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revca",
        description="reversible counter automata: simulate, invert, construct",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a machine on an input word")
    p.add_argument("file")
    p.add_argument("input")
    p.add_argument("--backward", action="store_true", help="replay the run backward")
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="derive the reverse table, optionally verify it")
    p.add_argument("file")
    p.add_argument("--mode", choices=["syntactic", "roundtrip"], default="syntactic")
    p.add_argument("--max-len", type=int, default=6)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", help="reduce an extended machine to unit deltas")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("speedup", help="remove stationary moves (real-time output)")
    p.add_argument("file")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_speedup)

    p = sub.add_parser("product", help="lockstep intersection of two machines")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("example", help="emit a built-in machine")
    p.add_argument("name", help="eq-ab | balanced-k:K | regular-witness")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_example)

    lk = sub.add_parser("lk", help="scattered-factor languages").add_subparsers(
        dest="lk_command", required=True
    )
    p = lk.add_parser("decide", help="membership test")
    p.add_argument("word")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_lk_decide)
    p = lk.add_parser("gen", help="generate a member")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lk_gen)

    mm = sub.add_parser("mcm", help="multiplying counter machines").add_subparsers(
        dest="mcm_command", required=True
    )
    p = mm.add_parser("run", help="trace a run from register 2**i")
    p.add_argument("file")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--fuel", type=int, default=1_000)
    p.set_defaults(func=cmd_mcm_run)

    vv = sub.add_parser("valc", help="computation-history languages").add_subparsers(
        dest="valc_command", required=True
    )
    p = vv.add_parser("encode", help="encode the accepting run from 2**i")
    p.add_argument("file")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--fuel", type=int, default=1_000)
    p.set_defaults(func=cmd_valc_encode)
    p = vv.add_parser("build", help="build history acceptors")
    p.add_argument("file")
    p.add_argument("--part", choices=["1", "2", "both"], default="both")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_valc_build)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (formats.FormatError, MachineError, mcm.McmError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
