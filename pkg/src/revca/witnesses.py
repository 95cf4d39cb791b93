"""Concrete languages and machines: letter-balance checkers, a regular
recognizer that defeats reversible counting, and the scattered-factor
languages L_k with their value homomorphisms.

The deciders here are deliberately independent of the automaton simulator so
they can serve as oracles for the built machines.
"""

from __future__ import annotations

import random
import re
from functools import reduce

from .core import CounterAutomaton, MachineError, make_automaton
from .constructions import product_intersection

BARRED = {"A": "a", "B": "b"}
LETTER_BITS = {"a": "0", "b": "1", "A": "0", "B": "1"}


class UnknownLetterError(MachineError):
    pass


def phi(word: str) -> str:
    """Letterwise {a, b and barred variants} -> {0, 1} homomorphism."""
    try:
        return "".join(LETTER_BITS[ch] for ch in word)
    except KeyError as exc:
        raise UnknownLetterError(f"letter {exc.args[0]!r} outside a/b/A/B") from exc


def eta(bits: str) -> int:
    """Value of a bit string read most-significant-bit first; empty is 0."""
    return int(bits, 2) if bits else 0


def scattered_factor(bits: str, k: int, i: int) -> str:
    """Every k-th bit starting at 1-indexed position i; length must divide by k."""
    if len(bits) % k:
        raise ValueError(f"length {len(bits)} not divisible by {k}")
    if not 1 <= i <= k:
        raise ValueError(f"i={i} outside [1, {k}]")
    return bits[i - 1 :: k]


def decide_Lk(k: int, word: str) -> bool:
    """Membership in L_k: words u z1 $^i z2 v where the i-th scattered factor
    of the prefix value equals the reversed suffix value, both at least 1.

    u and v are unbarred, z1/z2 are the barred letters A/B, |u z1| is a
    positive multiple of k, and 1 <= i <= k.  Malformed shapes are simply
    non-members.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    first = word.find("$")
    if first < 0:
        return False
    last = first
    while last + 1 < len(word) and word[last + 1] == "$":
        last += 1
    if "$" in word[last + 1 :]:
        return False  # a second run of separators
    i = last - first + 1
    if not 1 <= i <= k:
        return False
    prefix, suffix = word[:first], word[last + 1 :]
    if not prefix or not suffix:
        return False
    u, z1 = prefix[:-1], prefix[-1]
    z2, v = suffix[0], suffix[1:]
    if z1 not in BARRED or z2 not in BARRED:
        return False
    if any(ch not in "ab" for ch in u) or any(ch not in "ab" for ch in v):
        return False
    if len(prefix) % k or len(prefix) == 0:
        return False
    left = eta(scattered_factor(phi(prefix), k, i))
    right = eta(phi(suffix)[::-1])
    return left == right and left >= 1


def gen_Lk_member(k: int, j: int, i: int, seed: int = 0) -> str:
    """Draw a member of L_k with |u z1| = j*k, resampling until the selected
    scattered factor is nonzero, then append the matching suffix."""
    if k < 2 or j < 1 or not 1 <= i <= k:
        raise ValueError("need k >= 2, j >= 1, 1 <= i <= k")
    rng = random.Random(seed)
    while True:
        u = "".join(rng.choice("ab") for _ in range(j * k - 1))
        z1 = rng.choice("AB")
        value = eta(scattered_factor(phi(u + z1), k, i))
        if value >= 1:
            break
    bits = format(value, "b")
    reversed_bits = bits[::-1]
    z2 = "A" if reversed_bits[0] == "0" else "B"
    v = "".join("a" if b == "0" else "b" for b in reversed_bits[1:])
    word = u + z1 + "$" * i + z2 + v
    assert decide_Lk(k, word)
    return word


def brute_force_Lk(k: int, word: str) -> bool:
    """Split-enumeration oracle for L_k: try every way of reading the word as
    u z1 $^i z2 v and check the value equation directly."""
    n = len(word)
    for p1 in range(n):
        if word[p1] not in BARRED:
            continue
        if (p1 + 1) % k or p1 == 0:
            continue
        if any(ch not in "ab" for ch in word[:p1]):
            continue
        for p2 in range(p1 + 1, n):
            if word[p2] not in BARRED:
                continue
            i = p2 - p1 - 1
            if not 1 <= i <= k:
                continue
            if any(ch != "$" for ch in word[p1 + 1 : p2]):
                continue
            if any(ch not in "ab" for ch in word[p2 + 1 :]):
                continue
            left = eta(scattered_factor(phi(word[: p1 + 1]), k, i))
            right = eta(phi(word[p2:])[::-1])
            if left == right and left >= 1:
                return True
    return False


# ((aa + a)(bb + b))* (aa + a + lambda) as a plain table walk; the states are
# start/complete, one a, two a's, unit plus one b, unit plus two b's.
_WITNESS_DFA = {
    ("S", "a"): "A1",
    ("A1", "a"): "A2",
    ("A1", "b"): "B1",
    ("A2", "b"): "B1",
    ("B1", "b"): "B2",
    ("B1", "a"): "A1",
    ("B2", "a"): "A1",
}
_WITNESS_ACCEPTING = {"S", "A1", "A2", "B1", "B2"}

WITNESS_PATTERN = re.compile(r"^((aa|a)(bb|b))*(aa|a)?$")


def decide_regular_witness(word: str) -> bool:
    """Walk the fixed recognizer for alternating groups of one or two equal
    letters, starting with a's; words ending in three b's fall out."""
    state = "S"
    for ch in word:
        state = _WITNESS_DFA.get((state, ch))
        if state is None:
            return False
    return state in _WITNESS_ACCEPTING


def build_regular_witness() -> CounterAutomaton:
    """The same recognizer as a zero-counter automaton."""
    transitions = [("q0", "<", "", "S", 1, "")]
    for (src, ch), dst in _WITNESS_DFA.items():
        transitions.append((src, ch, "", dst, 1, ""))
    for st in sorted(_WITNESS_ACCEPTING):
        transitions.append((st, ">", "", f"acc_{st}", 0, ""))
    accepting = [f"acc_{st}" for st in sorted(_WITNESS_ACCEPTING)]
    return make_automaton(
        transitions,
        initial="q0",
        accepting=accepting,
        k=0,
        alphabet={"a", "b"},
        name="regular-witness",
    )


def build_eq_ab() -> CounterAutomaton:
    """One-counter machine for words with equally many a's and b's.

    A difference of one is held in the state (q_a: surplus a, q_b: surplus b)
    and only larger differences reach the counter, which is what makes the
    table invertible.
    """
    Z, P = "Z", "P"
    transitions = [
        ("q0", "<", Z, "q1", 1, (0,)),   # (1)
        ("q1", "a", Z, "qa", 1, (0,)),   # (2)
        ("q1", "b", Z, "qb", 1, (0,)),   # (3)
        ("q1", ">", Z, "qf", 0, (0,)),   # (4)
        ("qa", "a", Z, "qa", 1, (1,)),   # (5)
        ("qa", "b", Z, "q1", 1, (0,)),   # (6)
        ("qa", "a", P, "qa", 1, (1,)),   # (7)
        ("qa", "b", P, "qa", 1, (-1,)),  # (8)
        ("qb", "a", Z, "q1", 1, (0,)),   # (9)
        ("qb", "b", Z, "qb", 1, (1,)),   # (10)
        ("qb", "a", P, "qb", 1, (-1,)),  # (11)
        ("qb", "b", P, "qb", 1, (1,)),   # (12)
    ]
    return make_automaton(
        transitions,
        initial="q0",
        accepting=["qf"],
        k=1,
        alphabet={"a", "b"},
        name="eq-ab",
    )


LETTERS = "abcdefghij"


def build_balance_factor(alphabet: str, other: str) -> CounterAutomaton:
    """Example-1 scheme comparing counts of the first alphabet letter against
    ``other``; every remaining letter is read and ignored."""
    first = alphabet[0]
    ignored = [ch for ch in alphabet if ch not in (first, other)]
    Z, P = "Z", "P"
    transitions = [
        ("q0", "<", Z, "q1", 1, (0,)),
        ("q1", first, Z, "qa", 1, (0,)),
        ("q1", other, Z, "qb", 1, (0,)),
        ("q1", ">", Z, "qf", 0, (0,)),
        ("qa", first, Z, "qa", 1, (1,)),
        ("qa", other, Z, "q1", 1, (0,)),
        ("qa", first, P, "qa", 1, (1,)),
        ("qa", other, P, "qa", 1, (-1,)),
        ("qb", first, Z, "q1", 1, (0,)),
        ("qb", other, Z, "qb", 1, (1,)),
        ("qb", first, P, "qb", 1, (-1,)),
        ("qb", other, P, "qb", 1, (1,)),
    ]
    for state in ("q1", "qa", "qb"):
        for ch in ignored:
            for status in (Z, P):
                transitions.append((state, ch, status, state, 1, (0,)))
    return make_automaton(
        transitions,
        initial="q0",
        accepting=["qf"],
        k=1,
        alphabet=set(alphabet),
        name=f"eq-{first}{other}",
    )


def build_balanced(k: int) -> CounterAutomaton:
    """Machine over k letters accepting words where all letter counts agree,
    as the product of k - 1 pairwise balance checkers (first letter against
    each of the others)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    alphabet = LETTERS[:k]
    factors = [build_balance_factor(alphabet, alphabet[i]) for i in range(1, k)]
    machine = reduce(product_intersection, factors)
    return CounterAutomaton(
        states=machine.states,
        alphabet=machine.alphabet,
        k=machine.k,
        transitions=machine.transitions,
        initial=machine.initial,
        accepting=machine.accepting,
        max_delta=machine.max_delta,
        name=f"balanced-{k}",
    )
