"""Built-in example problem instances used by tests, the CLI and the service."""

from __future__ import annotations

from .circuit import circuit_dpi
from .dpi import Dpi, parse_dpi

EXK_TEXT = """\
[K]
1: !H | !G
2: X | F -> H
3: E -> !M & X
4: A -> !F
5: K -> E
6: C -> B
7: M -> C & Z
[B]
H -> A
!B | K
[P]
p1: !X -> !Z
[N]
n1: M -> A
n2: E -> !G
n3: F -> L
[R]
consistency
"""

CIRCUIT_NETLIST_TEXT = """\
# five-gate adder: two xor, two and, one or
gate X1 xor a b -> s1
gate X2 xor s1 cin -> sum
gate A1 and a b -> c1
gate A2 and cin s1 -> c2
gate O1 or c2 c1 -> carry
obs a=1
obs b=0
obs cin=1
obs sum=1
obs carry=0
"""


def exk_dpi() -> Dpi:
    """The running knowledge-base example: 7 suspect sentences, 2 background
    sentences, one positive and three negative test cases."""
    return parse_dpi(EXK_TEXT)


def named_fixture(name: str) -> Dpi:
    if name == "exk":
        return exk_dpi()
    if name == "circuit":
        return circuit_dpi()[0]
    raise KeyError("unknown fixture %r (available: exk, circuit)" % name)


FIXTURE_NAMES = ("exk", "circuit")
