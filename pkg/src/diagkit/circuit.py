"""Classical model-based diagnosis problems and their reduction to DPIs.

A system description splits into per-component behavior sentences (the
suspects) and general domain knowledge plus observations (trusted).  The
reduction makes the behavior sentences the KB, observations and domain
knowledge the background, and measurements positive test cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .dpi import Dpi, TestCase
from .logic import And, Formula, Iff, Not, Or, Var, parse


@dataclass(frozen=True)
class MbdDpi:
    """A diagnosis problem over physical components.

    comps: component names in a fixed order (determines sentence ids).
    beh: behavior formula per component (normal operation).
    sd_gen: general system knowledge (e.g. wire connections).
    obs: observations.
    meas: measurements taken so far.
    """
    comps: tuple
    beh: dict
    sd_gen: frozenset
    obs: frozenset
    meas: tuple

    def __post_init__(self):
        if not self.comps:
            raise ValueError("component list must be non-empty")
        missing = [c for c in self.comps if c not in self.beh]
        if missing:
            raise ValueError("components without behavior formula: %s" % missing)


def reduce(mbd: MbdDpi) -> tuple[Dpi, dict]:
    """Reduce to a DPI.  Returns the DPI and the sentence-id -> component map."""
    kb = [(i + 1, mbd.beh[c]) for i, c in enumerate(mbd.comps)]
    id_to_comp = {i + 1: c for i, c in enumerate(mbd.comps)}
    dpi = Dpi(kb, background=set(mbd.obs) | set(mbd.sd_gen),
              positive_tests=list(mbd.meas), negative_tests=[],
              requirements=("consistency",))
    return dpi, id_to_comp


# ---------------------------------------------------------------------------
# gate library and netlist format
# ---------------------------------------------------------------------------

def gate_formula(gtype: str, inputs: list[Formula], output: Formula) -> Formula:
    if gtype == "and":
        return Iff(output, inputs[0] if len(inputs) == 1 else And(tuple(inputs)))
    if gtype == "or":
        return Iff(output, inputs[0] if len(inputs) == 1 else Or(tuple(inputs)))
    if gtype == "xor":
        if len(inputs) != 2:
            raise ValueError("xor gate needs exactly 2 inputs")
        return Iff(output, Iff(inputs[0], Not(inputs[1])))
    if gtype == "not":
        if len(inputs) != 1:
            raise ValueError("not gate needs exactly 1 input")
        return Iff(output, Not(inputs[0]))
    raise ValueError("unknown gate type %r" % gtype)


def parse_netlist(text: str) -> MbdDpi:
    """Parse a gate-level netlist.

    Lines: `gate <name> <type> <in...> -> <out>` and `obs <wire>=<0|1>`.
    Gates sharing a wire name are connected directly.
    """
    comps: list[str] = []
    beh: dict = {}
    obs: set[Formula] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "gate":
            if len(parts) < 6 or parts[-2] != "->":
                raise ValueError("line %d: expected `gate <name> <type> <in...> -> <out>`"
                                 % lineno)
            name, gtype = parts[1], parts[2]
            ins = [Var(w) for w in parts[3:-2]]
            out = Var(parts[-1])
            if name in beh:
                raise ValueError("line %d: duplicate gate %r" % (lineno, name))
            comps.append(name)
            beh[name] = gate_formula(gtype, ins, out)
        elif parts[0] == "obs":
            wire, _, value = parts[1].partition("=")
            if value not in ("0", "1"):
                raise ValueError("line %d: observation must be <wire>=<0|1>" % lineno)
            v = Var(wire)
            obs.add(v if value == "1" else Not(v))
        else:
            raise ValueError("line %d: unknown directive %r" % (lineno, parts[0]))
    if not comps:
        raise ValueError("netlist contains no gates")
    return MbdDpi(tuple(comps), beh, frozenset(), frozenset(obs), ())


# ---------------------------------------------------------------------------
# the two-adder circuit fixture
# ---------------------------------------------------------------------------

def circuit_fixture() -> MbdDpi:
    """The five-gate adder circuit: two xor, two and, one or gate.

    Each gate port gets its own variable; wire connections are stated as
    biconditionals in the general system description.  Observed are the three
    primary inputs and the two outputs.
    """
    def wires(name: str) -> tuple[Formula, Formula, Formula]:
        return Var("in1" + name), Var("in2" + name), Var("out" + name)

    beh = {}
    for name, gtype in (("X1", "xor"), ("X2", "xor"), ("A1", "and"),
                        ("A2", "and"), ("O1", "or")):
        i1, i2, out = wires(name)
        beh[name] = gate_formula(gtype, [i1, i2], out)

    connections = [
        ("outX1", "in2A2"),
        ("outX1", "in1X2"),
        ("outA2", "in1O1"),
        ("in1A2", "in2X2"),
        ("in1X1", "in1A1"),
        ("in2X1", "in2A1"),
        ("outA1", "in2O1"),
    ]
    sd_gen = frozenset(Iff(Var(a), Var(b)) for a, b in connections)
    obs = frozenset({Var("in1X1"), Not(Var("in2X1")), Var("in1A2"),
                     Var("outX2"), Not(Var("outO1"))})
    return MbdDpi(("X1", "X2", "A1", "A2", "O1"), beh, sd_gen, obs, ())


#: Fault rates by gate type used in the worked examples.
CIRCUIT_FAULT_RATES = {"and": 0.05, "or": 0.02, "xor": 0.01}

#: Measurement costs by gate type used in the worked examples.
CIRCUIT_COSTS = {"and": 1.0, "or": 3.0, "xor": 2.0}

_CIRCUIT_GATE_TYPES = {"X1": "xor", "X2": "xor", "A1": "and", "A2": "and",
                       "O1": "or"}


def circuit_dpi(with_rates: bool = True) -> tuple[Dpi, dict]:
    """The circuit fixture reduced to a DPI, with the example fault rates and
    per-gate measurement costs applied."""
    dpi, id_to_comp = reduce(circuit_fixture())
    if with_rates:
        probs = {sid: CIRCUIT_FAULT_RATES[_CIRCUIT_GATE_TYPES[c]]
                 for sid, c in id_to_comp.items()}
        costs = {sid: CIRCUIT_COSTS[_CIRCUIT_GATE_TYPES[c]]
                 for sid, c in id_to_comp.items()}
        dpi = Dpi(dpi.kb, dpi.background, dpi.positive_tests, dpi.negative_tests,
                  dpi.requirements, probs, costs)
    return dpi, id_to_comp
