"""
Two-counter automata and their encoding as a path query over the grid
built by a fixed fus ruleset. Used to demonstrate that RPQ entailment
beyond the sticky class cannot be decided by any of the engine's
procedures.
"""
import logging
from dataclasses import dataclass

from .exceptions import CounterOverflow, TcaError
from .model import Atom, Constant, Instance, Signature
from .rpq import DFA, Concat, Query, QueryKind, Symbol, dfa_to_regex, eval_rpq, product_graph

logger = logging.getLogger(__name__)

COUNTERS = ("X", "Y")
ZERO_TEST = {"X": "XZero", "Y": "YZero"}
INCREMENT = {"X": "IncX", "Y": "IncY"}
DECREMENT = {"X": "DecX", "Y": "DecY"}
GRID_PREDICATES = ("DecX", "DecY", "IncX", "IncY", "XZero", "YZero")

GRID_DATABASE = """\
Succ(a, b).
Zero(a).
"""

GRID_CORE_RULES = """\
Succ(X, X1) -> exists X2. Succ(X1, X2).
Succ(X, X1), Succ(Y, Y1) -> exists Z. GridPoint(X, Y, Z).
GridPoint(X, Y, Z) -> XCoord(Z, X).
GridPoint(X, Y, Z) -> YCoord(Z, Y).
"""

GRID_EDGE_RULES = """\
XCoord(Z, X), YCoord(Z, Y), XCoord(Z1, X1), YCoord(Z1, Y), Succ(X, X1) -> IncX(Z, Z1).
XCoord(Z, X), YCoord(Z, Y), XCoord(Z1, X), YCoord(Z1, Y1), Succ(Y, Y1) -> IncY(Z, Z1).
IncX(Z, Z1) -> DecX(Z1, Z).
IncY(Z, Z1) -> DecY(Z1, Z).
XCoord(Z, X), Zero(X) -> XZero(Z, Z).
YCoord(Z, Y), Zero(Y) -> YZero(Z, Z).
"""

# Same grid, with the coordinates carried along so that no join is lost.
STICKY_EDGE_RULES = """\
XCoord(Z, X), YCoord(Z, Y), XCoord(Z1, X1), YCoord(Z1, Y), Succ(X, X1) -> IncX(Z, Z1, X, X1, Y).
XCoord(Z, X), YCoord(Z, Y), XCoord(Z1, X), YCoord(Z1, Y1), Succ(Y, Y1) -> IncY(Z, Z1, X, Y, Y1).
IncX(Z, Z1, U, V, T) -> DecX(Z1, Z, U, V, T).
IncY(Z, Z1, U, V, T) -> DecY(Z1, Z, U, V, T).
XCoord(Z, X), Zero(X) -> XZero(Z, Z, X).
YCoord(Z, Y), Zero(Y) -> YZero(Z, Z, Y).
"""

PROJECTION_RULES = """\
IncX(Z, Z1, U, V, T) -> IncXBin(Z, Z1).
DecX(Z, Z1, U, V, T) -> DecXBin(Z, Z1).
IncY(Z, Z1, U, V, T) -> IncYBin(Z, Z1).
DecY(Z, Z1, U, V, T) -> DecYBin(Z, Z1).
XZero(Z, Z, X) -> XZeroBin(Z, Z).
YZero(Z, Z, Y) -> YZeroBin(Z, Z).
"""


@dataclass(frozen=True)
class Instruction:
    """if counter == 0: counter += 1, goto then_state; else: counter += delta, goto else_state"""
    counter: str
    delta: int
    then_state: str
    else_state: str


@dataclass(frozen=True)
class Configuration:
    state: str
    x: int = 0
    y: int = 0

    def value(self, counter):
        return self.x if counter == "X" else self.y

    def updated(self, state, counter, amount):
        if counter == "X":
            return Configuration(state, self.x + amount, self.y)
        return Configuration(state, self.x, self.y + amount)

    def __str__(self):
        return f"<{self.state}, {self.x}, {self.y}>"


class TCA:
    """Deterministic two-counter automaton"""

    def __init__(self, instructions, start, halt):
        self.instructions = dict(instructions)
        self.start = start
        self.halt = halt
        self._validate()

    def _validate(self):
        if self.halt in self.instructions:
            raise TcaError(f"halting state {self.halt} must not have an instruction")
        known = self.states
        if self.start not in known:
            raise TcaError(f"start state {self.start} has no instruction")
        for state, instruction in self.instructions.items():
            if instruction.counter not in COUNTERS:
                raise TcaError(f"state {state}: unknown counter {instruction.counter}")
            if instruction.delta not in (-1, 1):
                raise TcaError(f"state {state}: counter update must be +1 or -1")
            for target in (instruction.then_state, instruction.else_state):
                if target not in known:
                    raise TcaError(f"state {state}: jump to undefined state {target}")

    @property
    def states(self):
        return frozenset(self.instructions) | {self.halt}

    def initial(self):
        return Configuration(self.start, 0, 0)

    def __eq__(self, other):
        return isinstance(other, TCA) and (self.instructions, self.start, self.halt) == (
            other.instructions, other.start, other.halt
        )

    def __repr__(self):
        return f"TCA(start={self.start!r}, halt={self.halt!r}, states={len(self.states)})"


def tca_step(configuration, machine):
    if configuration.state == machine.halt:
        raise TcaError("the halting state has no successor")
    instruction = machine.instructions[configuration.state]
    if configuration.value(instruction.counter) == 0:
        return configuration.updated(instruction.then_state, instruction.counter, 1)
    return configuration.updated(instruction.else_state, instruction.counter, instruction.delta)


def run_tca(machine, max_steps):
    """Configurations visited from <start, 0, 0>, stopping at the halting state"""
    run = [machine.initial()]
    while len(run) <= max_steps and run[-1].state != machine.halt:
        run.append(tca_step(run[-1], machine))
    return run


def halts_within(machine, max_steps):
    return run_tca(machine, max_steps)[-1].state == machine.halt


# ==========================
# GRID
# ==========================

def grid_ruleset():
    from .textio import parse_database, parse_ruleset

    signature = Signature()
    rules = parse_ruleset(GRID_CORE_RULES + GRID_EDGE_RULES, signature)
    return parse_database(GRID_DATABASE, signature), rules


def sticky_grid_ruleset():
    from .textio import parse_database, parse_ruleset

    signature = Signature()
    rules = parse_ruleset(GRID_CORE_RULES + STICKY_EDGE_RULES, signature)
    return parse_database(GRID_DATABASE, signature), rules


def projection_rules():
    from .textio import parse_ruleset

    return parse_ruleset(PROJECTION_RULES)


def grid_term(x, y):
    return Constant(f"z_{x}_{y}")


def grid_instance(size):
    """The size x size window of the grid with the origin at z_0_0"""
    if size < 1:
        raise ValueError("grid size must be at least 1")
    atoms = []
    for x in range(size):
        for y in range(size):
            here = grid_term(x, y)
            if x + 1 < size:
                atoms += [Atom("IncX", (here, grid_term(x + 1, y))), Atom("DecX", (grid_term(x + 1, y), here))]
            if y + 1 < size:
                atoms += [Atom("IncY", (here, grid_term(x, y + 1))), Atom("DecY", (grid_term(x, y + 1), here))]
            if x == 0:
                atoms.append(Atom("XZero", (here, here)))
            if y == 0:
                atoms.append(Atom("YZero", (here, here)))
    return Instance(atoms)


# ==========================
# AUTOMATON AND QUERY
# ==========================

@dataclass(frozen=True)
class MachineAutomaton:
    """A_M with the names of its states kept for reporting"""
    dfa: DFA
    names: tuple

    def index(self, name):
        return self.names.index(name)


def automaton_for(machine):
    """
    Each instruction becomes two three-letter branches: the then-branch
    reads the zero test twice and then the increment; the else-branch
    reads a decrement, an increment and finally the update itself.
    """
    main = [machine.start] + sorted(machine.states - {machine.start})
    names = list(main)
    transitions = {}

    def add(source, label, target):
        transitions[(names.index(source), label)] = names.index(target)

    for state in sorted(machine.instructions):
        instruction = machine.instructions[state]
        counter = instruction.counter
        aux = [f"{state}^then1", f"{state}^then2", f"{state}^else1", f"{state}^else2"]
        names.extend(aux)
        update = INCREMENT[counter] if instruction.delta > 0 else DECREMENT[counter]
        add(state, ZERO_TEST[counter], aux[0])
        add(aux[0], ZERO_TEST[counter], aux[1])
        add(aux[1], INCREMENT[counter], instruction.then_state)
        add(state, DECREMENT[counter], aux[2])
        add(aux[2], INCREMENT[counter], aux[3])
        add(aux[3], update, instruction.else_state)

    sink = len(names)
    names.append("sink")
    delta = {
        (state, label): transitions.get((state, label), sink)
        for state in range(len(names))
        for label in GRID_PREDICATES
    }
    accepting = frozenset([names.index(machine.halt)])
    dfa = DFA(tuple(range(len(names))), GRID_PREDICATES, delta, 0, accepting, sink)
    return MachineAutomaton(dfa, tuple(names))


def machine_query(machine, higher_arity=False):
    body = dfa_to_regex(automaton_for(machine).dfa)
    regex = Concat((Symbol("XZero"), Symbol("YZero"), body))
    return Query(regex, QueryKind.HIGHER_ARITY if higher_arity else QueryKind.PLAIN)


def encode_tca(machine, sticky_hrpq=False):
    """
    Problem whose query is entailed iff the machine halts: the fixed grid
    database and ruleset with the query XZero / YZero / A_M. With
    `sticky_hrpq` the ruleset is the sticky variant and the query an HRPQ.
    """
    from .textio import ProblemBundle

    database, rules = sticky_grid_ruleset() if sticky_hrpq else grid_ruleset()
    query = machine_query(machine, sticky_hrpq)
    signature = Signature.from_atoms(database.atoms)
    signature = Signature.from_rules(rules, base=signature)
    return ProblemBundle(signature, database, tuple(rules), query)


# ==========================
# VERIFICATION
# ==========================

@dataclass(frozen=True)
class CorrespondenceRow:
    configuration: Configuration
    expected: Configuration
    observed: tuple

    @property
    def ok(self):
        return self.observed == (self.expected,)


@dataclass(frozen=True)
class CorrespondenceReport:
    rows: tuple
    halts: bool
    query_holds: bool
    grid_size: int
    steps: int

    @property
    def passed(self):
        return all(row.ok for row in self.rows) and self.halts == self.query_holds

    def as_dict(self):
        return {
            "passed": self.passed,
            "halts": self.halts,
            "query_holds": self.query_holds,
            "grid_size": self.grid_size,
            "steps": self.steps,
            "rows": [
                {
                    "configuration": str(row.configuration),
                    "expected": str(row.expected),
                    "observed": [str(found) for found in row.observed],
                    "ok": row.ok,
                }
                for row in self.rows
            ],
        }


def _coordinates(term):
    _, x, y = term.name.split("_")
    return int(x), int(y)


def three_step_successors(configuration, automaton, graph):
    """Configurations the automaton reaches in exactly three steps on the grid"""
    frontier = {(grid_term(configuration.x, configuration.y), automaton.index(configuration.state))}
    for _ in range(3):
        frontier = {successor for node in frontier if node in graph for successor in graph.successors(node)}
    found = set()
    for term, state in frontier:
        x, y = _coordinates(term)
        found.add(Configuration(automaton.names[state], x, y))
    return tuple(sorted(found, key=lambda item: (item.state, item.x, item.y)))


def verify_three_step_correspondence(machine, size, steps):
    """
    Run the machine for `steps` steps and check, for every visited
    configuration, that A_M moves between the matching grid points in
    exactly three steps; then compare halting with bounded query
    evaluation over paths of at most 3 * steps + 2 edges.
    """
    run = run_tca(machine, steps)
    limit = size - 2
    for configuration in run:
        if configuration.x > limit or configuration.y > limit:
            raise CounterOverflow(f"configuration {configuration} leaves a grid of size {size}")
    automaton = automaton_for(machine)
    grid = grid_instance(size)
    graph = product_graph(grid, automaton.dfa)
    rows = []
    for configuration in run:
        if configuration.state == machine.halt:
            continue
        expected = tca_step(configuration, machine)
        observed = three_step_successors(configuration, automaton, graph)
        rows.append(CorrespondenceRow(configuration, expected, observed))
    halts = run[-1].state == machine.halt
    query_holds = eval_rpq(machine_query(machine), grid, max_length=3 * steps + 2).holds
    report = CorrespondenceReport(tuple(rows), halts, query_holds, size, steps)
    logger.info(f"Three-step correspondence for {machine!r}: {'passed' if report.passed else 'FAILED'}")
    return report
