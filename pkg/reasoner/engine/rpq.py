"""
Regular path queries: the regex AST, DFA compilation, evaluation over
finite instances through a product graph, compilation into Datalog, and
the stellar/regular type abstractions used to fold chase prefixes into
finite countermodels.
"""
import enum
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import networkx as nx
from pyformlang.finite_automaton import Epsilon, EpsilonNFA, State
from pyformlang.finite_automaton import Symbol as FaSymbol

from reasoner.conf import reasoner_setting

from .chase import ChaseRunner, unsatisfied_triggers
from .exceptions import (
    ArityError,
    ChaseLimitExceeded,
    CountermodelBudgetExhausted,
    MergeError,
    TermNotFound,
)
from .model import Atom, Constant, Instance, Null, NullFactory, Rule, Signature, Variable, sort_terms

logger = logging.getLogger(__name__)


# ==========================
# REGEX AST
# ==========================

@dataclass(frozen=True)
class Symbol:
    name: str
    inverse: bool = False

    @property
    def label(self):
        return f"^{self.name}" if self.inverse else self.name


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Alternation:
    parts: tuple


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Plus:
    inner: object


@dataclass(frozen=True)
class Maybe:
    inner: object


@dataclass(frozen=True)
class EmptyWord:
    pass


@dataclass(frozen=True)
class EmptyLanguage:
    pass


def regex_letters(regex):
    """Every Symbol node of the expression"""
    if isinstance(regex, Symbol):
        return {regex}
    if isinstance(regex, (Concat, Alternation)):
        return set().union(*(regex_letters(part) for part in regex.parts))
    if isinstance(regex, (Star, Plus, Maybe)):
        return regex_letters(regex.inner)
    return set()


def regex_symbols(regex):
    """Predicate names the expression mentions"""
    return {letter.name for letter in regex_letters(regex)}


def rename_symbols(regex, renaming):
    """Replace letters via `renaming`, a function from Symbol to Symbol"""
    if isinstance(regex, Symbol):
        return renaming(regex)
    if isinstance(regex, (Concat, Alternation)):
        return type(regex)(tuple(rename_symbols(part, renaming) for part in regex.parts))
    if isinstance(regex, (Star, Plus, Maybe)):
        return type(regex)(rename_symbols(regex.inner, renaming))
    return regex


class QueryKind(enum.Enum):
    PLAIN = "rpq"
    TWO_WAY = "2rpq"
    HIGHER_ARITY = "hrpq"


@dataclass(frozen=True)
class Query:
    """
    A path query A(x, y). `free` names the answer endpoints among "x" and
    "y"; the Boolean query ∃x,y A(x, y) has none.
    """
    regex: object
    kind: QueryKind = QueryKind.PLAIN
    free: tuple = ()

    @property
    def is_boolean(self):
        return not self.free


# ==========================
# AUTOMATA
# ==========================

@dataclass(frozen=True, eq=False)
class DFA:
    """
    Total DFA over edge labels ("E" for a forward edge, "^E" for a
    backward one). States are 0..n-1 with the start at 0; `sink` is the
    rejecting trap state or None when no transition needed one.
    """
    states: tuple
    alphabet: tuple
    delta: dict
    start: int
    accepting: frozenset
    sink: int = None

    def step(self, state, label):
        return self.delta.get((state, label))

    def run(self, word, state=None):
        state = self.start if state is None else state
        for label in word:
            state = self.step(state, label)
            if state is None:
                return None
        return state

    def accepts(self, word):
        return self.run(word) in self.accepting

    @property
    def live_states(self):
        return tuple(state for state in self.states if state != self.sink)

    def __len__(self):
        return len(self.states)


def _thompson(regex, enfa, counter):
    start, end = State(next(counter)), State(next(counter))
    if isinstance(regex, Symbol):
        enfa.add_transition(start, FaSymbol(regex.label), end)
    elif isinstance(regex, EmptyWord):
        enfa.add_transition(start, Epsilon(), end)
    elif isinstance(regex, Concat):
        previous = start
        for part in regex.parts:
            first, last = _thompson(part, enfa, counter)
            enfa.add_transition(previous, Epsilon(), first)
            previous = last
        enfa.add_transition(previous, Epsilon(), end)
    elif isinstance(regex, Alternation):
        for part in regex.parts:
            first, last = _thompson(part, enfa, counter)
            enfa.add_transition(start, Epsilon(), first)
            enfa.add_transition(last, Epsilon(), end)
    elif isinstance(regex, (Star, Plus, Maybe)):
        first, last = _thompson(regex.inner, enfa, counter)
        enfa.add_transition(start, Epsilon(), first)
        enfa.add_transition(last, Epsilon(), end)
        if not isinstance(regex, Plus):
            enfa.add_transition(start, Epsilon(), end)
        if not isinstance(regex, Maybe):
            enfa.add_transition(last, Epsilon(), first)
    return start, end


def _single(target):
    if isinstance(target, (set, frozenset)):
        return next(iter(target))
    return target


def compile_regex(regex):
    """Minimal total DFA for the language of `regex`"""
    alphabet = tuple(sorted(letter.label for letter in regex_letters(regex)))
    enfa = EpsilonNFA()
    start, end = _thompson(regex, enfa, itertools.count())
    enfa.add_start_state(start)
    enfa.add_final_state(end)
    minimal = enfa.to_deterministic().minimize()

    table = defaultdict(dict)
    for source, moves in minimal.to_dict().items():
        for symbol, target in moves.items():
            table[source][symbol.value] = _single(target)
    finals = set(minimal.final_states)

    numbering, order = {}, []
    if minimal.start_state is not None:
        numbering[minimal.start_state] = 0
        order.append(minimal.start_state)
    for state in order:
        for label in alphabet:
            target = table[state].get(label)
            if target is not None and target not in numbering:
                numbering[target] = len(order)
                order.append(target)
    accepting = frozenset(numbering[state] for state in order if state in finals)

    delta, sink = {}, None
    complete = bool(order) and all(label in table[state] for state in order for label in alphabet)
    if not complete:
        sink = len(order)
    for state in order:
        for label in alphabet:
            target = table[state].get(label)
            delta[(numbering[state], label)] = sink if target is None else numbering[target]
    if sink is not None:
        for label in alphabet:
            delta[(sink, label)] = sink
    states = tuple(range(len(order) + (sink is not None)))
    return DFA(states, alphabet, delta, 0, accepting, sink)


def _alt(*parts):
    flat = []
    for part in parts:
        if isinstance(part, EmptyLanguage):
            continue
        for item in part.parts if isinstance(part, Alternation) else (part,):
            if item not in flat:
                flat.append(item)
    if not flat:
        return EmptyLanguage()
    return flat[0] if len(flat) == 1 else Alternation(tuple(flat))


def _cat(*parts):
    flat = []
    for part in parts:
        if isinstance(part, EmptyLanguage):
            return EmptyLanguage()
        if isinstance(part, EmptyWord):
            continue
        flat.extend(part.parts if isinstance(part, Concat) else (part,))
    if not flat:
        return EmptyWord()
    return flat[0] if len(flat) == 1 else Concat(tuple(flat))


def _star(inner):
    if isinstance(inner, (EmptyLanguage, EmptyWord)):
        return EmptyWord()
    if isinstance(inner, Star):
        return inner
    if isinstance(inner, (Plus, Maybe)):
        return Star(inner.inner)
    return Star(inner)


def _letter(label):
    return Symbol(label[1:], True) if label.startswith("^") else Symbol(label)


def dfa_to_regex(dfa):
    """Regular expression for the DFA's language by state elimination"""
    begin, finish = "begin", "finish"
    live = list(dfa.live_states)
    edges = defaultdict(EmptyLanguage)
    edges[(begin, dfa.start)] = EmptyWord()
    for state in dfa.accepting:
        edges[(state, finish)] = EmptyWord()
    for (state, label), target in sorted(dfa.delta.items()):
        if state == dfa.sink or target == dfa.sink:
            continue
        edges[(state, target)] = _alt(edges[(state, target)], _letter(label))
    nodes = [begin, *live, finish]
    for state in live:
        loop = _star(edges[(state, state)])
        sources = [node for node in nodes if node != state and not isinstance(edges[(node, state)], EmptyLanguage)]
        targets = [node for node in nodes if node != state and not isinstance(edges[(state, node)], EmptyLanguage)]
        for source in sources:
            for target in targets:
                through = _cat(edges[(source, state)], loop, edges[(state, target)])
                edges[(source, target)] = _alt(edges[(source, target)], through)
        nodes.remove(state)
    return edges[(begin, finish)]


# ==========================
# EVALUATION
# ==========================

SOURCE, TARGET = "__source__", "__target__"


@dataclass(frozen=True)
class PathWitness:
    """A labelled path: each step is (atom, traversed backwards)"""
    start: object
    end: object
    steps: tuple = ()

    @property
    def word(self):
        return tuple(f"^{atom.predicate}" if backwards else atom.predicate for atom, backwards in self.steps)

    def as_dict(self):
        return {
            "start": str(self.start),
            "end": str(self.end),
            "steps": [{"atom": str(atom), "inverse": backwards} for atom, backwards in self.steps],
        }

    def __str__(self):
        if not self.steps:
            return f"{self.start} (empty path)"
        return " ; ".join(f"{'^' if backwards else ''}{atom}" for atom, backwards in self.steps)


@dataclass(frozen=True)
class RpqResult:
    holds: bool
    witness: PathWitness = None

    def __bool__(self):
        return self.holds


def _edges(instance, dfa, higher_arity=False):
    """(source, target, label, atom, backwards) for every usable edge"""
    letters = set(dfa.alphabet)
    for atom in instance.sorted_atoms():
        if atom.predicate not in letters and f"^{atom.predicate}" not in letters:
            continue
        if higher_arity:
            if atom.arity < 2:
                raise ArityError(f"HRPQ predicate {atom.predicate} has arity {atom.arity} < 2")
        elif atom.arity != 2:
            continue
        source, target = atom.args[0], atom.args[1]
        if atom.predicate in letters:
            yield source, target, atom.predicate, atom, False
        if f"^{atom.predicate}" in letters:
            yield target, source, f"^{atom.predicate}", atom, True


def product_graph(instance, dfa, higher_arity=False):
    """Graph over (term, state) pairs; edges carry the atom they follow"""
    graph = nx.DiGraph()
    live = dfa.live_states
    graph.add_nodes_from((term, state) for term in sort_terms(instance.active_domain) for state in live)
    for source, target, label, atom, backwards in _edges(instance, dfa, higher_arity):
        for state in live:
            following = dfa.step(state, label)
            if following is None or following == dfa.sink:
                continue
            if not graph.has_edge((source, state), (target, following)):
                graph.add_edge((source, state), (target, following), atom=atom, backwards=backwards)
    return graph


def _witness(graph, path):
    steps = tuple(
        (graph.edges[left, right]["atom"], graph.edges[left, right]["backwards"])
        for left, right in zip(path, path[1:])
    )
    return PathWitness(path[0][0], path[-1][0], steps)


def _evaluate(query, instance, max_length=None, higher_arity=False, dfa=None):
    if dfa is None:
        dfa = compile_regex(query.regex)
    graph = product_graph(instance, dfa, higher_arity)
    for term in instance.active_domain:
        if dfa.start != dfa.sink:
            graph.add_edge(SOURCE, (term, dfa.start))
        for state in dfa.accepting:
            graph.add_edge((term, state), TARGET)
    if SOURCE not in graph or TARGET not in graph:
        return RpqResult(False)
    try:
        path = nx.shortest_path(graph, SOURCE, TARGET)
    except nx.NetworkXNoPath:
        return RpqResult(False)
    inner = path[1:-1]
    if max_length is not None and len(inner) - 1 > max_length:
        return RpqResult(False)
    return RpqResult(True, _witness(graph, inner))


def eval_rpq(query, instance, max_length=None, dfa=None):
    """
    Does some pair of terms have a path whose label word is in L(query)?
    Paths of length 0 count. With `max_length`, only paths of at most that
    many edges are considered. Non-binary atoms are ignored. Callers that
    evaluate one query repeatedly pass its compiled `dfa`.
    """
    if query.kind == QueryKind.HIGHER_ARITY:
        return eval_hrpq(query, instance, max_length, dfa)
    return _evaluate(query, instance, max_length, dfa=dfa)


def eval_hrpq(query, instance, max_length=None, dfa=None):
    """Path query over the first two positions of atoms of arity >= 2"""
    return _evaluate(query, instance, max_length, higher_arity=True, dfa=dfa)


def answer_pairs(query, instance):
    """All (s, t) connected by a path labelled by a word of L(query)"""
    dfa = compile_regex(query.regex)
    graph = product_graph(instance, dfa, query.kind == QueryKind.HIGHER_ARITY)
    pairs = set()
    if dfa.start == dfa.sink:
        return pairs
    for term in instance.active_domain:
        origin = (term, dfa.start)
        for node in nx.descendants(graph, origin) | {origin}:
            if node[1] in dfa.accepting:
                pairs.add((term, node[0]))
    return pairs


def answers(query, instance):
    """Answer tuples restricted to the query's free endpoints"""
    pairs = answer_pairs(query, instance)
    if not query.free:
        return {()} if pairs else set()
    return {tuple(pair[0] if name == "x" else pair[1] for name in query.free) for pair in pairs}


def holds(query, instance, dfa=None):
    return eval_rpq(query, instance, dfa=dfa).holds


# ==========================
# REDUCTIONS
# ==========================

def _query_signature(query, rules, signature):
    merged = Signature.from_rules(rules, base=signature)
    for name in sorted(regex_symbols(query.regex)):
        if name not in merged:
            merged.declare(name, 2)
    return merged


def reduce_two_way(query, rules, signature=None):
    """
    Replace every inverse letter ^E by a fresh predicate E' filled by the
    rule E(X, Y) -> E'(Y, X); one such rule is added per binary predicate.
    """
    signature = _query_signature(query, rules, signature)
    inverses, added = {}, []
    for predicate in signature.binary_predicates():
        inverse = signature.fresh_predicate(f"{predicate}_inv")
        signature.declare(inverse, 2)
        inverses[predicate] = inverse
        x, y = Variable("X"), Variable("Y")
        added.append(Rule(frozenset([Atom(predicate, (x, y))]), Atom(inverse, (y, x)), label=f"inv_{predicate}"))

    def flip(letter):
        return Symbol(inverses[letter.name]) if letter.inverse else letter

    reduced = Query(rename_symbols(query.regex, flip), QueryKind.PLAIN, query.free)
    logger.debug(f"Two-way reduction added {len(added)} inversion rules")
    return reduced, list(rules) + added


class DatalogQuery(NamedTuple):
    rules: list
    goal: str
    state_predicates: dict


def rpq_to_datalog(query, signature=None):
    """
    Datalog program deriving the nullary goal predicate iff the query
    holds: every term starts in the initial state, each DFA transition is
    one rule and accepting states derive the goal.
    """
    dfa = compile_regex(query.regex)
    signature = _query_signature(query, [], signature)
    higher = query.kind == QueryKind.HIGHER_ARITY
    states = {}
    for state in dfa.live_states:
        states[state] = signature.fresh_predicate(f"Rpq_q{state}")
        signature.declare(states[state], 1)
    goal = signature.fresh_predicate("Goal")
    signature.declare(goal, 0)
    x, y = Variable("X"), Variable("Y")
    rules = []
    if dfa.start != dfa.sink:
        rules.append(Rule(frozenset(), Atom(states[dfa.start], (x,)), label="rpq_seed"))
    for (state, label), target in sorted(dfa.delta.items()):
        if state == dfa.sink or target == dfa.sink:
            continue
        letter = _letter(label)
        args = (y, x) if letter.inverse else (x, y)
        if higher:
            extra = signature.arity(letter.name) - 2
            args = args + tuple(Variable(f"W{index}") for index in range(1, extra + 1))
        body = frozenset([Atom(states[state], (x,)), Atom(letter.name, args)])
        rules.append(Rule(body, Atom(states[target], (y,)), label=f"rpq_{state}_{label}"))
    for state in sorted(dfa.accepting):
        rules.append(Rule(frozenset([Atom(states[state], (x,))]), Atom(goal), label=f"rpq_accept_{state}"))
    return DatalogQuery(rules, goal, states)


# ==========================
# TYPES AND MERGING
# ==========================

def _require_term(term, instance):
    if term not in instance.active_domain:
        raise TermNotFound(f"term {term} does not occur in the instance")


def stellar_types(instance):
    incidences = defaultdict(set)
    for atom in instance:
        for position, term in enumerate(atom.args, start=1):
            incidences[term].add((atom.predicate, position))
    return {term: frozenset(found) for term, found in incidences.items()}


def stellar_type(term, instance):
    """(predicate, position) pairs at which the term occurs"""
    _require_term(term, instance)
    return frozenset(
        (atom.predicate, position)
        for atom in instance
        for position, arg in enumerate(atom.args, start=1)
        if arg == term
    )


def regular_types(instance, dfa, higher_arity=False):
    """For every term, the state pairs (q, q') joined by one of its outgoing paths"""
    graph = product_graph(instance, dfa, higher_arity)
    condensed = nx.condensation(graph)
    reach = {}
    for component in reversed(list(nx.topological_sort(condensed))):
        found = {node[1] for node in condensed.nodes[component]["members"]}
        for successor in condensed.successors(component):
            found |= reach[successor]
        reach[component] = frozenset(found)
    mapping = condensed.graph["mapping"]
    types = defaultdict(set)
    for (term, state), component in mapping.items():
        types[term].update((state, target) for target in reach[component])
    return {term: frozenset(pairs) for term, pairs in types.items()}


def regular_type(term, instance, dfa, higher_arity=False):
    _require_term(term, instance)
    return regular_types(instance, dfa, higher_arity).get(term, frozenset())


def merge_terms(instance, first, second):
    """Identify two non-constant terms under a fresh null"""
    for term in (first, second):
        if isinstance(term, Constant):
            raise MergeError(f"cannot merge constant {term}")
        _require_term(term, instance)
    if first == second:
        raise MergeError("cannot merge a term with itself")
    merged = Null(instance.max_null_id() + 1)
    return instance.substitute({first: merged, second: merged})


def quotient(instance, key, terms=None):
    """
    Collapse every class of non-constant terms sharing `key(term)` into one
    fresh null. Only `terms` are considered when given.
    """
    candidates = instance.active_domain if terms is None else terms
    classes = defaultdict(list)
    for term in sort_terms(candidates):
        if not isinstance(term, Constant):
            classes[key(term)].append(term)
    nulls = NullFactory.after(instance)
    mapping = {}
    for members in classes.values():
        fresh = nulls.fresh()
        for term in members:
            mapping[term] = fresh
    return instance.substitute(mapping), mapping


# ==========================
# COUNTERMODELS
# ==========================

@dataclass(frozen=True)
class Countermodel:
    instance: Instance
    method: str
    rounds: int = 0
    notes: tuple = field(default_factory=tuple)


def verify_countermodel(candidate, database, rules, query, dfa=None):
    """Reasons why `candidate` is not a countermodel; empty when it is one"""
    problems = []
    missing = database.atoms - candidate.atoms
    if missing:
        problems.append(f"{len(missing)} database atoms missing")
    unsatisfied = next(unsatisfied_triggers(candidate, rules), None)
    if unsatisfied is not None:
        problems.append(f"rule {unsatisfied.rule} has an unsatisfied trigger")
    result = eval_rpq(query, candidate, dfa=dfa)
    if result.holds:
        problems.append(f"query holds via {result.witness}")
    return problems


def _quotient_round(runner, depth, dfa, higher_arity):
    trace = runner.trace()
    lookahead = runner.current
    star = stellar_types(lookahead)
    arrow = regular_types(lookahead, dfa, higher_arity)
    prefix = trace.prefix(min(depth, trace.depth))
    folded, _ = quotient(prefix, lambda term: (star.get(term), arrow.get(term)))
    return folded


def _fold_chase(database, rules, query, dfa, budget, max_rounds, max_atoms):
    higher = query.kind == QueryKind.HIGHER_ARITY
    lookahead = len(dfa.states) + 1
    runner = ChaseRunner(database, rules, max_atoms=max_atoms, budget=budget)
    for depth in range(1, max_rounds + 1):
        while runner.depth < depth + lookahead and not runner.terminated:
            runner.advance()
        if runner.terminated and runner.depth <= depth:
            candidate = runner.current
            if not verify_countermodel(candidate, database, rules, query, dfa):
                return Countermodel(candidate, "finite-chase", depth)
            return None
        candidate = _quotient_round(runner, depth, dfa, higher)
        if budget is not None:
            budget.check()
        if not verify_countermodel(candidate, database, rules, query, dfa):
            logger.info(f"Countermodel found by folding the chase at depth {depth}: {len(candidate)} atoms")
            return Countermodel(candidate, "quotient", depth)
    return None


def _head_choices(trigger, domain, nulls_left, nulls):
    rule = trigger.rule
    existentials = sort_terms(rule.existential_vars)
    assignment = trigger.assignment
    for fresh_count in range(0, min(nulls_left, len(existentials)) + 1):
        fresh = [nulls.fresh() for _ in range(fresh_count)]
        pool = sort_terms(domain) + fresh
        for values in itertools.product(pool, repeat=len(existentials)):
            if set(fresh) - set(values):
                continue
            full = dict(assignment)
            full.update(zip(existentials, values))
            yield rule.head.substitute(full), fresh_count


def enumerate_countermodel(database, rules, query, max_nulls=None, budget=None, dfa=None):
    """
    Depth-first search over finite instances: repair one unsatisfied
    trigger at a time, reusing existing terms or spending one of at most
    `max_nulls` fresh nulls, and prune every branch where the query holds.
    """
    max_nulls = reasoner_setting("ENUMERATION_MAX_NULLS") if max_nulls is None else max_nulls
    if dfa is None:
        dfa = compile_regex(query.regex)
    if holds(query, database, dfa):
        return None
    for allowance in range(max_nulls + 1):
        seen = set()
        stack = [(database, allowance)]
        nulls = NullFactory.after(database)
        while stack:
            if budget is not None:
                budget.check()
            current, left = stack.pop()
            if current.atoms in seen:
                continue
            seen.add(current.atoms)
            trigger = next(unsatisfied_triggers(current, rules), None)
            if trigger is None:
                return Countermodel(current, "enumeration", allowance)
            options = []
            for atom, spent in _head_choices(trigger, current.active_domain, left, nulls):
                extended = current.union([atom])
                if extended.atoms not in seen and not holds(query, extended, dfa):
                    options.append((extended, left - spent))
            stack.extend(reversed(options))
    return None


def build_countermodel(dplus, rplus, query, budget=None, max_rounds=None, max_atoms=None):
    """
    Finite model of the database and rules in which the query fails. Tries
    the database itself, then chase prefixes folded by stellar and regular
    type, then bounded enumeration. Raises CountermodelBudgetExhausted.
    """
    max_rounds = reasoner_setting("COUNTERMODEL_MAX_ROUNDS") if max_rounds is None else max_rounds
    max_atoms = reasoner_setting("COUNTERMODEL_MAX_ATOMS") if max_atoms is None else max_atoms
    dfa = compile_regex(query.regex)
    if not verify_countermodel(dplus, dplus, rplus, query, dfa):
        return Countermodel(dplus, "database", 0)
    if holds(query, dplus, dfa):
        raise CountermodelBudgetExhausted("the query already holds in the database")
    try:
        found = _fold_chase(dplus, rplus, query, dfa, budget, max_rounds, max_atoms)
    except ChaseLimitExceeded as exc:
        logger.warning(f"Chase folding stopped: {exc}")
        found = None
    if found is None:
        logger.info("Chase folding found no countermodel, falling back to enumeration")
        found = enumerate_countermodel(dplus, rplus, query, budget=budget, dfa=dfa)
    if found is None:
        raise CountermodelBudgetExhausted("no countermodel within the configured limits")
    problems = verify_countermodel(found.instance, dplus, rplus, query, dfa)
    if problems:
        raise CountermodelBudgetExhausted(f"candidate failed verification: {problems[0]}")
    return found

