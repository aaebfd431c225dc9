"""
Semi-oblivious Skolem chase with per-level traces.

Skolem terms are named after the isomorphism type of the rule head with
the frontier frozen, so two triggers of isomorphic heads over the same
frontier image produce the same atoms.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property

from reasoner.conf import reasoner_setting

from .exceptions import ChaseLimitExceeded
from .homcore import find_homomorphisms, match_atom
from .model import (
    Functional,
    Instance,
    SkolemSymbol,
    Variable,
    canonical_form,
    sort_atoms,
    sort_terms,
)

logger = logging.getLogger(__name__)


def _unique(terms):
    return tuple(dict.fromkeys(terms))


def skolemize(head_atoms, existential_vars, mapping):
    """
    Ground the head under `mapping`, replacing each existential variable z
    by f_{tau,z}(h(frontier)) where tau is the head's isomorphism type with
    the frontier frozen up to the equalities h induces on it.
    """
    head_atoms = tuple(head_atoms)
    existential_vars = frozenset(existential_vars)
    if not existential_vars:
        return frozenset(atom.substitute(mapping) for atom in head_atoms)
    frontier = tuple(
        term for term in _unique(arg for atom in head_atoms for arg in atom.args)
        if isinstance(term, Variable) and term not in existential_vars
    )
    slots, placeholders = {}, {}
    for var in frontier:
        index = slots.setdefault(mapping[var], len(slots))
        placeholders[var] = Variable(f"#{index}")
    shaped = [atom.substitute(placeholders) for atom in head_atoms]
    free = tuple(Variable(f"#{index}") for index in range(len(slots)))
    iso, renaming = canonical_form(shaped, free)
    args = tuple(slots)
    grounding = dict(mapping)
    for var in existential_vars:
        symbol = SkolemSymbol(iso.id, renaming[var].name, len(args))
        grounding[var] = Functional(symbol, args)
    return frozenset(atom.substitute(grounding) for atom in head_atoms)


@dataclass(frozen=True)
class Trigger:
    rule: object
    mapping: tuple

    @classmethod
    def of(cls, rule, assignment):
        relevant = rule.body_vars | rule.domain_vars
        pairs = ((var, value) for var, value in assignment.items() if var in relevant)
        return cls(rule, tuple(sorted(pairs, key=lambda pair: pair[0].name)))

    @property
    def assignment(self):
        return dict(self.mapping)

    def apply(self):
        return skolemize((self.rule.head,), self.rule.existential_vars, self.assignment)


def _empty_body_triggers(rule, domain, fresh_terms=None):
    variables = sort_terms(rule.domain_vars)
    for values in itertools.product(sort_terms(domain), repeat=len(variables)):
        if fresh_terms is not None and variables and not set(values) & fresh_terms:
            continue
        yield Trigger.of(rule, dict(zip(variables, values)))


def triggers(instance, rules):
    """Every trigger of `rules` on `instance`, each once"""
    seen = set()
    for rule in rules:
        if not rule.body:
            found = _empty_body_triggers(rule, instance.active_domain)
        else:
            found = (Trigger.of(rule, h) for h in find_homomorphisms(rule.body, instance))
        for trigger in found:
            if trigger not in seen:
                seen.add(trigger)
                yield trigger


def unsatisfied_triggers(instance, rules):
    """Triggers whose head has no extension into `instance`"""
    for trigger in triggers(instance, rules):
        rule = trigger.rule
        if not next(find_homomorphisms([rule.head], instance, trigger.assignment), None):
            yield trigger


def models(instance, rules):
    return next(unsatisfied_triggers(instance, rules), None) is None


def chase_step(instance, rules):
    produced = set()
    for trigger in triggers(instance, rules):
        produced |= trigger.apply()
    return instance.union(produced)


def _delta_triggers(instance, delta, fresh_terms, rules, budget=None):
    """Triggers using at least one atom of `delta`"""
    for rule in rules:
        if budget is not None:
            budget.check()
        if not rule.body:
            yield from _empty_body_triggers(rule, instance.active_domain, fresh_terms)
            continue
        body = rule.sorted_body
        for index, atom in enumerate(body):
            rest = body[:index] + body[index + 1:]
            for fact in delta.by_predicate(atom.predicate):
                seed = match_atom(atom, fact, {})
                if seed is None:
                    continue
                for h in find_homomorphisms(rest, instance, seed):
                    yield Trigger.of(rule, h)


@dataclass(frozen=True, eq=False)
class ChaseTrace:
    """
    Chase levels as deltas (levels[0] is the input), the atom each new
    term was born in, and for every atom the terms it inherited from
    earlier levels.
    """
    levels: tuple
    birth: dict = field(default_factory=dict)
    frontier_terms: dict = field(default_factory=dict)
    terminated: bool = False

    @cached_property
    def instance(self):
        return self.prefix(len(self.levels) - 1)

    @property
    def depth(self):
        return len(self.levels) - 1

    def prefix(self, level):
        return Instance(frozenset().union(*self.levels[:level + 1]))

    def at(self, level):
        return self.levels[level]

    def level_of(self, atom):
        for index, delta in enumerate(self.levels):
            if atom in delta:
                return index
        return None


class ChaseRunner:
    """Incremental chase: each advance() computes one more level"""

    def __init__(self, instance, rules, max_atoms=None, budget=None):
        self.rules = list(rules)
        self.max_atoms = reasoner_setting("CHASE_MAX_ATOMS") if max_atoms is None else max_atoms
        self.budget = budget
        self.current = instance
        self.levels = [frozenset(instance.atoms)]
        self.birth = {}
        self.frontier_terms = {atom: _unique(atom.args) for atom in instance}
        self.terminated = False
        self._delta = instance
        self._fresh_terms = set(instance.active_domain)

    @property
    def depth(self):
        return len(self.levels) - 1

    def trace(self):
        return ChaseTrace(tuple(self.levels), dict(self.birth), dict(self.frontier_terms), self.terminated)

    def advance(self):
        """Compute the next level; returns its new atoms (empty at a fixpoint)"""
        if self.terminated:
            return frozenset()
        produced = set()
        for trigger in _delta_triggers(self.current, self._delta, self._fresh_terms, self.rules, self.budget):
            produced |= trigger.apply()
        fresh = frozenset(produced - self.current.atoms)
        if not fresh:
            self.terminated = True
            logger.debug(f"Chase terminated after {self.depth} levels")
            return fresh
        known = self.current.active_domain
        for atom in sort_atoms(fresh):
            for term in _unique(atom.args):
                if term not in known:
                    self.birth.setdefault(term, atom)
            self.frontier_terms[atom] = tuple(term for term in _unique(atom.args) if term in known)
        self.current = self.current.union(fresh)
        self.levels.append(fresh)
        self._delta = Instance(fresh)
        self._fresh_terms = set(self.current.active_domain - known)
        logger.debug(f"Chase level {self.depth}: {len(fresh)} new atoms, {len(self.current)} total")
        if len(self.current) > self.max_atoms:
            raise ChaseLimitExceeded(
                f"chase exceeded {self.max_atoms} atoms at level {self.depth}", trace=self.trace()
            )
        return fresh


def chase_bounded(instance, rules, steps, max_atoms=None, budget=None):
    runner = ChaseRunner(instance, rules, max_atoms=max_atoms, budget=budget)
    for _ in range(steps):
        if not runner.advance():
            break
    return runner.trace()


@dataclass(frozen=True)
class QuickReport:
    """Samples where chase level k+1 did not follow from level k"""
    violations: tuple = ()

    @property
    def quick(self):
        return not self.violations


def check_quick_sample(rules, samples, depth=None):
    """
    Every atom of the bounded chase of a sample whose inherited terms all
    lie in the sample's active domain must already appear after one step.
    Returns the (sample index, atom) pairs that do not.
    """
    depth = reasoner_setting("QUICK_SAMPLE_DEPTH") if depth is None else depth
    violations = []
    for index, database in enumerate(samples):
        trace = chase_bounded(database, rules, depth)
        one_step = chase_step(database, rules)
        domain = database.active_domain
        for atom in trace.instance.sorted_atoms():
            if set(trace.frontier_terms.get(atom, ())) <= domain and atom not in one_step:
                violations.append((index, atom))
    if violations:
        logger.debug(f"Quickness refuted on sample {violations[0][0]}: {violations[0][1]}")
    return QuickReport(tuple(violations))
