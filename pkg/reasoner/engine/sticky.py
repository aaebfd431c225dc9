"""
Static analysis of rulesets: single-head normalization, stickiness with a
marking witness, and the joinless/stellar classes.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass

from .exceptions import RuleError
from .model import Atom, MultiHeadRule, Rule, Signature, Variable, sort_terms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Marking:
    """Marked argument positions (1-based) per predicate"""
    positions: tuple

    @classmethod
    def build(cls, mapping):
        return cls(tuple(sorted((predicate, frozenset(marked)) for predicate, marked in mapping.items())))

    def marked(self, predicate):
        for name, marked in self.positions:
            if name == predicate:
                return marked
        return frozenset()

    def is_marked(self, predicate, position):
        return position in self.marked(predicate)

    def table(self):
        lines = []
        for predicate, marked in self.positions:
            inner = ",".join(str(position) for position in sorted(marked))
            lines.append(f"{predicate}: {{{inner}}}")
        return "\n".join(lines)

    def as_dict(self):
        return {predicate: sorted(marked) for predicate, marked in self.positions}


@dataclass(frozen=True)
class StickinessReport:
    sticky: bool
    marking: Marking = None
    violation: str = ""


def to_single_head(rules, signature=None):
    """
    Replace each rule with k > 1 head atoms by one existential rule into a
    fresh predicate P_r(frontier, existentials) and k Datalog projections.
    """
    signature = signature if signature is not None else Signature.from_rules(rules)
    normalized = []
    for index, rule in enumerate(rules, start=1):
        if isinstance(rule, Rule):
            normalized.append(rule)
            continue
        if len(rule.heads) == 1:
            normalized.append(Rule(rule.body, rule.heads[0], rule.existential_vars, label=rule.label))
            continue
        existentials = tuple(sort_terms(rule.existential_vars))
        args = rule.frontier_tuple + existentials
        predicate = signature.fresh_predicate(f"P_{rule.label or f'r{index}'}")
        signature.declare(predicate, len(args))
        bridge = Atom(predicate, args)
        label = rule.label or f"r{index}"
        normalized.append(Rule(rule.body, bridge, rule.existential_vars, label=label))
        for position, head in enumerate(rule.heads, start=1):
            normalized.append(Rule(frozenset([bridge]), head, label=f"{label}.{position}"))
    return normalized


def _require_single_head(rules):
    for rule in rules:
        if isinstance(rule, MultiHeadRule):
            raise RuleError(f"multi-head rule must be normalized first: {rule.label}")


def _positions_of(var, atoms):
    return {
        (atom.predicate, position)
        for atom in atoms
        for position, term in enumerate(atom.args, start=1)
        if term == var
    }


def doomed_positions(rules):
    """Least set of positions that no marking satisfying stickiness can mark"""
    doomed = set()
    for rule in rules:
        for var in rule.body_vars - rule.head.variables:
            doomed |= _positions_of(var, rule.body)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for var in rule.frontier:
                head_positions = _positions_of(var, [rule.head])
                if head_positions <= doomed:
                    body_positions = _positions_of(var, rule.body)
                    if not body_positions <= doomed:
                        doomed |= body_positions
                        changed = True
    return doomed


def verify_marking(rules, marking):
    """Violations of both stickiness conditions under `marking`, as text"""
    problems = []
    for rule in rules:
        marked_head = {
            term for position, term in enumerate(rule.head.args, start=1)
            if isinstance(term, Variable) and marking.is_marked(rule.head.predicate, position)
        }
        for var in sort_terms(rule.join_vars):
            if var not in marked_head:
                problems.append(f"rule {rule}: join variable {var} has no marked head position")
        for atom in rule.sorted_body:
            for position, term in enumerate(atom.args, start=1):
                if isinstance(term, Variable) and marking.is_marked(atom.predicate, position) \
                        and term not in marked_head:
                    problems.append(
                        f"rule {rule}: {term} at marked position {atom.predicate}[{position}] "
                        f"has no marked head position"
                    )
    return sorted(set(problems))


def check_sticky(rules):
    _require_single_head(rules)
    rules = list(rules)
    signature = Signature.from_rules(rules)
    doomed = doomed_positions(rules)
    marking = Marking.build({
        predicate: {position for position in range(1, arity + 1) if (predicate, position) not in doomed}
        for predicate, arity in signature.items()
    })
    violations = verify_marking(rules, marking)
    if violations:
        logger.debug(f"Stickiness refuted: {violations[0]}")
        return StickinessReport(False, None, violations[0])
    return StickinessReport(True, marking)


def is_joinless(rules):
    return all(not rule.join_vars for rule in rules)


def is_stellar(rule):
    if not rule.join_vars:
        return True
    return len(rule.join_vars) == 1 and rule.join_vars <= rule.frontier


def check_stick_propagation(trace, marking):
    """
    For every term t and every term t' at a marked position of t's birth
    atom, each chase atom containing t must also hold t' at a marked
    position. Returns the list of (t, t', atom) counterexamples.
    """
    marked_terms = defaultdict(set)
    atoms = trace.instance.sorted_atoms()
    for atom in atoms:
        for position, term in enumerate(atom.args, start=1):
            if marking.is_marked(atom.predicate, position):
                marked_terms[atom].add(term)
    failures = []
    containing = defaultdict(list)
    for atom in atoms:
        for term in atom.terms:
            containing[term].append(atom)
    for term, birth in trace.birth.items():
        for stuck in marked_terms[birth]:
            for atom in containing[term]:
                if stuck not in marked_terms[atom]:
                    failures.append((term, stuck, atom))
    return failures
