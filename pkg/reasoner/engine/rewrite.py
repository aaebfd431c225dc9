"""
Backward UCQ rewriting for single-head rules and the ruleset
transformations built on it:

    rew(R) -> cr(R) -> cr+(R) -> R+        and the saturated database D+.
"""
import logging

from reasoner.conf import reasoner_setting

from .exceptions import RewritingLimitExceeded, RuleError
from .homcore import CQ, UCQ, core, cq_contained, eval_ucq
from .model import Atom, Constant, Rule, Signature, Variable, iso_type, sort_atoms
from .sticky import is_stellar

logger = logging.getLogger(__name__)

ISO_DEDUP_MAX_ATOMS = 12


class _Classes:
    """Union-find over query terms and ("head", var) slots"""

    def __init__(self):
        self.parent = {}

    def find(self, item):
        self.parent.setdefault(item, item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, first, second):
        left, right = self.find(first), self.find(second)
        if left != right:
            self.parent[left] = right

    def members(self):
        groups = {}
        for item in list(self.parent):
            groups.setdefault(self.find(item), []).append(item)
        return groups


def _slot(term):
    return term if isinstance(term, Constant) else ("head", term)


def _unify(piece, head):
    classes = _Classes()
    for atom in piece:
        for term, slot in zip(atom.args, head.args):
            classes.union(term, _slot(slot))
    groups = classes.members()
    for members in groups.values():
        if len({item for item in members if isinstance(item, Constant)}) > 1:
            return None
    return classes, groups


def _fresh_variables(taken):
    counter = 0
    while True:
        name = f"V{counter}"
        counter += 1
        if name not in taken:
            yield Variable(name)


def _representative(members, free_order):
    terms = [item for item in members if not isinstance(item, tuple)]
    constants = [term for term in terms if isinstance(term, Constant)]
    if constants:
        return constants[0]
    for term in free_order:
        if term in terms:
            return term
    return min(terms, key=lambda term: term.name)


def _blocked_terms(classes, groups, rule, free_vars):
    """Query variables unified with existential head variables, or None if that is illegal"""
    blocked = set()
    for var in rule.existential_vars:
        members = groups[classes.find(("head", var))]
        for item in members:
            if isinstance(item, Constant) or item in free_vars:
                return None
            if isinstance(item, tuple) and item != ("head", var):
                return None
        blocked.update(item for item in members if isinstance(item, Variable))
    return blocked


def backward_steps(query, rule, reserved=frozenset()):
    """
    One-step rewritings of a CQ with a single-head rule. For each atom
    unifying with the head, the piece of atoms sharing variables that the
    head's existentials would bind is unified with the head as a whole and
    replaced by the rule body.
    """
    head = rule.head
    free_order = [term for term in query.free if isinstance(term, Variable)]
    free_vars = frozenset(free_order)
    done = set()
    for start in sort_atoms(query.atoms):
        if start.predicate != head.predicate or start.arity != head.arity:
            continue
        piece = {start}
        while True:
            unified = _unify(piece, head)
            if unified is None:
                break
            classes, groups = unified
            blocked = _blocked_terms(classes, groups, rule, free_vars)
            if blocked is None:
                break
            extra = {atom for atom in query.atoms - piece if atom.variables & blocked}
            if not extra:
                key = frozenset(piece)
                if key not in done:
                    done.add(key)
                    rewritten = _replace_piece(query, rule, piece, classes, groups, free_order, reserved)
                    if rewritten is not None:
                        yield rewritten
                break
            if any(atom.predicate != head.predicate or atom.arity != head.arity for atom in extra):
                break
            piece |= extra


def _replace_piece(query, rule, piece, classes, groups, free_order, reserved):
    substitution = {}
    for members in groups.values():
        representative = _representative(members, free_order)
        for item in members:
            if isinstance(item, Variable):
                substitution[item] = representative
    collapsed = next(iter(piece)).substitute(substitution)
    remaining = {atom.substitute(substitution) for atom in query.atoms} - {collapsed}

    body_map = {}
    for var in rule.frontier | rule.domain_vars:
        members = groups[classes.find(("head", var))]
        body_map[var] = _representative(members, free_order)
    taken = {term.name for atom in remaining for term in atom.variables} | set(reserved)
    taken |= {term.name for term in body_map.values() if isinstance(term, Variable)}
    fresh = _fresh_variables(taken)
    for var in sorted(rule.body_vars - set(body_map), key=lambda item: item.name):
        body_map[var] = next(fresh)
    atoms = remaining | {atom.substitute(body_map) for atom in rule.body}
    free = tuple(substitution.get(term, term) for term in query.free)
    occurring = {term for atom in atoms for term in atom.args}
    if any(isinstance(term, Variable) and term not in occurring for term in free):
        return None
    return CQ(frozenset(atoms), free)


class _Disjuncts:
    """Containment-minimal set of CQs with an isomorphism-type fast path"""

    def __init__(self):
        self.items = []
        self.seen = set()

    def _key(self, query):
        if len(query.atoms) > ISO_DEDUP_MAX_ATOMS:
            return None
        return iso_type(query.sorted_atoms(), query.free)

    def add(self, query):
        """Insert unless subsumed; returns True when the CQ was kept"""
        key = self._key(query)
        if key is not None and key in self.seen:
            return False
        if key is not None:
            self.seen.add(key)
        if any(cq_contained(query, kept) for kept in self.items):
            return False
        self.items = [kept for kept in self.items if not cq_contained(kept, query)]
        self.items.append(query)
        return True

    def ucq(self, arity):
        return UCQ(tuple(self.items), arity)


def _as_ucq(query):
    return UCQ.of(query) if isinstance(query, CQ) else query


def backward_step_all(query, rules, reserved=frozenset()):
    """The UCQ together with all one-step rewritings, pruned by containment"""
    query = _as_ucq(query)
    pool = _Disjuncts()
    for disjunct in query:
        pool.add(disjunct)
    for disjunct in query:
        for rule in rules:
            for rewritten in backward_steps(disjunct, rule, reserved):
                pool.add(core(rewritten))
    return pool.ucq(query.arity)


def rewrite_ucq(query, rules, max_rounds=None, max_disjuncts=None, reserved=frozenset(), budget=None):
    """
    Fixpoint of backward steps, breadth first, keeping containment-minimal
    disjuncts only. Raises RewritingLimitExceeded with the partial UCQ when
    the round or disjunct cap is hit.
    """
    query = _as_ucq(query)
    max_rounds = reasoner_setting("REWRITE_MAX_ROUNDS") if max_rounds is None else max_rounds
    max_disjuncts = reasoner_setting("REWRITE_MAX_DISJUNCTS") if max_disjuncts is None else max_disjuncts
    rules = list(rules)
    pool = _Disjuncts()
    frontier = [minimal for minimal in (core(disjunct) for disjunct in query) if pool.add(minimal)]
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > max_rounds:
            raise RewritingLimitExceeded(
                f"rewriting did not reach a fixpoint within {max_rounds} rounds", partial=pool.ucq(query.arity)
            )
        if budget is not None:
            budget.check()
        added = []
        for disjunct in frontier:
            if disjunct not in pool.items:
                continue
            for rule in rules:
                for rewritten in backward_steps(disjunct, rule, reserved):
                    candidate = core(rewritten)
                    if pool.add(candidate):
                        added.append(candidate)
        frontier = [disjunct for disjunct in added if disjunct in pool.items]
        logger.debug(f"Rewriting round {rounds}: {len(frontier)} new disjuncts, {len(pool.items)} kept")
        if len(pool.items) > max_disjuncts:
            raise RewritingLimitExceeded(
                f"rewriting exceeded {max_disjuncts} disjuncts", partial=pool.ucq(query.arity)
            )
    return pool.ucq(query.arity)


# ==========================
# RULESET PIPELINE
# ==========================

def _require_single_head(rules):
    for rule in rules:
        if not isinstance(rule, Rule):
            raise RuleError("rewriting needs single-head rules; normalize the ruleset first")


def _unique_rules(rules):
    return list(dict.fromkeys(rules))


def rewrite_rule_bodies(rules, budget=None):
    """
    rew(R): every rule plus, for each rewriting of its body (with the
    frontier as answer variables), a rule with that body and the head.
    """
    rules = list(rules)
    _require_single_head(rules)
    result = list(rules)
    for rule in rules:
        if not rule.body:
            continue
        body = CQ(rule.body, rule.frontier_tuple)
        reserved = frozenset(var.name for var in rule.existential_vars)
        rewriting = rewrite_ucq(body, rules, reserved=reserved, budget=budget)
        for index, disjunct in enumerate(rewriting, start=1):
            mapping = dict(zip(rule.frontier_tuple, disjunct.free))
            head = rule.head.substitute(mapping)
            candidate = Rule(disjunct.atoms, head, rule.existential_vars, label=f"{rule.label}.rw{index}")
            if candidate.body != rule.body or candidate.head != rule.head:
                result.append(candidate)
    logger.info(f"rew(R): {len(rules)} rules -> {len(_unique_rules(result))} rules")
    return _unique_rules(result)


def core_rule(rule):
    """The rule with its body replaced by its core, frontier variables fixed"""
    if not rule.body:
        return rule
    body = core(rule.body, frozen=rule.frontier)
    if body == rule.body:
        return rule
    return Rule(body, rule.head, rule.existential_vars, label=rule.label)


def core_rule_bodies(rules):
    return _unique_rules(core_rule(rule) for rule in rules)


def stellar_variant(rule):
    """All join variables of the rule replaced by one fresh variable"""
    names = {var.name for var in rule.body_vars | rule.head.variables}
    fresh = next(_fresh_variables(names))
    mapping = {var: fresh for var in rule.join_vars}
    body = frozenset(atom.substitute(mapping) for atom in rule.body)
    return Rule(body, rule.head.substitute(mapping), rule.existential_vars, label=f"{rule.label}.st")


def add_stellar_variants(rules):
    result = list(rules)
    for rule in rules:
        if not is_stellar(rule):
            result.append(stellar_variant(rule))
    return _unique_rules(result)


def prune_multijoin(rules):
    return [rule for rule in rules if len(rule.join_vars) <= 1]


def saturate_database(database, rules, budget=None):
    """
    D+: the database plus every atom over its constants entailed by the
    rules, found by rewriting each atomic query and evaluating it on D.
    """
    rules = list(rules)
    signature = Signature.from_rules(rules, base=Signature.from_atoms(database.atoms))
    heads = {rule.head.predicate for rule in rules}
    derived = set(database.atoms)
    for predicate, arity in signature.items():
        if predicate not in heads:
            continue
        variables = tuple(Variable(f"X{index}") for index in range(1, arity + 1))
        atomic = CQ(frozenset([Atom(predicate, variables)]), variables)
        rewriting = rewrite_ucq(atomic, rules, budget=budget)
        for answer in eval_ucq(rewriting, database):
            if all(isinstance(term, Constant) for term in answer):
                derived.add(Atom(predicate, answer))
    logger.info(f"D+: {len(database)} atoms -> {len(derived)} atoms")
    return database.union(derived)
