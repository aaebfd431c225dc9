"""
Homomorphism search, conjunctive query evaluation/containment and cores.
"""
from dataclasses import dataclass
from functools import cached_property

from .model import Constant, Instance, Variable, sort_atoms, sort_terms

_UNSET = object()


@dataclass(frozen=True)
class CQ:
    """
    Conjunctive query. `free` is the answer tuple; it normally lists
    distinct variables, but rewriting may produce repeated variables or
    constants in it when answer positions get identified.
    """
    atoms: frozenset
    free: tuple = ()

    def __post_init__(self):
        if not isinstance(self.atoms, frozenset):
            object.__setattr__(self, "atoms", frozenset(self.atoms))
        object.__setattr__(self, "free", tuple(self.free))
        occurring = self.terms
        for term in self.free:
            if isinstance(term, Variable) and term not in occurring:
                raise ValueError(f"free variable {term} does not occur in the query")

    @cached_property
    def terms(self):
        return frozenset(term for atom in self.atoms for term in atom.args)

    @cached_property
    def variables(self):
        return frozenset(term for term in self.terms if isinstance(term, Variable))

    @cached_property
    def bound_vars(self):
        return self.variables - frozenset(self.free)

    @property
    def is_boolean(self):
        return not self.free

    def sorted_atoms(self):
        return sort_atoms(self.atoms)

    def __str__(self):
        head = ",".join(str(term) for term in self.free)
        return f"q({head}) :- " + ", ".join(str(atom) for atom in self.sorted_atoms())


@dataclass(frozen=True)
class UCQ:
    disjuncts: tuple
    arity: int = 0

    def __post_init__(self):
        ordered = tuple(sorted(set(self.disjuncts), key=str))
        object.__setattr__(self, "disjuncts", ordered)
        for disjunct in ordered:
            if len(disjunct.free) != self.arity:
                raise ValueError("all disjuncts must have the same answer arity")

    @classmethod
    def of(cls, *disjuncts):
        arity = len(disjuncts[0].free) if disjuncts else 0
        return cls(tuple(disjuncts), arity)

    def __iter__(self):
        return iter(self.disjuncts)

    def __len__(self):
        return len(self.disjuncts)

    def __str__(self):
        return "\n".join(str(disjunct) for disjunct in self.disjuncts)


def match_atom(pattern, fact, assignment):
    """Bindings extending `assignment` that map `pattern` onto `fact`, or None"""
    if pattern.predicate != fact.predicate or len(pattern.args) != len(fact.args):
        return None
    new = {}
    for term, value in zip(pattern.args, fact.args):
        if isinstance(term, Constant):
            if term != value:
                return None
            continue
        bound = assignment.get(term, new.get(term, _UNSET))
        if bound is _UNSET:
            new[term] = value
        elif bound != value:
            return None
    return new


def _candidates(atom, target, assignment):
    best = None
    for position, term in enumerate(atom.args):
        value = term if isinstance(term, Constant) else assignment.get(term, _UNSET)
        if value is _UNSET:
            continue
        found = target.lookup(atom.predicate, position, value)
        if best is None or len(found) < len(best):
            best = found
            if not best:
                break
    return target.by_predicate(atom.predicate) if best is None else best


def _search(remaining, target, assignment):
    if not remaining:
        yield dict(assignment)
        return
    chosen, options = None, None
    for index, atom in enumerate(remaining):
        found = _candidates(atom, target, assignment)
        if options is None or len(found) < len(options):
            chosen, options = index, found
        if not found:
            return
    atom = remaining[chosen]
    rest = remaining[:chosen] + remaining[chosen + 1:]
    for fact in options:
        new = match_atom(atom, fact, assignment)
        if new is None:
            continue
        assignment.update(new)
        yield from _search(rest, target, assignment)
        for term in new:
            del assignment[term]


def _atoms_of(structure):
    if isinstance(structure, CQ):
        return structure.atoms
    return frozenset(structure)


def find_homomorphisms(source, target, fixed=None):
    """
    Every mapping of the non-constant terms of `source` into `target` that
    extends `fixed`, sends every source atom to a target atom and fixes
    constants. Atoms are matched most-constrained first.
    """
    if not isinstance(target, Instance):
        target = Instance(_atoms_of(target))
    atoms = sort_atoms(_atoms_of(source))
    yield from _search(atoms, target, dict(fixed or {}))


def maps_into(source, target, fixed=None):
    return next(find_homomorphisms(source, target, fixed), None) is not None


def homomorphically_equivalent(first, second):
    return maps_into(first, second) and maps_into(second, first)


def _answer(free, mapping):
    return tuple(term if isinstance(term, Constant) else mapping[term] for term in free)


def eval_cq(query, instance):
    return {_answer(query.free, mapping) for mapping in find_homomorphisms(query.atoms, instance)}


def eval_ucq(query, instance):
    """All answer tuples; a Boolean query answers {()} when it holds"""
    if isinstance(query, CQ):
        return eval_cq(query, instance)
    answers = set()
    for disjunct in query:
        answers |= eval_cq(disjunct, instance)
    return answers


def holds(query, instance):
    return bool(eval_ucq(query, instance))


def cq_contained(first, second):
    """True iff every answer of `first` is an answer of `second`"""
    if len(first.free) != len(second.free):
        return False
    seed = {}
    for outer, inner in zip(second.free, first.free):
        if isinstance(outer, Constant):
            if outer != inner:
                return False
            continue
        if seed.get(outer, inner) != inner:
            return False
        seed[outer] = inner
    return maps_into(second.atoms, Instance(first.atoms), seed)


def cq_equivalent(first, second):
    return cq_contained(first, second) and cq_contained(second, first)


def _core_atoms(atoms, frozen):
    current = frozenset(atoms)
    while True:
        seed = {term: term for atom in current for term in atom.args if term in frozen}
        for atom in sorted(current, key=lambda item: item.sort_key, reverse=True):
            retraction = next(find_homomorphisms(current, Instance(current - {atom}), seed), None)
            if retraction is not None:
                current = frozenset(item.substitute(retraction) for item in current)
                break
        else:
            return current


def core(structure, frozen=frozenset()):
    """
    Core of an instance, CQ or atom set, keeping `frozen` terms (and, for a
    CQ, its answer variables) fixed.
    """
    frozen = frozenset(frozen)
    if isinstance(structure, CQ):
        keep = frozen | frozenset(term for term in structure.free if isinstance(term, Variable))
        return CQ(_core_atoms(structure.atoms, keep), structure.free)
    if isinstance(structure, Instance):
        return Instance(_core_atoms(structure.atoms, frozen))
    return _core_atoms(structure, frozen)


def rename_apart(query, taken):
    """Rename bound variables of `query` away from the names in `taken`"""
    mapping = {}
    counter = 0
    for var in sort_terms(query.bound_vars):
        while f"V{counter}" in taken:
            counter += 1
        mapping[var] = Variable(f"V{counter}")
        counter += 1
    return CQ(frozenset(atom.substitute(mapping) for atom in query.atoms), query.free)
