"""
Symbolic data model shared by the whole engine: terms, atoms, instances,
rules, signatures and isomorphism types.

All values are immutable once built, so they can be handed to concurrent
searches without copying.
"""
import hashlib
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .exceptions import ArityError, RuleError


# ==========================
# TERMS
# ==========================

@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return self.name

    @property
    def sort_key(self):
        return (0, self.name)


@dataclass(frozen=True)
class Null:
    id: int

    def __str__(self):
        return f"_n{self.id}"

    @property
    def sort_key(self):
        return (1, self.id)


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name

    @property
    def sort_key(self):
        return (2, self.name)


@dataclass(frozen=True)
class SkolemSymbol:
    """The function symbol f_z^tau: one per (iso type, existential variable, arity)"""
    iso_type_id: str
    existential_var: str
    arity: int

    @property
    def sort_key(self):
        return (self.iso_type_id, self.existential_var, self.arity)


@dataclass(frozen=True)
class Functional:
    symbol: SkolemSymbol
    args: tuple
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.args) != self.symbol.arity:
            raise ArityError(
                f"Skolem symbol of arity {self.symbol.arity} applied to {len(self.args)} terms"
            )
        object.__setattr__(self, "_hash", hash((self.symbol, self.args)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        inner = ",".join(str(arg) for arg in self.args)
        return f"f[{self.symbol.iso_type_id}.{self.symbol.existential_var}]({inner})"

    @cached_property
    def sort_key(self):
        return (3, self.symbol.sort_key, tuple(arg.sort_key for arg in self.args))

    @cached_property
    def depth(self):
        return 1 + max((getattr(arg, "depth", 0) for arg in self.args), default=0)


def is_constant(term):
    return isinstance(term, Constant)


def is_variable(term):
    return isinstance(term, Variable)


# ==========================
# ATOMS
# ==========================

@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    @property
    def arity(self):
        return len(self.args)

    @cached_property
    def sort_key(self):
        return (self.predicate, tuple(arg.sort_key for arg in self.args))

    @cached_property
    def terms(self):
        return frozenset(self.args)

    @cached_property
    def variables(self):
        return frozenset(arg for arg in self.args if isinstance(arg, Variable))

    def substitute(self, mapping):
        return Atom(self.predicate, tuple(mapping.get(arg, arg) for arg in self.args))

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(arg) for arg in self.args)})"


def sort_atoms(atoms):
    return sorted(atoms, key=lambda atom: atom.sort_key)


def sort_terms(terms):
    return sorted(terms, key=lambda term: term.sort_key)


# ==========================
# INSTANCES
# ==========================

@dataclass(frozen=True)
class Instance:
    """A finite set of atoms with lazily built lookup indexes"""
    atoms: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.atoms, frozenset):
            object.__setattr__(self, "atoms", frozenset(self.atoms))

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __contains__(self, atom):
        return atom in self.atoms

    def __or__(self, other):
        return self.union(other)

    def union(self, atoms):
        atoms = frozenset(atoms)
        if atoms <= self.atoms:
            return self
        return Instance(self.atoms | atoms)

    @cached_property
    def _by_predicate(self):
        index = defaultdict(list)
        for atom in self.atoms:
            index[atom.predicate].append(atom)
        return {predicate: tuple(sort_atoms(group)) for predicate, group in index.items()}

    @cached_property
    def _by_position(self):
        index = defaultdict(list)
        for atom in self.atoms:
            for position, term in enumerate(atom.args):
                index[(atom.predicate, position, term)].append(atom)
        return {key: tuple(group) for key, group in index.items()}

    def by_predicate(self, predicate):
        return self._by_predicate.get(predicate, ())

    def lookup(self, predicate, position, term):
        """Atoms of `predicate` carrying `term` at the 0-based `position`"""
        return self._by_position.get((predicate, position, term), ())

    @cached_property
    def active_domain(self):
        return frozenset(term for atom in self.atoms for term in atom.args)

    @cached_property
    def predicates(self):
        return frozenset(self._by_predicate)

    @property
    def is_database(self):
        return all(isinstance(term, Constant) for term in self.active_domain)

    def sorted_atoms(self):
        return sort_atoms(self.atoms)

    def substitute(self, mapping):
        return Instance(atom.substitute(mapping) for atom in self.atoms)

    def max_null_id(self):
        ids = [term.id for term in self.active_domain if isinstance(term, Null)]
        return max(ids, default=0)

    def __str__(self):
        return "{" + ", ".join(str(atom) for atom in self.sorted_atoms()) + "}"


def active_domain(instance):
    return instance.active_domain


def restrict(instance, terms):
    terms = frozenset(terms)
    return Instance(atom for atom in instance if atom.terms <= terms)


class NullFactory:
    """Hands out nulls numbered after the largest id already in use"""

    def __init__(self, start=0):
        self._counter = itertools.count(start + 1)

    @classmethod
    def after(cls, instance):
        return cls(instance.max_null_id())

    def fresh(self):
        return Null(next(self._counter))


# ==========================
# RULES
# ==========================

def _ordered_variables(atoms):
    seen = {}
    for atom in atoms:
        for term in atom.args:
            if isinstance(term, Variable):
                seen.setdefault(term, None)
    return tuple(seen)


@dataclass(frozen=True)
class Rule:
    """
    A single-head existential rule  body -> exists Z. head.
    An empty body is allowed; its head variables then range over the
    active domain (used to seed automaton states).
    """
    body: frozenset
    head: Atom
    existential_vars: frozenset = frozenset()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not isinstance(self.body, frozenset):
            object.__setattr__(self, "body", frozenset(self.body))
        if not isinstance(self.existential_vars, frozenset):
            object.__setattr__(self, "existential_vars", frozenset(self.existential_vars))
        for atom in (*self.body, self.head):
            for term in atom.args:
                if not isinstance(term, (Variable, Constant)):
                    raise RuleError(f"rule atoms may only hold variables and constants: {atom}")
        clash = self.existential_vars & self.body_vars
        if clash:
            names = ", ".join(sorted(var.name for var in clash))
            raise RuleError(f"existential variable used in body: {names}")
        missing = self.existential_vars - self.head.variables
        if missing:
            names = ", ".join(sorted(var.name for var in missing))
            raise RuleError(f"existential variable absent from head: {names}")
        if self.body:
            loose = self.head.variables - self.body_vars - self.existential_vars
            if loose:
                names = ", ".join(sorted(var.name for var in loose))
                raise RuleError(f"head variable neither frontier nor existential: {names}")

    @cached_property
    def sorted_body(self):
        return tuple(sort_atoms(self.body))

    @cached_property
    def body_vars(self):
        return frozenset(var for atom in self.body for var in atom.variables)

    @cached_property
    def frontier(self):
        return self.head.variables & self.body_vars

    @cached_property
    def frontier_tuple(self):
        """Frontier variables in order of first occurrence in the head"""
        return tuple(var for var in _ordered_variables([self.head]) if var in self.frontier)

    @cached_property
    def domain_vars(self):
        return self.head.variables - self.body_vars - self.existential_vars

    @cached_property
    def join_vars(self):
        counts = defaultdict(int)
        for atom in self.body:
            for term in atom.args:
                if isinstance(term, Variable):
                    counts[term] += 1
        return frozenset(var for var, count in counts.items() if count > 1)

    @property
    def is_datalog(self):
        return not self.existential_vars

    def __str__(self):
        return format_rule(self)


@dataclass(frozen=True)
class MultiHeadRule:
    body: frozenset
    heads: tuple
    existential_vars: frozenset = frozenset()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "body", frozenset(self.body))
        object.__setattr__(self, "existential_vars", frozenset(self.existential_vars))
        object.__setattr__(self, "heads", tuple(self.heads))
        if not self.heads:
            raise RuleError("rule without head atoms")

    @cached_property
    def body_vars(self):
        return frozenset(var for atom in self.body for var in atom.variables)

    @cached_property
    def frontier_tuple(self):
        return tuple(var for var in _ordered_variables(self.heads) if var in self.body_vars)


def format_atoms(atoms):
    return ", ".join(str(atom) for atom in atoms)


def format_rule(rule):
    body = format_atoms(rule.sorted_body)
    heads = rule.heads if isinstance(rule, MultiHeadRule) else (rule.head,)
    quantifier = ""
    if rule.existential_vars:
        names = ",".join(str(var) for var in sort_terms(rule.existential_vars))
        quantifier = f"exists {names}. "
    arrow = f"{body} -> " if body else "-> "
    return f"{arrow}{quantifier}{format_atoms(heads)}."


# ==========================
# SIGNATURES
# ==========================

class Signature:
    """Mapping predicate name -> arity, grown with consistency checks"""

    def __init__(self, arities=None):
        self._arities = dict(arities or {})

    @classmethod
    def from_atoms(cls, atoms, base=None):
        signature = cls(base._arities if base else None)
        for atom in atoms:
            signature.declare(atom.predicate, atom.arity)
        return signature

    @classmethod
    def from_rules(cls, rules, base=None):
        atoms = []
        for rule in rules:
            atoms.extend(rule.body)
            atoms.extend(rule.heads if isinstance(rule, MultiHeadRule) else (rule.head,))
        return cls.from_atoms(atoms, base)

    def declare(self, predicate, arity):
        known = self._arities.get(predicate)
        if known is not None and known != arity:
            raise ArityError(f"predicate {predicate} used with arity {arity}, declared {known}")
        self._arities[predicate] = arity

    def merge(self, other):
        merged = Signature(self._arities)
        for predicate, arity in other.items():
            merged.declare(predicate, arity)
        return merged

    def arity(self, predicate):
        return self._arities.get(predicate)

    def items(self):
        return sorted(self._arities.items())

    def __contains__(self, predicate):
        return predicate in self._arities

    def __iter__(self):
        return iter(sorted(self._arities))

    def __len__(self):
        return len(self._arities)

    def __eq__(self, other):
        return isinstance(other, Signature) and self._arities == other._arities

    def binary_predicates(self):
        return [predicate for predicate, arity in self.items() if arity == 2]

    def fresh_predicate(self, stem):
        candidate, suffix = stem, 1
        while candidate in self._arities:
            suffix += 1
            candidate = f"{stem}{suffix}"
        return candidate

    def __repr__(self):
        return f"Signature({dict(self.items())})"


# ==========================
# ISOMORPHISM TYPES
# ==========================

@dataclass(frozen=True)
class IsoType:
    key: str

    @cached_property
    def id(self):
        return hashlib.sha1(self.key.encode()).hexdigest()[:10]


def _token(term, colors, fixed):
    if term in fixed:
        return ("f", fixed[term])
    if term in colors:
        return ("v", colors[term])
    return ("c", str(term))


def _refine(atoms, colors, fixed):
    """Color refinement over the variable/atom incidence structure"""
    occurrences = defaultdict(list)
    for atom in atoms:
        for position, term in enumerate(atom.args):
            if term in colors:
                occurrences[term].append((atom, position))
    while True:
        signatures = {}
        for var in colors:
            context = sorted(
                (atom.predicate, position, tuple(_token(arg, colors, fixed) for arg in atom.args))
                for atom, position in occurrences[var]
            )
            signatures[var] = (colors[var], tuple(context))
        ranking = {sig: rank for rank, sig in enumerate(sorted(set(signatures.values())))}
        refined = {var: ranking[sig] for var, sig in signatures.items()}
        if len(set(refined.values())) == len(set(colors.values())):
            return refined
        colors = refined


def _complete_namings(atoms, colors, fixed):
    classes = defaultdict(list)
    for var, color in colors.items():
        classes[color].append(var)
    ties = [color for color, members in classes.items() if len(members) > 1]
    if not ties:
        yield colors
        return
    color = min(ties)
    for var in sort_terms(classes[color]):
        split = {other: 2 * value for other, value in colors.items()}
        split[var] = 2 * color - 1
        yield from _complete_namings(atoms, _refine(atoms, split, fixed), fixed)


def _encode(atoms, naming, fixed):
    rendered = []
    for atom in atoms:
        parts = []
        for term in atom.args:
            if term in fixed:
                parts.append(fixed[term])
            elif term in naming:
                parts.append(f"v{naming[term]}")
            else:
                parts.append(f"'{term}'")
        rendered.append(f"{atom.predicate}({','.join(parts)})")
    return tuple(sorted(set(rendered)))


def canonical_form(atoms, free=()):
    """
    Canonical form of a conjunction of atoms up to bijective renaming of its
    non-free variables. Free terms are labelled by the position of their
    first occurrence in `free`, so the identification pattern is part of the
    type. Returns the IsoType and the canonical renaming of bound variables.
    """
    atoms = tuple(atoms)
    fixed = {}
    for index, term in enumerate(free):
        fixed.setdefault(term, f"#{index}")
    movable = {
        term for atom in atoms for term in atom.args
        if isinstance(term, Variable) and term not in fixed
    }
    colors = _refine(atoms, {var: 0 for var in movable}, fixed) if movable else {}
    best = None
    for naming in _complete_namings(atoms, colors, fixed):
        encoded = _encode(atoms, naming, fixed)
        if best is None or encoded < best[0]:
            best = (encoded, naming)
    encoded, naming = best
    pattern = ",".join(fixed[term] for term in free)
    iso = IsoType("&".join(encoded) + "|" + pattern)
    return iso, {var: Variable(f"v{rank}") for var, rank in naming.items()}


def iso_type(atoms, free=()):
    return canonical_form(atoms, free)[0]
