"""
Text formats for rulesets, databases/instances, queries and two-counter
automata, with serializers that parse back to equal values.

Ruleset:   Succ(X,X1) -> exists X2. Succ(X1,X2).
Database:  Succ(a,b).
Query:     2rpq: ^E / (F | G)*
CQ:        q(X) :- E(X,Y), F(Y).
TCA:       start q0. halt qh.
           state q0: if X == 0 then X += 1 goto qh else X -= 1 goto q0.
"""
import re
from dataclasses import dataclass

from .exceptions import ArityError, ParseError, RuleError, TcaError
from .homcore import CQ, UCQ
from .model import (
    Atom, Constant, Functional, Instance, MultiHeadRule, Null, Rule,
    Signature, SkolemSymbol, Variable, format_rule,
)
from .rpq import (
    Alternation, Concat, EmptyLanguage, EmptyWord, Maybe, Plus, Query,
    QueryKind, Star, Symbol, regex_symbols,
)
from .sticky import to_single_head
from .tca import TCA, Instruction

TOKEN_SPEC = [
    ("COMMENT", r"%[^\n]*"),
    ("NEWLINE", r"\n"),
    ("SPACE", r"[ \t\r]+"),
    ("ARROW", r"->"),
    ("NECK", r":-"),
    ("EQ", r"=="),
    ("PLUSEQ", r"\+="),
    ("MINUSEQ", r"-="),
    ("NULL", r"_n\d+"),
    ("NUMBER", r"[+-]?\d+"),
    ("STRING", r'"[^"\n]*"'),
    ("NAME", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[(),.|/*+?^:!@]"),
    ("MISMATCH", r"."),
]
TOKEN_RE = re.compile("|".join(f"(?P<{kind}>{pattern})" for kind, pattern in TOKEN_SPEC))
QUERY_HEADER_RE = re.compile(
    r"\s*(rpq|2rpq|hrpq)\s*(?:\(\s*([xy])?\s*(?:,\s*([xy])\s*)?\))?\s*:"
)
SKOLEM_NAME_RE = re.compile(r"f\d+$")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def tokenize(text):
    tokens = []
    line, line_start = 1, 0
    for match in TOKEN_RE.finditer(text):
        kind, value = match.lastgroup, match.group()
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line, line_start = line + 1, match.end()
            continue
        if kind in ("SPACE", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise ParseError(f"unexpected character {value!r}", line, column)
        tokens.append(Token(kind, value, line, column))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, signature=None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.signature = signature if signature is not None else Signature()

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, value=None, kind=None, offset=0):
        token = self.tokens[min(self.pos + offset, len(self.tokens) - 1)]
        if kind is not None and token.kind != kind:
            return False
        return value is None or token.value == value

    def advance(self):
        token = self.current
        if token.kind != "EOF":
            self.pos += 1
        return token

    def accept(self, value=None, kind=None):
        if self.peek(value, kind):
            return self.advance()
        return None

    def expect(self, value=None, kind=None):
        if not self.peek(value, kind):
            wanted = repr(value) if value is not None else kind
            found = self.current.value or "end of input"
            self.error(f"expected {wanted}, found {found!r}")
        return self.advance()

    def error(self, message, token=None):
        token = token or self.current
        raise ParseError(message, token.line, token.column)

    def at_end(self):
        return self.current.kind == "EOF"

    def declare(self, atom, token):
        try:
            self.signature.declare(atom.predicate, atom.arity)
        except ArityError as exc:
            self.error(str(exc), token)


# ==========================
# RULESETS
# ==========================

class _RuleParser(_Parser):
    def term(self):
        token = self.current
        if token.kind == "NULL":
            self.error("nulls are not allowed in rules")
        name = self.expect(kind="NAME").value
        if self.peek("("):
            self.error("function terms are not allowed in rules")
        return Variable(name) if name[0].isupper() else Constant(name)

    def atom(self):
        token = self.expect(kind="NAME")
        args = []
        if self.accept("("):
            if not self.peek(")"):
                args.append(self.term())
                while self.accept(","):
                    args.append(self.term())
            self.expect(")")
        atom = Atom(token.value, tuple(args))
        self.declare(atom, token)
        return atom

    def atoms(self):
        found = [self.atom()]
        while self.accept(","):
            found.append(self.atom())
        return found

    def statement(self, index):
        start = self.current
        body = [] if self.peek(kind="ARROW") else self.atoms()
        self.expect(kind="ARROW")
        existentials = []
        if self.peek("exists", "NAME") and self.peek(kind="NAME", offset=1) and not self.peek("(", offset=1):
            self.advance()
            existentials.append(self._variable())
            while self.accept(","):
                existentials.append(self._variable())
            self.expect(".")
        heads = self.atoms()
        self.expect(".")
        label = f"r{index}"
        try:
            if len(heads) == 1:
                return Rule(frozenset(body), heads[0], frozenset(existentials), label=label)
            return MultiHeadRule(frozenset(body), tuple(heads), frozenset(existentials), label=label)
        except RuleError as exc:
            self.error(str(exc), start)

    def _variable(self):
        token = self.expect(kind="NAME")
        if not token.value[0].isupper():
            self.error(f"existential {token.value!r} is not a variable", token)
        return Variable(token.value)

    def ruleset(self):
        self.starts = []
        rules = []
        while not self.at_end():
            self.starts.append(self.current)
            rules.append(self.statement(len(rules) + 1))
        return rules

    def single_head(self, rules):
        """Normalize multi-head statements, reporting failures at the statement"""
        normalized = []
        for rule, start in zip(rules, self.starts):
            try:
                normalized.extend(to_single_head([rule], self.signature))
            except RuleError as exc:
                self.error(str(exc), start)
        return normalized


def parse_ruleset(text, signature=None):
    """Parse rules; multi-head statements are normalized to single-head rules"""
    parser = _RuleParser(text, signature)
    rules = parser.ruleset()
    if any(isinstance(rule, MultiHeadRule) for rule in rules):
        rules = parser.single_head(rules)
    return rules


def serialize_rules(rules):
    return "".join(f"{format_rule(rule)}\n" for rule in rules)


# ==========================
# INSTANCES
# ==========================

class _InstanceParser(_Parser):
    def __init__(self, text, signature=None):
        super().__init__(text, signature)
        self.symbols = {}

    def directive(self):
        self.expect("@")
        keyword = self.expect(kind="NAME")
        if keyword.value != "skolem":
            self.error(f"unknown directive @{keyword.value}", keyword)
        name = self.expect(kind="NAME")
        if not SKOLEM_NAME_RE.match(name.value):
            self.error(f"Skolem symbols are named fK, got {name.value!r}", name)
        iso_id = self.expect(kind="STRING").value.strip('"')
        var = self.expect(kind="NAME").value
        arity = int(self.expect(kind="NUMBER").value)
        self.expect(".")
        self.symbols[name.value] = SkolemSymbol(iso_id, var, arity)

    def term(self):
        token = self.current
        if token.kind == "NULL":
            self.advance()
            return Null(int(token.value[2:]))
        name = self.expect(kind="NAME").value
        if self.peek("("):
            symbol = self.symbols.get(name)
            if symbol is None:
                self.error(f"undeclared Skolem symbol {name!r}", token)
            self.advance()
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
            if len(args) != symbol.arity:
                self.error(f"{name} expects {symbol.arity} arguments", token)
            return Functional(symbol, tuple(args))
        if name[0].isupper():
            self.error(f"variables are not allowed in facts: {name}", token)
        return Constant(name)

    def fact(self):
        token = self.expect(kind="NAME")
        args = []
        if self.accept("("):
            if not self.peek(")"):
                args.append(self.term())
                while self.accept(","):
                    args.append(self.term())
            self.expect(")")
        self.expect(".")
        atom = Atom(token.value, tuple(args))
        self.declare(atom, token)
        return atom

    def instance(self):
        atoms = []
        while not self.at_end():
            if self.peek("@"):
                self.directive()
            else:
                atoms.append(self.fact())
        return Instance(atoms)


def parse_instance(text, signature=None):
    return _InstanceParser(text, signature).instance()


def parse_database(text, signature=None):
    instance = parse_instance(text, signature)
    if not instance.is_database:
        raise ParseError("a database may only contain constants")
    return instance


def _skolem_symbols(instance):
    found = {}

    def visit(term):
        if isinstance(term, Functional):
            found.setdefault(term.symbol, None)
            for arg in term.args:
                visit(arg)

    for atom in instance.sorted_atoms():
        for term in atom.args:
            visit(term)
    ordered = sorted(found, key=lambda symbol: symbol.sort_key)
    return {symbol: f"f{index}" for index, symbol in enumerate(ordered, start=1)}


def format_term(term, names=None):
    if isinstance(term, Functional):
        inner = ",".join(format_term(arg, names) for arg in term.args)
        name = names[term.symbol] if names else f"f[{term.symbol.iso_type_id}]"
        return f"{name}({inner})"
    return str(term)


def format_atom(atom, names=None):
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({','.join(format_term(arg, names) for arg in atom.args)})"


def serialize_instance(instance):
    names = _skolem_symbols(instance)
    lines = [
        f'@skolem {name} "{symbol.iso_type_id}" {symbol.existential_var} {symbol.arity}.'
        for symbol, name in names.items()
    ]
    lines.extend(f"{format_atom(atom, names)}." for atom in instance.sorted_atoms())
    return "".join(f"{line}\n" for line in lines)


# ==========================
# CONJUNCTIVE QUERIES
# ==========================

class _ConjunctiveParser(_RuleParser):
    def disjunct(self):
        head = self.expect(kind="NAME")
        free = []
        if self.accept("("):
            if not self.peek(")"):
                free.append(self.term())
                while self.accept(","):
                    free.append(self.term())
            self.expect(")")
        self.expect(kind="NECK")
        atoms = [] if self.accept("true") else self.atoms()
        self.expect(".")
        try:
            return CQ(frozenset(atoms), tuple(free))
        except ValueError as exc:
            self.error(str(exc), head)

    def ucq(self):
        disjuncts = []
        while not self.at_end():
            token = self.current
            disjunct = self.disjunct()
            if disjuncts and len(disjunct.free) != len(disjuncts[0].free):
                self.error("all disjuncts must have the same number of answer terms", token)
            disjuncts.append(disjunct)
        if not disjuncts:
            self.error("empty query")
        return UCQ.of(*disjuncts)


def parse_ucq(text, signature=None):
    """Parse one CQ per statement, `q(X) :- E(X,Y), F(Y).`; together they form a UCQ"""
    return _ConjunctiveParser(text, signature).ucq()


def serialize_ucq(ucq):
    lines = []
    for disjunct in ucq:
        head = f"q({','.join(str(term) for term in disjunct.free)})" if disjunct.free else "q"
        body = ", ".join(format_atom(atom) for atom in disjunct.sorted_atoms()) or "true"
        lines.append(f"{head} :- {body}.")
    return "".join(f"{line}\n" for line in lines)


# ==========================
# QUERIES
# ==========================

class _QueryParser(_Parser):
    def __init__(self, text, kind, signature):
        super().__init__(text, signature)
        self.kind = kind
        self.inverse_seen = False

    def alternation(self):
        parts = [self.concat()]
        while self.accept("|"):
            parts.append(self.concat())
        return parts[0] if len(parts) == 1 else Alternation(tuple(parts))

    def concat(self):
        parts = [self.repeat()]
        while self.accept("/"):
            parts.append(self.repeat())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def repeat(self):
        inner = self.primary()
        if self.accept("*"):
            return Star(inner)
        if self.accept("+"):
            return Plus(inner)
        if self.accept("?"):
            return Maybe(inner)
        return inner

    def primary(self):
        if self.accept("("):
            if self.accept(")"):
                return EmptyWord()
            inner = self.alternation()
            self.expect(")")
            return inner
        if self.accept("!"):
            return EmptyLanguage()
        inverse = bool(self.accept("^"))
        token = self.expect(kind="NAME")
        if inverse:
            if self.kind is not None and self.kind != QueryKind.TWO_WAY:
                self.error("inverse symbols are only allowed in 2RPQs", token)
            self.inverse_seen = True
        self._check_symbol(token, inverse)
        return Symbol(token.value, inverse)

    def _check_symbol(self, token, inverse):
        arity = self.signature.arity(token.value)
        if self.kind == QueryKind.HIGHER_ARITY:
            if arity is not None and arity < 2:
                self.error(f"HRPQ predicate {token.value} has arity {arity} < 2", token)
            return
        if arity is not None and arity != 2:
            if inverse:
                self.error(f"'^' applied to non-binary predicate {token.value}", token)
            self.error(f"query predicate {token.value} is not binary", token)


def _blank(text, start, end):
    return text[:start] + re.sub(r"[^\n]", " ", text[start:end]) + text[end:]


def parse_query(text, signature=None, kind=None):
    """
    Parse a path query. An optional header `rpq:`, `2rpq:` or `hrpq:` (with
    optional free endpoints, e.g. `rpq(x,y):`) selects the kind; without one
    the query is a 2RPQ iff it uses `^`.
    """
    stripped = re.sub(r"%[^\n]*", lambda match: " " * len(match.group()), text)
    free = ()
    header = QUERY_HEADER_RE.match(stripped)
    if header:
        kind = {"rpq": QueryKind.PLAIN, "2rpq": QueryKind.TWO_WAY, "hrpq": QueryKind.HIGHER_ARITY}[header.group(1)]
        free = tuple(name for name in header.group(2, 3) if name)
        if len(set(free)) != len(free):
            raise ParseError("free endpoints must be distinct", 1, header.start(2) + 1)
        stripped = _blank(stripped, 0, header.end())
    parser = _QueryParser(stripped, kind, signature)
    if parser.at_end():
        parser.error("empty query")
    regex = parser.alternation()
    if not parser.at_end():
        parser.error(f"unexpected {parser.current.value!r}")
    if kind is None:
        kind = QueryKind.TWO_WAY if parser.inverse_seen else QueryKind.PLAIN
    default_arity = 2
    for name in sorted(regex_symbols(regex)):
        if name not in parser.signature:
            parser.signature.declare(name, default_arity)
    return Query(regex, kind, free)


PRECEDENCE = {Alternation: 0, Concat: 1}


def serialize_regex(regex, parent=0):
    if isinstance(regex, Symbol):
        return f"^{regex.name}" if regex.inverse else regex.name
    if isinstance(regex, EmptyWord):
        return "()"
    if isinstance(regex, EmptyLanguage):
        return "!"
    if isinstance(regex, (Star, Plus, Maybe)):
        inner = serialize_regex(regex.inner, 2)
        operator = {Star: "*", Plus: "+", Maybe: "?"}[type(regex)]
        if isinstance(regex.inner, (Star, Plus, Maybe)):
            inner = f"({inner})"
        return f"{inner}{operator}"
    level = PRECEDENCE[type(regex)]
    separator = " | " if isinstance(regex, Alternation) else " / "
    text = separator.join(serialize_regex(part, level + 1) for part in regex.parts)
    return f"({text})" if parent > level else text


def serialize_query(query):
    header = {QueryKind.PLAIN: "rpq", QueryKind.TWO_WAY: "2rpq", QueryKind.HIGHER_ARITY: "hrpq"}[query.kind]
    if query.free:
        header += f"({','.join(query.free)})"
    return f"{header}: {serialize_regex(query.regex)}\n"


# ==========================
# TWO-COUNTER AUTOMATA
# ==========================

class _TcaParser(_Parser):
    def counter(self):
        token = self.expect(kind="NAME")
        if token.value not in ("X", "Y"):
            self.error(f"unknown counter {token.value!r}", token)
        return token.value, token

    def update(self):
        counter, token = self.counter()
        operator = self.current
        if not (self.accept(kind="PLUSEQ") or self.accept(kind="MINUSEQ")):
            self.error("expected '+=' or '-='")
        amount = int(self.expect(kind="NUMBER").value)
        delta = amount if operator.kind == "PLUSEQ" else -amount
        if delta not in (-1, 1):
            self.error(f"counter update must be +1 or -1, got {delta:+d}", operator)
        return counter, delta, token

    def header(self, keyword):
        self.expect(keyword)
        state = self.expect(kind="NAME").value
        self.expect(".")
        return state

    def instruction(self):
        self.expect("state")
        state_token = self.expect(kind="NAME")
        self.expect(":")
        self.expect("if")
        counter, _ = self.counter()
        self.expect(kind="EQ")
        zero = self.expect(kind="NUMBER")
        if int(zero.value) != 0:
            self.error("only zero tests are supported", zero)
        self.expect("then")
        if not self.peek("goto"):
            then_counter, then_delta, token = self.update()
            if then_counter != counter or then_delta != 1:
                self.error(f"the then-branch always increments the tested counter {counter}", token)
        self.expect("goto")
        then_state = self.expect(kind="NAME").value
        self.expect("else")
        delta = 1
        if not self.peek("goto"):
            else_counter, delta, token = self.update()
            if else_counter != counter:
                self.error(f"the else-branch updates the tested counter {counter}", token)
        self.expect("goto")
        else_state = self.expect(kind="NAME").value
        self.expect(".")
        return state_token, Instruction(counter, delta, then_state, else_state)

    def tca(self):
        start = self.header("start")
        halt = self.header("halt")
        instructions = {}
        while not self.at_end():
            token, instruction = self.instruction()
            if token.value in instructions:
                self.error(f"state {token.value} has two instructions", token)
            instructions[token.value] = instruction
        try:
            return TCA(instructions, start, halt)
        except TcaError as exc:
            raise ParseError(str(exc)) from exc


def parse_tca(text):
    return _TcaParser(text).tca()


def serialize_tca(tca):
    lines = [f"start {tca.start}.", f"halt {tca.halt}."]
    for state in sorted(tca.instructions):
        instr = tca.instructions[state]
        operator = "+=" if instr.delta > 0 else "-="
        lines.append(
            f"state {state}: if {instr.counter} == 0 then {instr.counter} += 1 goto {instr.then_state} "
            f"else {instr.counter} {operator} 1 goto {instr.else_state}."
        )
    return "".join(f"{line}\n" for line in lines)


# ==========================
# PROBLEM BUNDLES
# ==========================

@dataclass(frozen=True)
class ProblemBundle:
    signature: Signature
    database: Instance
    rules: tuple
    query: Query


def parse_problem(ruleset_text, database_text, query_text):
    """Parse the three inputs of an entailment problem against one signature"""
    signature = Signature()
    rules = parse_ruleset(ruleset_text, signature)
    database = parse_database(database_text, signature)
    query = parse_query(query_text, signature)
    return ProblemBundle(signature, database, tuple(rules), query)

