import itertools
import re

from django.test import SimpleTestCase
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from reasoner.engine.chase import chase_bounded, models
from reasoner.engine.exceptions import ArityError, CountermodelBudgetExhausted, MergeError, TermNotFound
from reasoner.engine.homcore import CQ, cq_equivalent
from reasoner.engine.model import Atom, Constant, Instance, Null, Signature, Variable
from reasoner.engine.rpq import (
    Alternation,
    Concat,
    Maybe,
    Plus,
    Query,
    QueryKind,
    Star,
    Symbol,
    answers,
    build_countermodel,
    compile_regex,
    dfa_to_regex,
    enumerate_countermodel,
    eval_rpq,
    merge_terms,
    quotient,
    reduce_two_way,
    regular_type,
    regular_types,
    rpq_to_datalog,
    stellar_type,
    stellar_types,
    verify_countermodel,
)
from reasoner.engine.textio import parse_database, parse_query, parse_ruleset

from .strategies import BINARY, PREDICATES, databases, instances, regexes, stellar_rules, two_way_regexes

a, b, c = Constant("a"), Constant("b"), Constant("c")


def as_python_regex(regex):
    if isinstance(regex, Symbol):
        return regex.name.lower()
    if isinstance(regex, Concat):
        return "".join(f"(?:{as_python_regex(part)})" for part in regex.parts)
    if isinstance(regex, Alternation):
        return "|".join(f"(?:{as_python_regex(part)})" for part in regex.parts)
    suffix = {Star: "*", Plus: "+", Maybe: "?"}[type(regex)]
    return f"(?:{as_python_regex(regex.inner)}){suffix}"


def words(alphabet, max_length):
    for length in range(max_length + 1):
        yield from itertools.product(alphabet, repeat=length)


class AutomatonTests(SimpleTestCase):
    def test_concatenation_with_star(self):
        dfa = compile_regex(parse_query("E / F*").regex)
        self.assertTrue(dfa.accepts(("E",)))
        self.assertTrue(dfa.accepts(("E", "F", "F")))
        self.assertFalse(dfa.accepts(("F",)))
        self.assertFalse(dfa.accepts(()))
        self.assertEqual(dfa.start, 0)

    def test_inverse_letters_are_separate_labels(self):
        dfa = compile_regex(parse_query("^E / E").regex)
        self.assertEqual(dfa.alphabet, ("E", "^E"))
        self.assertTrue(dfa.accepts(("^E", "E")))
        self.assertFalse(dfa.accepts(("E", "E")))

    def test_unknown_labels_are_rejected(self):
        dfa = compile_regex(Symbol("E"))
        self.assertFalse(dfa.accepts(("G",)))

    def test_total_transition_function(self):
        dfa = compile_regex(parse_query("E / F").regex)
        for state in dfa.states:
            for label in dfa.alphabet:
                self.assertIn((state, label), dfa.delta)

    @settings(max_examples=60, deadline=None)
    @given(regexes())
    def test_dfa_agrees_with_python_regex(self, regex):
        dfa = compile_regex(regex)
        pattern = re.compile(as_python_regex(regex))
        for word in words(BINARY, 4):
            text = "".join(letter.lower() for letter in word)
            self.assertEqual(dfa.accepts(word), bool(pattern.fullmatch(text)), word)

    @settings(max_examples=40, deadline=None)
    @given(regexes())
    def test_state_elimination_keeps_the_language(self, regex):
        dfa = compile_regex(regex)
        rebuilt = compile_regex(dfa_to_regex(dfa))
        for word in words(BINARY, 4):
            self.assertEqual(dfa.accepts(word), rebuilt.accepts(word), word)


class EvaluationTests(SimpleTestCase):
    def setUp(self):
        self.database = parse_database("E(a, b). F(b, c). A(c).")

    def test_witness_path(self):
        result = eval_rpq(parse_query("E / F"), self.database)
        self.assertTrue(result.holds)
        self.assertEqual(result.witness.word, ("E", "F"))
        self.assertEqual((result.witness.start, result.witness.end), (a, c))
        self.assertEqual(str(result.witness), "E(a,b) ; F(b,c)")

    def test_missing_path(self):
        self.assertFalse(eval_rpq(parse_query("F / E"), self.database))

    def test_empty_path_counts(self):
        result = eval_rpq(parse_query("G*"), self.database)
        self.assertTrue(result.holds)
        self.assertEqual(result.witness.steps, ())

    def test_length_bound(self):
        self.assertFalse(eval_rpq(parse_query("E / F"), self.database, max_length=1).holds)
        self.assertTrue(eval_rpq(parse_query("E / F"), self.database, max_length=2).holds)

    def test_backward_steps(self):
        result = eval_rpq(parse_query("^F / ^E"), self.database)
        self.assertTrue(result.holds)
        self.assertEqual(result.witness.word, ("^F", "^E"))
        self.assertEqual(result.witness.as_dict()["steps"][0], {"atom": "F(b,c)", "inverse": True})

    def test_compiled_automaton_is_reused(self):
        query = parse_query("E / F")
        self.assertTrue(eval_rpq(query, self.database, dfa=compile_regex(query.regex)).holds)
        other = compile_regex(parse_query("F / E").regex)
        self.assertFalse(eval_rpq(query, self.database, dfa=other).holds)

    def test_non_binary_atoms_are_ignored(self):
        self.assertFalse(eval_rpq(Query(Symbol("A")), self.database).holds)

    def test_answers_for_free_endpoints(self):
        self.assertEqual(answers(parse_query("rpq(x,y): E / F"), self.database), {(a, c)})
        self.assertEqual(answers(parse_query("rpq(y): E / F"), self.database), {(c,)})
        self.assertEqual(answers(parse_query("E / F"), self.database), {()})
        self.assertEqual(answers(parse_query("F / F"), self.database), set())

    def test_higher_arity_atoms_use_their_first_two_positions(self):
        instance = Instance([Atom("IncX", (a, b, c))])
        self.assertTrue(eval_rpq(Query(Symbol("IncX"), QueryKind.HIGHER_ARITY), instance).holds)
        self.assertFalse(eval_rpq(Query(Symbol("IncX")), instance).holds)
        with self.assertRaises(ArityError):
            eval_rpq(Query(Symbol("A"), QueryKind.HIGHER_ARITY), self.database)


class ReductionTests(SimpleTestCase):
    def test_inverse_letters_become_fresh_predicates(self):
        query, rules = reduce_two_way(parse_query("^E / F"), [], Signature({"E": 2, "F": 2}))
        self.assertEqual(query.kind, QueryKind.PLAIN)
        self.assertEqual(query.regex, Concat((Symbol("E_inv"), Symbol("F"))))
        self.assertEqual(len(rules), 2)

    @settings(max_examples=50, deadline=None)
    @given(two_way_regexes(), databases())
    def test_two_way_reduction_preserves_answers(self, regex, database):
        query = Query(regex, QueryKind.TWO_WAY)
        reduced, rules = reduce_two_way(query, [], Signature(PREDICATES))
        completed = chase_bounded(database, rules, 2).instance
        self.assertEqual(eval_rpq(query, database).holds, eval_rpq(reduced, completed).holds)

    def test_datalog_program_shape(self):
        program = rpq_to_datalog(parse_query("E / F"), Signature({"E": 2, "F": 2, "Goal": 0}))
        self.assertEqual(program.goal, "Goal2")
        self.assertEqual(program.rules[0].label, "rpq_seed")
        self.assertFalse(program.rules[0].body)
        self.assertTrue(all(rule.is_datalog for rule in program.rules))

    @settings(max_examples=50, deadline=None)
    @given(regexes(), databases())
    def test_datalog_program_derives_the_goal_iff_the_query_holds(self, regex, database):
        query = Query(regex)
        program = rpq_to_datalog(query, Signature.from_atoms(database.atoms))
        trace = chase_bounded(database, program.rules, 100)
        self.assertTrue(trace.terminated)
        self.assertEqual(Atom(program.goal) in trace.instance, eval_rpq(query, database).holds)


def _same_type_pairs(types, terms):
    for first, second in itertools.combinations(sorted(terms, key=lambda term: term.sort_key), 2):
        if types.get(first) == types.get(second):
            yield first, second


class TypeTests(SimpleTestCase):
    def setUp(self):
        self.instance = Instance([
            Atom("E", (a, Null(1))), Atom("E", (a, Null(2))), Atom("F", (Null(1), b)),
        ])

    def test_stellar_type(self):
        self.assertEqual(stellar_type(Null(1), self.instance), frozenset({("E", 2), ("F", 1)}))
        self.assertEqual(stellar_types(self.instance)[Null(2)], frozenset({("E", 2)}))
        with self.assertRaises(TermNotFound):
            stellar_type(c, self.instance)

    def test_regular_type(self):
        dfa = compile_regex(parse_query("E / F").regex)
        first = regular_type(Null(1), self.instance, dfa)
        second = regular_type(Null(2), self.instance, dfa)
        self.assertNotEqual(first, second)
        self.assertEqual(regular_types(self.instance, dfa)[Null(2)], second)

    def test_merge_terms(self):
        merged = merge_terms(self.instance, Null(1), Null(2))
        self.assertEqual(len(merged), 2)
        self.assertIn(Atom("E", (a, Null(3))), merged)
        with self.assertRaises(MergeError):
            merge_terms(self.instance, a, Null(1))
        with self.assertRaises(MergeError):
            merge_terms(self.instance, Null(1), Null(1))
        with self.assertRaises(TermNotFound):
            merge_terms(self.instance, Null(1), Null(9))

    def test_quotient_keeps_constants(self):
        folded, mapping = quotient(self.instance, lambda term: "all")
        self.assertEqual(mapping[Null(1)], mapping[Null(2)])
        self.assertIn(Atom("E", (a, Null(3))), folded)
        self.assertNotIn(a, mapping)

    def test_most_specific_star_queries_tell_stellar_types_apart(self):
        types = stellar_types(self.instance)
        x = Variable("x")

        def star_query(found):
            atoms = []
            for index, (predicate, position) in enumerate(sorted(found)):
                args = [Variable(f"V{index}_{slot}") for slot in range(PREDICATES.get(predicate, 2))]
                args[position - 1] = x
                atoms.append(Atom(predicate, tuple(args)))
            return CQ(frozenset(atoms), (x,))

        for first, second in itertools.combinations(sorted(types, key=lambda term: term.sort_key), 2):
            self.assertEqual(
                cq_equivalent(star_query(types[first]), star_query(types[second])),
                types[first] == types[second],
            )

    @settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(regexes(), instances(), st.data())
    def test_merging_equal_regular_types_keeps_the_answer(self, regex, instance, data):
        dfa = compile_regex(regex)
        types = regular_types(instance, dfa)
        nulls = [term for term in instance.active_domain if isinstance(term, Null)]
        pairs = list(_same_type_pairs(types, nulls))
        assume(pairs)
        first, second = data.draw(st.sampled_from(pairs))
        query = Query(regex)
        merged = merge_terms(instance, first, second)
        self.assertEqual(eval_rpq(query, instance).holds, eval_rpq(query, merged).holds)

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(stellar_rules(), instances(max_atoms=8), st.data())
    def test_merging_equal_stellar_types_keeps_stellar_models(self, rule, instance, data):
        trace = chase_bounded(instance, [rule], 3)
        assume(models(trace.instance, [rule]))
        model = trace.instance
        types = stellar_types(model)
        candidates = [term for term in model.active_domain if not isinstance(term, Constant)]
        pairs = list(_same_type_pairs(types, candidates))
        assume(pairs)
        first, second = data.draw(st.sampled_from(pairs))
        self.assertTrue(models(merge_terms(model, first, second), [rule]))


class CountermodelTests(SimpleTestCase):
    def test_database_that_already_is_a_model(self):
        database = parse_database("E(a, b). F(a, b).")
        found = build_countermodel(database, parse_ruleset("E(X, Y) -> F(X, Y)."), parse_query("G"))
        self.assertEqual(found.method, "database")

    def test_folded_chase_for_an_infinite_chain(self):
        database = parse_database("E(a, b).")
        rules = parse_ruleset("E(X, Y) -> exists Z. E(Y, Z).")
        query = parse_query("F")
        found = build_countermodel(database, rules, query)
        self.assertEqual(verify_countermodel(found.instance, database, rules, query), [])
        self.assertIn(found.method, ("quotient", "enumeration"))

    def test_query_true_in_the_database(self):
        with self.assertRaises(CountermodelBudgetExhausted):
            build_countermodel(parse_database("E(a, b)."), [], parse_query("E"))

    def test_enumeration_spends_fresh_nulls(self):
        database = parse_database("A(a).")
        rules = parse_ruleset("A(X) -> exists Y. E(X, Y).")
        found = enumerate_countermodel(database, rules, parse_query("E / E"), max_nulls=2)
        self.assertEqual(found.method, "enumeration")
        self.assertEqual(found.rounds, 1)
        self.assertEqual(len(found.instance), 2)
        self.assertEqual(verify_countermodel(found.instance, database, rules, parse_query("E / E")), [])

    def test_enumeration_without_fresh_nulls(self):
        database = parse_database("A(a).")
        rules = parse_ruleset("A(X) -> exists Y. E(X, Y).")
        self.assertIsNone(enumerate_countermodel(database, rules, parse_query("E / E"), max_nulls=0))

    def test_verification_lists_every_problem(self):
        rules = parse_ruleset("A(X) -> exists Y. E(X, Y).")
        problems = verify_countermodel(parse_database("E(a, a)."), parse_database("A(a)."), rules, parse_query("E"))
        self.assertEqual(len(problems), 2)

    def test_enumeration_with_a_compiled_automaton(self):
        database = parse_database("A(a).")
        rules = parse_ruleset("A(X) -> exists Y. E(X, Y).")
        query = parse_query("E / E")
        dfa = compile_regex(query.regex)
        found = enumerate_countermodel(database, rules, query, max_nulls=2, dfa=dfa)
        self.assertEqual(verify_countermodel(found.instance, database, rules, query, dfa=dfa), [])
