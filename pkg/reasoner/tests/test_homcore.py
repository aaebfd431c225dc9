from django.test import SimpleTestCase
from hypothesis import given, settings

from reasoner.engine.homcore import (
    CQ,
    UCQ,
    core,
    cq_contained,
    cq_equivalent,
    eval_ucq,
    find_homomorphisms,
    holds,
    homomorphically_equivalent,
    maps_into,
    rename_apart,
)
from reasoner.engine.model import Atom, Constant, Instance, Null, Variable
from reasoner.engine.textio import parse_database, parse_ucq

from .strategies import instances

a, b, c = Constant("a"), Constant("b"), Constant("c")
X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")


def single(text):
    (disjunct,) = parse_ucq(text)
    return disjunct


class HomomorphismTests(SimpleTestCase):
    def test_all_homomorphisms_are_found(self):
        target = parse_database("E(a, b). E(b, c). E(c, a).")
        found = list(find_homomorphisms([Atom("E", (X, Y)), Atom("E", (Y, Z))], target))
        self.assertEqual(len(found), 3)
        self.assertIn({X: a, Y: b, Z: c}, found)

    def test_constants_are_fixed(self):
        self.assertFalse(maps_into([Atom("E", (a, X))], [Atom("E", (b, c))]))
        self.assertTrue(maps_into([Atom("E", (a, X))], [Atom("E", (a, c))]))

    def test_seed_restricts_the_search(self):
        target = parse_database("E(a, b). E(b, c).")
        found = list(find_homomorphisms([Atom("E", (X, Y))], target, {X: b}))
        self.assertEqual(found, [{X: b, Y: c}])

    def test_nulls_are_mapped_like_variables(self):
        instance = Instance([Atom("E", (a, Null(1)))])
        self.assertTrue(maps_into(instance, [Atom("E", (a, b))], {}))


class QueryEvaluationTests(SimpleTestCase):
    def setUp(self):
        self.database = parse_database("E(a, b). E(b, c). A(c).")

    def test_answers_of_a_path_query(self):
        query = single("q(X) :- E(X, Y), E(Y, Z).")
        self.assertEqual(eval_ucq(query, self.database), {(a,)})

    def test_boolean_queries_answer_the_empty_tuple(self):
        self.assertEqual(eval_ucq(single("q :- E(X, Y), A(Y)."), self.database), {()})
        self.assertEqual(eval_ucq(single("q :- A(X), E(X, Y)."), self.database), set())

    def test_union_collects_every_disjunct(self):
        query = parse_ucq("q(X) :- A(X).\nq(X) :- E(X, b).")
        self.assertEqual(eval_ucq(query, self.database), {(a,), (c,)})

    def test_empty_conjunction_always_holds(self):
        self.assertTrue(holds(single("q :- true."), Instance()))

    def test_constants_in_the_answer_tuple(self):
        query = CQ(frozenset([Atom("E", (a, Y))]), (a, Y))
        self.assertEqual(eval_ucq(query, self.database), {(a, b)})

    def test_disjuncts_are_deduplicated(self):
        query = single("q(X) :- A(X).")
        self.assertEqual(len(UCQ.of(query, query)), 1)


class ContainmentTests(SimpleTestCase):
    def test_longer_path_is_contained_in_shorter(self):
        longer = single("q(X) :- E(X, Y), E(Y, Z).")
        shorter = single("q(X) :- E(X, Y).")
        self.assertTrue(cq_contained(longer, shorter))
        self.assertFalse(cq_contained(shorter, longer))

    def test_answer_positions_matter(self):
        forward = single("q(X) :- E(X, Y).")
        backward = single("q(Y) :- E(X, Y).")
        self.assertFalse(cq_equivalent(forward, backward))

    def test_redundant_atoms_do_not_change_the_query(self):
        redundant = single("q(X) :- E(X, Y), E(X, Z).")
        self.assertTrue(cq_equivalent(redundant, single("q(X) :- E(X, Y).")))

    def test_different_arities_are_never_contained(self):
        self.assertFalse(cq_contained(single("q(X) :- A(X)."), single("q :- A(X).")))


class CoreTests(SimpleTestCase):
    def test_core_of_a_query_keeps_answer_variables(self):
        query = single("q(Y, Z) :- E(X, Y), E(X, Z).")
        self.assertEqual(core(query), query)
        self.assertEqual(len(core(single("q(X) :- E(X, Y), E(X, Z).")).atoms), 1)

    def test_core_of_an_instance_folds_nulls(self):
        instance = Instance([Atom("E", (a, Null(1))), Atom("E", (a, b))])
        self.assertEqual(core(instance), Instance([Atom("E", (a, b))]))

    def test_frozen_terms_are_kept(self):
        atoms = frozenset([Atom("E", (X, Y)), Atom("E", (X, Z))])
        self.assertEqual(core(atoms, frozen={Y, Z}), atoms)

    def test_rename_apart_keeps_answer_variables(self):
        query = single("q(X) :- E(X, Y), E(Y, Z).")
        renamed = rename_apart(query, {"Y", "V0"})
        self.assertEqual(renamed.free, (X,))
        self.assertFalse({var.name for var in renamed.bound_vars} & {"Y", "Z", "V0"})
        self.assertTrue(cq_equivalent(query, renamed))

    @settings(max_examples=40, deadline=None)
    @given(instances(max_atoms=8))
    def test_core_is_an_equivalent_subinstance(self, instance):
        folded = core(instance)
        self.assertLessEqual(folded.atoms, instance.atoms)
        self.assertTrue(homomorphically_equivalent(instance, folded))
