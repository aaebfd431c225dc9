from django.test import SimpleTestCase, override_settings

from reasoner.engine.budget import Budget
from reasoner.engine.chase import (
    ChaseRunner,
    chase_bounded,
    chase_step,
    check_quick_sample,
    models,
    skolemize,
    unsatisfied_triggers,
)
from reasoner.engine.exceptions import BudgetExpired, ChaseLimitExceeded
from reasoner.engine.model import Atom, Constant, Functional, Instance, Null, Variable
from reasoner.engine.textio import parse_database, parse_ruleset

a, b = Constant("a"), Constant("b")
X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")

SUCCESSOR = "Succ(X, X1) -> exists X2. Succ(X1, X2)."
TRANSITIVE = "E(X, Y), E(Y, Z) -> E(X, Z)."


class SkolemizationTests(SimpleTestCase):
    def test_existentials_become_functional_terms(self):
        (atom,) = skolemize([Atom("E", (X, Z))], {Z}, {X: a})
        self.assertEqual(atom.args[0], a)
        self.assertIsInstance(atom.args[1], Functional)
        self.assertEqual(atom.args[1].args, (a,))

    def test_isomorphic_heads_share_skolem_terms(self):
        first = skolemize([Atom("E", (X, Z))], {Z}, {X: a})
        second = skolemize([Atom("E", (Y, Variable("W")))], {Variable("W")}, {Y: a})
        self.assertEqual(first, second)

    def test_different_heads_get_different_terms(self):
        first = skolemize([Atom("E", (X, Z))], {Z}, {X: a})
        second = skolemize([Atom("E", (Z, X))], {Z}, {X: a})
        (left,), (right,) = first, second
        self.assertNotEqual(left.args[1], right.args[0])

    def test_collapsed_frontier_matches_the_repeated_variable_head(self):
        spread = skolemize([Atom("G", (X, Y, Z))], {Z}, {X: a, Y: a})
        repeated = skolemize([Atom("G", (X, X, Z))], {Z}, {X: a})
        self.assertEqual(spread, repeated)

    def test_distinct_frontier_values_are_not_identified(self):
        spread = skolemize([Atom("G", (X, Y, Z))], {Z}, {X: a, Y: b})
        repeated = skolemize([Atom("G", (X, X, Z))], {Z}, {X: a})
        self.assertNotEqual(spread, repeated)

    def test_datalog_heads_are_just_substituted(self):
        self.assertEqual(skolemize([Atom("E", (Y, X))], set(), {X: a, Y: b}), {Atom("E", (b, a))})


class ChaseTests(SimpleTestCase):
    def test_levels_of_the_successor_chain(self):
        trace = chase_bounded(parse_database("Succ(a, b)."), parse_ruleset(SUCCESSOR), 3)
        self.assertEqual(trace.depth, 3)
        self.assertFalse(trace.terminated)
        self.assertEqual(len(trace.instance), 4)
        self.assertEqual([len(level) for level in trace.levels], [1, 1, 1, 1])

    def test_birth_atoms_and_inherited_terms(self):
        trace = chase_bounded(parse_database("Succ(a, b)."), parse_ruleset(SUCCESSOR), 1)
        (atom,) = trace.at(1)
        fresh = atom.args[1]
        self.assertEqual(trace.birth[fresh], atom)
        self.assertEqual(trace.frontier_terms[atom], (b,))
        self.assertEqual(trace.level_of(atom), 1)

    def test_datalog_chase_terminates(self):
        database = parse_database("E(a, b). E(b, c).")
        trace = chase_bounded(database, parse_ruleset(TRANSITIVE), 10)
        self.assertTrue(trace.terminated)
        self.assertEqual(trace.depth, 1)
        self.assertIn(Atom("E", (a, Constant("c"))), trace.instance)

    def test_delta_chase_agrees_with_naive_steps(self):
        database = parse_database("E(a, b). E(b, c). E(c, d). A(a).")
        rules = parse_ruleset(TRANSITIVE + "\nA(X), E(X, Y) -> exists Z. F(Y, Z).")
        naive = database
        for _ in range(3):
            naive = chase_step(naive, rules)
        self.assertEqual(chase_bounded(database, rules, 3).instance, naive)

    def test_empty_body_rules_range_over_the_active_domain(self):
        instance = chase_step(parse_database("A(a). A(b)."), parse_ruleset("-> Q(X)."))
        self.assertIn(Atom("Q", (a,)), instance)
        self.assertIn(Atom("Q", (b,)), instance)

    def test_atom_limit(self):
        with self.assertRaises(ChaseLimitExceeded) as caught:
            chase_bounded(parse_database("Succ(a, b)."), parse_ruleset(SUCCESSOR), 5, max_atoms=2)
        self.assertEqual(caught.exception.trace.depth, 2)

    def test_zero_atom_limit_is_not_the_default(self):
        runner = ChaseRunner(parse_database("Succ(a, b)."), parse_ruleset(SUCCESSOR), max_atoms=0)
        with self.assertRaises(ChaseLimitExceeded):
            runner.advance()

    @override_settings(REASONER={"CHASE_MAX_ATOMS": 3})
    def test_atom_limit_from_settings(self):
        runner = ChaseRunner(parse_database("Succ(a, b)."), parse_ruleset(SUCCESSOR))
        runner.advance()
        runner.advance()
        with self.assertRaises(ChaseLimitExceeded):
            runner.advance()

    def test_expired_budget_stops_the_chase(self):
        budget = Budget(0)
        with self.assertRaises(BudgetExpired):
            chase_bounded(parse_database("Succ(a, b)."), parse_ruleset(SUCCESSOR), 3, budget=budget)

    def test_advance_after_the_fixpoint(self):
        runner = ChaseRunner(parse_database("E(a, b)."), parse_ruleset(TRANSITIVE))
        self.assertFalse(runner.advance())
        self.assertTrue(runner.terminated)
        self.assertFalse(runner.advance())


class ModelTests(SimpleTestCase):
    def test_unsatisfied_existential_trigger(self):
        rules = parse_ruleset("A(X) -> exists Y. E(X, Y).")
        instance = parse_database("A(a).")
        self.assertEqual(len(list(unsatisfied_triggers(instance, rules))), 1)
        self.assertFalse(models(instance, rules))
        self.assertTrue(models(instance | [Atom("E", (a, Null(1)))], rules))

    def test_terminated_chase_is_a_model(self):
        rules = parse_ruleset(TRANSITIVE)
        trace = chase_bounded(parse_database("E(a, b). E(b, c). E(c, a)."), rules, 10)
        self.assertTrue(trace.terminated)
        self.assertTrue(models(trace.instance, rules))


class QuicknessTests(SimpleTestCase):
    def test_existential_chain_is_quick(self):
        rules = parse_ruleset("A(X) -> exists Y. E(X, Y).\nE(X, Y) -> B(Y).")
        self.assertTrue(check_quick_sample(rules, [parse_database("A(a). A(b).")]).quick)

    def test_transitive_closure_is_not_quick(self):
        rules = parse_ruleset(TRANSITIVE)
        report = check_quick_sample(rules, [parse_database("E(a, b). E(b, c). E(c, d).")])
        self.assertFalse(report.quick)
        self.assertIn((0, Atom("E", (a, Constant("d")))), report.violations)

    def test_explicit_depth_is_honored(self):
        rules = parse_ruleset(TRANSITIVE)
        sample = [parse_database("E(a, b). E(b, c). E(c, d).")]
        self.assertTrue(check_quick_sample(rules, sample, depth=0).quick)
        self.assertTrue(check_quick_sample(rules, sample, depth=1).quick)
        self.assertFalse(check_quick_sample(rules, sample, depth=2).quick)

    @override_settings(REASONER={"QUICK_SAMPLE_DEPTH": 1})
    def test_depth_from_settings(self):
        rules = parse_ruleset(TRANSITIVE)
        self.assertTrue(check_quick_sample(rules, [parse_database("E(a, b). E(b, c). E(c, d).")]).quick)


class BudgetTests(SimpleTestCase):
    def test_budget_sharing(self):
        parent = Budget(0)
        self.assertTrue(parent.share(100).expired())
        child = Budget.unlimited().share(None)
        self.assertEqual(child.remaining(), float("inf"))
        child.cancel.set()
        self.assertTrue(child.expired())
