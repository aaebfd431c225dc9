from dataclasses import replace

from django.test import SimpleTestCase

from reasoner.engine.catalog import CATALOG, by_name
from reasoner.engine.decide import (
    Entailed,
    NotEntailed,
    ResourceExhausted,
    budget_shares,
    build_pipeline,
    countermodel_search,
    decide_entailment,
    forward_search,
    frozen_bodies,
    prepare,
    stage_properties,
    verify_path,
)
from reasoner.engine.exceptions import NotStickyError, UnsupportedQuery
from reasoner.engine.model import Atom, Constant, Instance
from reasoner.engine.rpq import PathWitness, compile_regex, eval_rpq
from reasoner.engine.textio import parse_database, parse_problem, parse_query, parse_ruleset


def decide(case, **kwargs):
    bundle = case.bundle()
    return bundle, decide_entailment(
        bundle.database, bundle.rules, bundle.query, signature=bundle.signature, **kwargs
    )


class CatalogTests(SimpleTestCase):
    def test_catalog_is_balanced(self):
        self.assertEqual(len(CATALOG), 20)
        self.assertEqual(sum(case.entailed for case in CATALOG), 10)
        self.assertEqual(len({case.name for case in CATALOG}), 20)

    def test_every_case_gets_its_verdict(self):
        for case in CATALOG:
            with self.subTest(case=case.name):
                bundle, verdict = decide(case, budget_seconds=60)
                if case.entailed:
                    self.assertIsInstance(verdict, Entailed)
                    rules, query = prepare(bundle.database, bundle.rules, bundle.query, bundle.signature)
                    self.assertTrue(compile_regex(query.regex).accepts(verdict.path.word))
                else:
                    self.assertIsInstance(verdict, NotEntailed)
                    self.assertLessEqual(bundle.database.atoms, verdict.countermodel.atoms)
                    self.assertFalse(eval_rpq(bundle.query, verdict.countermodel).holds)

    def test_chase_level_of_the_witness(self):
        _, verdict = decide(by_name("database-edge"))
        self.assertEqual(verdict.chase_level, 0)
        _, verdict = decide(by_name("chain-three-steps"))
        self.assertEqual(verdict.chase_level, 2)

    def test_unknown_case(self):
        with self.assertRaises(KeyError):
            by_name("missing")


class VerdictTests(SimpleTestCase):
    def test_entailed_as_json(self):
        _, verdict = decide(by_name("database-edge"))
        data = verdict.to_dict()
        self.assertEqual(data["verdict"], "entailed")
        self.assertEqual(data["chase_level"], 0)
        self.assertEqual(data["path"], [{"atom": "E(a,b)", "inverse": False}])
        self.assertIn("elapsed_seconds", data)

    def test_not_entailed_as_json(self):
        _, verdict = decide(by_name("no-rules-short-path"))
        data = verdict.to_dict()
        self.assertEqual(data["verdict"], "not_entailed")
        self.assertEqual(data["countermodel_atoms"], len(data["countermodel"]))

    def test_exhausted_budget(self):
        _, verdict = decide(by_name("endless-chain-no-f"), budget_seconds=0)
        self.assertIsInstance(verdict, ResourceExhausted)
        self.assertEqual(len(verdict.reasons), 2)
        self.assertEqual(verdict.to_dict()["verdict"], "resource_exhausted")

    def test_bias_must_be_a_share(self):
        case = by_name("database-edge")
        with self.assertRaises(ValueError):
            decide(case, bias=1.5)

    def test_full_bias_still_answers(self):
        _, verdict = decide(by_name("chain-three-steps"), bias=1.0)
        self.assertIsInstance(verdict, Entailed)
        _, verdict = decide(by_name("one-step-then-stop"), bias=0.0)
        self.assertIsInstance(verdict, NotEntailed)


class RejectionTests(SimpleTestCase):
    def test_non_sticky_rulesets(self):
        bundle = parse_problem("E(X, Y), E(Y, Z) -> E(X, Z).", "E(a, b).", "E")
        with self.assertRaises(NotStickyError):
            decide_entailment(bundle.database, bundle.rules, bundle.query, budget_seconds=5)

    def test_higher_arity_queries(self):
        bundle = parse_problem("", "E(a, b).", "hrpq: E")
        with self.assertRaises(UnsupportedQuery):
            decide_entailment(bundle.database, bundle.rules, bundle.query, budget_seconds=5)

    def test_two_way_queries_are_reduced(self):
        bundle = by_name("back-along-f").bundle()
        rules, query = prepare(bundle.database, bundle.rules, bundle.query, bundle.signature)
        self.assertGreater(len(rules), len(bundle.rules))
        self.assertEqual(query.kind.value, "rpq")


class SemiProcedureTests(SimpleTestCase):
    def test_forward_search_on_a_terminating_chase(self):
        verdict = forward_search(parse_database("A(a)."), parse_ruleset("A(X) -> B(X)."), parse_query("E"))
        self.assertIsInstance(verdict, NotEntailed)
        self.assertEqual(verdict.method, "finite-chase")

    def test_countermodel_search(self):
        case = by_name("alternating-e-f")
        bundle = case.bundle()
        verdict = countermodel_search(bundle.database, bundle.rules, bundle.query)
        self.assertIsInstance(verdict, NotEntailed)

    def test_pipeline_stages(self):
        bundle = by_name("join-derived-c").bundle()
        artifacts = build_pipeline(bundle.database, bundle.rules, bundle.query)
        self.assertEqual(set(stage_properties(artifacts).values()), {True})
        self.assertLessEqual(bundle.database.atoms, artifacts.dplus.atoms)
        self.assertEqual(artifacts.datalog.goal, "Goal")

    def test_path_replay(self):
        database = parse_database("E(a, b). F(b, c).")
        dfa = compile_regex(parse_query("E / F").regex)
        good = eval_rpq(parse_query("E / F"), database).witness
        self.assertTrue(verify_path(good, database, dfa))
        broken = PathWitness(good.start, good.end, tuple(reversed(good.steps)))
        self.assertFalse(verify_path(broken, database, dfa))
        missing = PathWitness(good.start, good.end, ((Atom("E", (Constant("a"), Constant("c"))), False),))
        self.assertFalse(verify_path(missing, database, dfa))

    def test_forward_search_derives_the_goal(self):
        bundle = by_name("chain-three-steps").bundle()
        rules, query = prepare(bundle.database, bundle.rules, bundle.query, bundle.signature)
        verdict = forward_search(bundle.database, rules, query)
        self.assertIsInstance(verdict, Entailed)
        self.assertEqual(verdict.chase_level, 2)
        self.assertGreaterEqual(verdict.goal_level, verdict.chase_level)
        self.assertEqual(verdict.to_dict()["goal_level"], verdict.goal_level)

    def test_goal_of_a_database_edge_within_three_levels(self):
        verdict = forward_search(parse_database("E(a, b)."), [], parse_query("E"))
        self.assertEqual(verdict.chase_level, 0)
        self.assertLessEqual(verdict.goal_level, 3)

    def test_finite_chase_model_leaves_out_the_query_program(self):
        database = parse_database("A(a). E(a, b).")
        verdict = forward_search(database, parse_ruleset("A(X) -> B(X)."), parse_query("F"))
        self.assertIsInstance(verdict, NotEntailed)
        self.assertEqual(verdict.countermodel.predicates, {"A", "B", "E"})

    def test_stage_properties_sample_quickness(self):
        rules = parse_ruleset("A(X) -> exists Z. E(X, Z).\nE(X, Y), E(X, W) -> G(X).")
        artifacts = build_pipeline(parse_database("A(a)."), rules, parse_query("E"))
        properties = stage_properties(artifacts)
        self.assertLessEqual({"rew_quick", "cr_quick", "crplus_quick", "datalog_agrees"}, set(properties))
        self.assertEqual(set(properties.values()), {True})
        self.assertFalse(stage_properties(replace(artifacts, rew=rules))["rew_quick"])

    def test_frozen_bodies_read_variables_as_constants(self):
        rules = parse_ruleset("A(X) -> B(X).\nA(X) -> C(X).\nE(X, Y) -> F(Y, X).")
        samples = frozen_bodies(rules)
        self.assertEqual(len(samples), 2)
        self.assertIn(Instance([Atom("A", (Constant("c_x"),))]), samples)
        self.assertTrue(all(sample.is_database for sample in samples))


class BudgetShareTests(SimpleTestCase):
    def test_shares_follow_the_bias(self):
        shares = budget_shares(10.0, 0.25)
        self.assertAlmostEqual(shares[forward_search], 2.5)
        self.assertAlmostEqual(shares[countermodel_search], 7.5)

    def test_even_bias_halves_the_budget(self):
        shares = budget_shares(8.0, 0.5)
        self.assertEqual(set(shares.values()), {4.0})
        self.assertAlmostEqual(sum(shares.values()), 8.0)

    def test_full_bias_gives_one_task_everything(self):
        self.assertEqual(budget_shares(6.0, 1.0), {forward_search: 6.0, countermodel_search: 0.0})
