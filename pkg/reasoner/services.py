"""
Report builders shared by the API views and the management commands.
Each takes parsed engine values and returns plain JSON-ready data.
"""
import logging

from .engine.budget import Budget
from .engine.chase import chase_bounded, unsatisfied_triggers
from .engine.decide import build_pipeline, decide_entailment, prepare
from .engine.exceptions import NotStickyError
from .engine.model import Signature, sort_atoms
from .engine.rewrite import (
    add_stellar_variants,
    core_rule_bodies,
    prune_multijoin,
    rewrite_rule_bodies,
    rewrite_ucq,
    saturate_database,
)
from .engine.rpq import answers, build_countermodel, eval_rpq
from .engine.sticky import check_sticky, is_joinless, is_stellar
from .engine.tca import encode_tca, grid_instance, verify_three_step_correspondence
from .engine.textio import (
    ProblemBundle,
    format_atom,
    parse_database,
    parse_instance,
    parse_query,
    parse_ruleset,
    parse_ucq,
    serialize_instance,
    serialize_query,
    serialize_rules,
    serialize_ucq,
)

logger = logging.getLogger(__name__)

STAGES = ("rew", "cr", "crplus", "rplus", "dplus")


def parse_inputs(ruleset=None, database=None, query=None, instance=False, ucq=False):
    """
    Parse whichever inputs are given against one shared signature. With
    `instance` the database may hold nulls and Skolem terms; with `ucq` the
    query is a union of conjunctive queries instead of a path query.
    """
    signature = Signature()
    rules = tuple(parse_ruleset(ruleset, signature)) if ruleset is not None else ()
    if database is None:
        facts = parse_database("", signature)
    elif instance:
        facts = parse_instance(database, signature)
    else:
        facts = parse_database(database, signature)
    parsed_query = None
    if query is not None:
        parsed_query = parse_ucq(query, signature) if ucq else parse_query(query, signature)
    return ProblemBundle(signature, facts, rules, parsed_query)


def sticky_report(rules):
    report = check_sticky(rules)
    return {
        "sticky": report.sticky,
        "violation": report.violation,
        "marking": report.marking.as_dict() if report.marking else None,
        "marking_table": report.marking.table() if report.marking else "",
        "joinless": is_joinless(rules),
        "non_stellar_rules": [rule.label for rule in rules if not is_stellar(rule)],
    }


def chase_report(database, rules, steps):
    trace = chase_bounded(database, rules, steps)
    return {
        "depth": trace.depth,
        "terminated": trace.terminated,
        "atoms": len(trace.instance),
        "levels": [[format_atom(atom) for atom in sort_atoms(level)] for level in trace.levels],
        "instance": serialize_instance(trace.instance),
    }


def rewrite_report(ucq, rules):
    _require_sticky(rules)
    rewriting = rewrite_ucq(ucq, rules)
    return {"disjuncts": len(rewriting), "ucq": serialize_ucq(rewriting)}


def _require_sticky(rules):
    report = check_sticky(rules)
    if not report.sticky:
        raise NotStickyError(report.violation)


def transform_stage(database, rules, stage):
    """The ruleset (or, for dplus, the database) produced by a pipeline stage, as text"""
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}, expected one of {', '.join(STAGES)}")
    _require_sticky(rules)
    staged = rewrite_rule_bodies(rules)
    if stage == "rew":
        return serialize_rules(staged)
    staged = core_rule_bodies(staged)
    if stage == "cr":
        return serialize_rules(staged)
    staged = add_stellar_variants(staged)
    if stage == "crplus":
        return serialize_rules(staged)
    if stage == "rplus":
        return serialize_rules(prune_multijoin(staged))
    return serialize_instance(saturate_database(database, staged))


def eval_report(query, instance, max_length=None):
    result = eval_rpq(query, instance, max_length)
    report = {
        "holds": result.holds,
        "witness": result.witness.as_dict() if result.witness else None,
        "witness_text": str(result.witness) if result.witness else "",
    }
    if query.free:
        report["answers"] = sorted([str(term) for term in answer] for answer in answers(query, instance))
    return report


def countermodel_report(database, rules, query, budget_seconds=None):
    """Search a countermodel for the (2)RPQ and verify it against D+ and R+"""
    budget = Budget(budget_seconds)
    rules, query = prepare(database, rules, query)
    artifacts = build_pipeline(database, rules, query, budget)
    found = build_countermodel(artifacts.dplus, artifacts.rplus, query, budget=budget)
    candidate = found.instance
    checks = {
        "contains_database": artifacts.dplus.atoms <= candidate.atoms,
        "models_rules": next(unsatisfied_triggers(candidate, artifacts.rplus), None) is None,
        "query_fails": not eval_rpq(query, candidate).holds,
    }
    logger.info(f"Countermodel by {found.method}: {len(candidate)} atoms, checks {checks}")
    return {
        "method": found.method,
        "rounds": found.rounds,
        "atoms": len(candidate),
        "checks": checks,
        "instance": serialize_instance(candidate),
    }


def entail(bundle, budget_seconds=None, bias=None):
    return decide_entailment(
        bundle.database, bundle.rules, bundle.query,
        budget_seconds=budget_seconds, bias=bias, signature=bundle.signature,
    )


def encode_report(machine, sticky_hrpq=False):
    bundle = encode_tca(machine, sticky_hrpq)
    return {
        "ruleset": serialize_rules(bundle.rules),
        "database": serialize_instance(bundle.database),
        "query": serialize_query(bundle.query),
        "kind": bundle.query.kind.value,
        "sticky": check_sticky(bundle.rules).sticky,
    }


def verify_report(machine, size, steps):
    return verify_three_step_correspondence(machine, size, steps).as_dict()


def grid_report(size):
    grid = grid_instance(size)
    return {"size": size, "atoms": len(grid), "instance": serialize_instance(grid)}
