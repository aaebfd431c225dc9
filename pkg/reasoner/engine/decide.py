"""
Entailment of (2)RPQs over sticky rulesets.

Two semi-procedures race against a shared wall-clock budget. Forward
chasing runs the rules together with the Datalog program of the query
and stops once the goal atom is derived. The countermodel search runs
the rewriting pipeline and folds the chase of the saturated database
into a finite model that falsifies the query.
The first conclusive answer cancels the other.
"""
import asyncio
import logging
import time
from dataclasses import dataclass, replace

from asgiref.sync import async_to_sync, sync_to_async

from reasoner.conf import reasoner_setting

from .budget import Budget
from .chase import ChaseRunner, chase_bounded, check_quick_sample
from .exceptions import NotStickyError, ReasonerError, ResourceLimitExceeded, UnsupportedQuery
from .model import Constant, Instance, Signature
from .rewrite import (
    add_stellar_variants,
    core_rule_bodies,
    prune_multijoin,
    rewrite_rule_bodies,
    saturate_database,
)
from .rpq import (
    QueryKind,
    build_countermodel,
    compile_regex,
    eval_rpq,
    reduce_two_way,
    rpq_to_datalog,
)
from .sticky import check_sticky, is_stellar

logger = logging.getLogger(__name__)


class _Verdict:
    verdict = ""
    elapsed = 0.0

    def witness(self):
        return {}

    def to_dict(self):
        return {"verdict": self.verdict, **self.witness(), "elapsed_seconds": round(self.elapsed, 3)}


@dataclass(frozen=True)
class Entailed(_Verdict):
    chase_level: int
    path: object
    elapsed: float = 0.0
    goal_level: int = 0

    verdict = "entailed"

    def witness(self):
        return {
            "chase_level": self.chase_level,
            "goal_level": self.goal_level,
            "path": self.path.as_dict()["steps"],
            "start": str(self.path.start),
        }


@dataclass(frozen=True)
class NotEntailed(_Verdict):
    countermodel: object
    method: str
    elapsed: float = 0.0

    verdict = "not_entailed"

    def witness(self):
        return {
            "countermodel_atoms": len(self.countermodel),
            "method": self.method,
            "countermodel": [str(atom) for atom in self.countermodel.sorted_atoms()],
        }


@dataclass(frozen=True)
class ResourceExhausted(_Verdict):
    reasons: tuple = ()
    elapsed: float = 0.0

    verdict = "resource_exhausted"

    def witness(self):
        return {"reasons": list(self.reasons)}


@dataclass(frozen=True)
class PipelineArtifacts:
    rew: list
    cr: list
    crplus: list
    rplus: list
    dplus: object
    dfa: object
    datalog: object = None
    database: object = None
    query: object = None


def build_pipeline(database, rules, query, budget=None):
    """rew(R), cr(R), cr+(R), R+ and D+ for a sticky ruleset, plus the query automaton"""
    rew = rewrite_rule_bodies(rules, budget)
    cr = core_rule_bodies(rew)
    crplus = add_stellar_variants(cr)
    rplus = prune_multijoin(crplus)
    dplus = saturate_database(database, crplus, budget)
    signature = Signature.from_rules(rules, base=Signature.from_atoms(database.atoms))
    return PipelineArtifacts(
        rew=rew,
        cr=cr,
        crplus=crplus,
        rplus=rplus,
        dplus=dplus,
        dfa=compile_regex(query.regex),
        datalog=rpq_to_datalog(query, signature),
        database=database,
        query=query,
    )


def frozen_bodies(rules):
    """Rule bodies with variables read as constants, one sample database per distinct body"""
    samples = {}
    for rule in rules:
        if not rule.body:
            continue
        freeze = {var: Constant(f"c_{var.name.lower()}") for var in rule.body_vars}
        sample = frozenset(atom.substitute(freeze) for atom in rule.body)
        samples.setdefault(sample, Instance(sample))
    return list(samples.values())


def _goal_derived(program, instance):
    trace = chase_bounded(instance, program.rules, len(instance.active_domain) * len(program.state_predicates) + 2)
    return any(atom.predicate == program.goal for atom in trace.instance)


def stage_properties(artifacts, samples=None):
    """
    Which stage keeps the property it must have. Quickness is sampled on
    the database and on the frozen rule bodies unless `samples` are given.
    """
    if samples is None:
        samples = frozen_bodies(artifacts.rew)
        if artifacts.database is not None and len(artifacts.database):
            samples.insert(0, artifacts.database)
    properties = {
        "rew_sticky": check_sticky(artifacts.rew).sticky,
        "cr_sticky": check_sticky(artifacts.cr).sticky,
        "crplus_sticky": check_sticky(artifacts.crplus).sticky,
        "rew_quick": check_quick_sample(artifacts.rew, samples).quick,
        "cr_quick": check_quick_sample(artifacts.cr, samples).quick,
        "crplus_quick": check_quick_sample(artifacts.crplus, samples).quick,
        "rplus_stellar": all(is_stellar(rule) for rule in artifacts.rplus),
    }
    if artifacts.datalog is not None:
        query_holds = eval_rpq(artifacts.query, artifacts.dplus, dfa=artifacts.dfa).holds
        properties["datalog_agrees"] = _goal_derived(artifacts.datalog, artifacts.dplus) == query_holds
    return properties


def verify_path(path, instance, dfa):
    """Replay a witness path: every step is an atom of the instance and the word is accepted"""
    if any(atom not in instance for atom, _ in path.steps):
        return False
    position = path.start
    for atom, backwards in path.steps:
        source, target = (atom.args[1], atom.args[0]) if backwards else (atom.args[0], atom.args[1])
        if source != position:
            return False
        position = target
    return position == path.end and dfa.accepts(path.word)


def _earliest_witness(runner, query, dfa):
    """The first chase prefix satisfying the query, with its path"""
    trace = runner.trace()
    for level in range(trace.depth + 1):
        result = eval_rpq(query, trace.prefix(level), dfa=dfa)
        if result.holds:
            return level, result.witness
    return None, None


def forward_search(database, rules, query, budget=None):
    """
    Chase the rules together with the Datalog program of the query until
    its goal atom appears (Entailed) or the chase terminates without it
    (NotEntailed, the chase restricted to the input predicates being a
    finite model).
    """
    started = time.monotonic()
    dfa = compile_regex(query.regex)
    signature = Signature.from_rules(rules, base=Signature.from_atoms(database.atoms))
    program = rpq_to_datalog(query, signature)
    auxiliary = {program.goal, *program.state_predicates.values()}
    runner = ChaseRunner(database, list(rules) + program.rules, budget=budget)
    while not any(atom.predicate == program.goal for atom in runner.levels[-1]):
        if runner.terminated:
            logger.info(f"Chase terminated at level {runner.depth} without deriving {program.goal}")
            model = Instance(atom for atom in runner.current if atom.predicate not in auxiliary)
            return NotEntailed(model, "finite-chase", time.monotonic() - started)
        if budget is not None:
            budget.check()
        runner.advance()
    level, witness = _earliest_witness(runner, query, dfa)
    if witness is None or not verify_path(witness, runner.current, dfa):
        raise ReasonerError(f"{program.goal} was derived but no replayable path satisfies the query")
    logger.info(f"{program.goal} derived at chase level {runner.depth}, path complete at level {level}")
    return Entailed(level, witness, time.monotonic() - started, goal_level=runner.depth)


def countermodel_search(database, rules, query, budget=None):
    started = time.monotonic()
    artifacts = build_pipeline(database, rules, query, budget)
    logger.info(
        f"Pipeline: rew {len(artifacts.rew)}, cr {len(artifacts.cr)}, cr+ {len(artifacts.crplus)}, "
        f"R+ {len(artifacts.rplus)} rules; D+ {len(artifacts.dplus)} atoms"
    )
    found = build_countermodel(artifacts.dplus, artifacts.rplus, query, budget=budget)
    return NotEntailed(found.instance, found.method, time.monotonic() - started)


def prepare(database, rules, query, signature=None):
    """Stickiness check and 2RPQ reduction; returns the plain RPQ problem"""
    rules = list(rules)
    report = check_sticky(rules)
    if not report.sticky:
        raise NotStickyError(report.violation)
    if query.kind == QueryKind.HIGHER_ARITY:
        raise UnsupportedQuery("HRPQ entailment is undecidable even for sticky rulesets")
    if query.kind == QueryKind.TWO_WAY:
        signature = Signature.from_atoms(database.atoms, base=signature)
        query, rules = reduce_two_way(query, rules, signature)
    return rules, query


async def _run(task, budget, database, rules, query):
    try:
        return await sync_to_async(task, thread_sensitive=False)(database, rules, query, budget)
    except ResourceLimitExceeded as exc:
        return f"{task.__name__}: {exc}"


def budget_shares(seconds, bias):
    """Seconds granted to each semi-procedure; the shares add up to `seconds`"""
    weights = {forward_search: bias, countermodel_search: 1.0 - bias}
    total = sum(weights.values()) or 1.0
    return {task: seconds * weight / total for task, weight in weights.items()}


async def _race(database, rules, query, seconds, bias):
    budget = Budget(seconds)
    pending = {
        asyncio.ensure_future(_run(task, budget.share(share), database, rules, query))
        for task, share in budget_shares(seconds, bias).items()
    }
    reasons = []
    try:
        while pending:
            done, pending = await asyncio.wait(pending, return_when=asyncio.FIRST_COMPLETED)
            for future in done:
                outcome = future.result()
                if isinstance(outcome, str):
                    reasons.append(outcome)
                else:
                    return outcome
    finally:
        budget.cancel.set()
        if pending:
            await asyncio.wait(pending)
    return ResourceExhausted(tuple(sorted(reasons)))


def decide_entailment(database, rules, query, budget_seconds=None, bias=None, signature=None):
    """
    Decide whether the database and sticky rules entail the Boolean
    (2)RPQ. Returns Entailed, NotEntailed or ResourceExhausted.
    """
    budget_seconds = budget_seconds if budget_seconds is not None else reasoner_setting("ENTAIL_BUDGET_SECONDS")
    bias = reasoner_setting("ENTAIL_BIAS") if bias is None else bias
    if not 0.0 <= bias <= 1.0:
        raise ValueError("bias must lie in [0, 1]")
    started = time.monotonic()
    rules, query = prepare(database, rules, query, signature)
    verdict = async_to_sync(_race)(database, rules, query, float(budget_seconds), float(bias))
    elapsed = time.monotonic() - started
    logger.info(f"Entailment decided as {verdict.verdict} in {elapsed:.2f}s")
    return replace(verdict, elapsed=elapsed)
