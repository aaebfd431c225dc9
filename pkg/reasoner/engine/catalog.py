"""
Hand-checked entailment problems over sticky rulesets, ten entailed and
ten not entailed. Loaded into the database by `seed_problems` and used
as the end-to-end regression suite.
"""
from dataclasses import dataclass

from .textio import parse_problem

SUCC = "E(X, Y) -> exists Z. E(Y, Z).\n"
SYMMETRIC = "E(X, Y) -> E(Y, X).\n"
JOIN = "A(X), B(X) -> exists Z. E(X, Z).\nE(X, Y) -> C(X, Y).\n"


@dataclass(frozen=True)
class CatalogCase:
    name: str
    database: str
    ruleset: str
    query: str
    entailed: bool

    def bundle(self):
        return parse_problem(self.ruleset, self.database, self.query)


CATALOG = (
    # not entailed
    CatalogCase("endless-chain-no-f", "E(a, b).", SUCC, "F", False),
    CatalogCase("no-rules-short-path", "E(a, b).", "", "E / E", False),
    CatalogCase("one-step-then-stop", "A(a).", "A(X) -> exists Z. E(X, Z).\nE(X, Y) -> B(Y).\n", "E / E", False),
    CatalogCase(
        "alternating-e-f", "E(a, b).",
        "E(X, Y) -> exists Z. F(Y, Z).\nF(X, Y) -> exists Z. E(Y, Z).\n", "E / E", False,
    ),
    CatalogCase("seeded-chain-no-f", "P(a).", "P(X) -> exists Y. E(X, Y).\n" + SUCC, "F", False),
    CatalogCase("backward-twice", "E(a, b).", "", "2rpq: ^E / ^E", False),
    CatalogCase("reverse-copy-too-short", "E(a, b).\nE(b, c).", "E(X, Y) -> R(Y, X).\n", "E / E / E", False),
    CatalogCase("join-single-edge", "A(a).\nB(a).", JOIN, "E / E", False),
    CatalogCase("f-leaf-dead-end", "E(a, b).", "E(X, Y) -> exists Z. F(X, Z).\n", "F / E", False),
    CatalogCase("symmetric-without-f", "E(a, b).", SYMMETRIC, "E / E / F", False),
    # entailed
    CatalogCase("database-edge", "E(a, b).", "", "E", True),
    CatalogCase("chain-three-steps", "E(a, b).", SUCC, "E / E / E", True),
    CatalogCase(
        "edge-then-f", "A(a).",
        "A(X) -> exists Z. E(X, Z).\nE(X, Y) -> exists Z. F(Y, Z).\n", "E / F", True,
    ),
    CatalogCase("symmetric-walk", "E(a, b).", SYMMETRIC, "E / E / E / E", True),
    CatalogCase("back-along-f", "E(a, b).", "E(X, Y) -> exists Z. F(X, Z).\n", "2rpq: ^F / E", True),
    CatalogCase("join-derived-c", "A(a).\nB(a).", JOIN, "C", True),
    CatalogCase("chain-plus", "E(a, b).", SUCC, "E+ / E / E", True),
    CatalogCase(
        "seeded-chain-three", "P(a).",
        "P(X) -> exists Y. E(X, Y).\n" + SUCC + "E(X, Y) -> G(Y).\n", "E / E / E", True,
    ),
    CatalogCase("optional-prefix", "S(a, b).", "", "T? / S", True),
    CatalogCase("reverse-copy-closes", "E(a, b).\nE(b, c).", "E(X, Y) -> R(Y, X).\n", "E / E / R", True),
)


def by_name(name):
    for case in CATALOG:
        if case.name == name:
            return case
    raise KeyError(name)
