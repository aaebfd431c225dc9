"""
Engine limits, read from settings.REASONER with built-in defaults so the
engine also works outside a configured Django project.
"""
from django.conf import settings

DEFAULTS = {
    "CHASE_MAX_ATOMS": 1_000_000,
    "REWRITE_MAX_ROUNDS": 10_000,
    "REWRITE_MAX_DISJUNCTS": 5_000,
    "COUNTERMODEL_MAX_ROUNDS": 64,
    "COUNTERMODEL_MAX_ATOMS": 100_000,
    "ENUMERATION_MAX_NULLS": 3,
    "ENTAIL_BUDGET_SECONDS": 30.0,
    "ENTAIL_BIAS": 0.5,
    "QUICK_SAMPLE_DEPTH": 3,
}


def reasoner_setting(name):
    overrides = getattr(settings, "REASONER", {}) if settings.configured else {}
    return overrides.get(name, DEFAULTS[name])
