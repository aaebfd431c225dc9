"""
Reasoning core: existential rules, the Skolem chase, stickiness, UCQ
rewriting, path queries and the entailment driver. Importable without a
configured Django project; resource caps fall back to built-in defaults.
"""
