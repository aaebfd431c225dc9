from django.db import models

from .engine.textio import parse_problem


class Problem(models.Model):
    """A named entailment problem: ruleset, database and query in text syntax"""
    name = models.CharField(max_length=120, unique=True)
    description = models.TextField(blank=True)
    ruleset = models.TextField(blank=True, help_text="Existential rules, one per line ending with '.'")
    database = models.TextField(blank=True, help_text="Ground facts, one per line ending with '.'")
    query = models.CharField(max_length=500, help_text="Path query, optionally headed by rpq:, 2rpq: or hrpq:")
    expected_verdict = models.CharField(max_length=20, blank=True, help_text="Known answer for curated problems")
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['name']
        verbose_name = "Problem"
        verbose_name_plural = "Problems"

    def __str__(self):
        return self.name

    def to_bundle(self):
        return parse_problem(self.ruleset, self.database, self.query)


class EntailmentRun(models.Model):
    VERDICT_CHOICES = [
        ('entailed', 'Entailed'),
        ('not_entailed', 'Not entailed'),
        ('resource_exhausted', 'Resource exhausted'),
    ]

    problem = models.ForeignKey(Problem, on_delete=models.CASCADE, related_name='runs')
    verdict = models.CharField(max_length=20, choices=VERDICT_CHOICES)
    budget_seconds = models.FloatField()
    bias = models.FloatField(default=0.5)
    witness = models.JSONField(default=dict, blank=True)
    elapsed_seconds = models.FloatField(default=0.0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = "Entailment Run"
        verbose_name_plural = "Entailment Runs"

    def __str__(self):
        return f"{self.problem.name}: {self.verdict}"
