from rest_framework import serializers

from .engine.exceptions import ReasonerError
from .engine.textio import parse_tca
from .models import EntailmentRun, Problem
from .services import STAGES, parse_inputs


def _parse_or_reject(**inputs):
    try:
        return parse_inputs(**inputs)
    except ReasonerError as exc:
        raise serializers.ValidationError({"error": str(exc)})


class ProblemSerializer(serializers.ModelSerializer):
    runs_count = serializers.IntegerField(source='runs.count', read_only=True)

    class Meta:
        model = Problem
        fields = [
            "id", "name", "description", "ruleset", "database", "query",
            "expected_verdict", "runs_count", "created_at", "updated_at",
        ]
        read_only_fields = ["created_at", "updated_at"]

    def validate_expected_verdict(self, value):
        allowed = {"", *(choice for choice, _ in EntailmentRun.VERDICT_CHOICES)}
        if value not in allowed:
            raise serializers.ValidationError(f"Unknown verdict '{value}'")
        return value

    def validate(self, attrs):
        instance = self.instance
        texts = {
            field: attrs.get(field, getattr(instance, field, ""))
            for field in ("ruleset", "database", "query")
        }
        _parse_or_reject(**texts)
        return attrs


class EntailmentRunSerializer(serializers.ModelSerializer):
    problem_name = serializers.CharField(source='problem.name', read_only=True)

    class Meta:
        model = EntailmentRun
        fields = [
            "id", "problem", "problem_name", "verdict", "budget_seconds", "bias",
            "witness", "elapsed_seconds", "created_at",
        ]
        read_only_fields = fields


class EntailRequestSerializer(serializers.Serializer):
    budget_seconds = serializers.FloatField(required=False, min_value=0.01, max_value=600)
    bias = serializers.FloatField(required=False, min_value=0.0, max_value=1.0)


# ==========================
# ANALYSIS INPUTS
# ==========================

class _InputSerializer(serializers.Serializer):
    """Parses the given texts into `bundle`; subclasses declare which ones"""
    instance_input = False
    ucq_input = False

    def validate(self, attrs):
        texts = {field: attrs[field] for field in ("ruleset", "database", "query") if field in attrs}
        attrs["bundle"] = _parse_or_reject(**texts, instance=self.instance_input, ucq=self.ucq_input)
        return attrs


class RulesetInputSerializer(_InputSerializer):
    ruleset = serializers.CharField(allow_blank=True, trim_whitespace=False)


class ChaseInputSerializer(_InputSerializer):
    instance_input = True
    ruleset = serializers.CharField(allow_blank=True, trim_whitespace=False)
    database = serializers.CharField(allow_blank=True, trim_whitespace=False)
    steps = serializers.IntegerField(min_value=0, max_value=50, default=3)


class RewriteInputSerializer(_InputSerializer):
    ucq_input = True
    ruleset = serializers.CharField(allow_blank=True, trim_whitespace=False)
    query = serializers.CharField(trim_whitespace=False)


class TransformInputSerializer(_InputSerializer):
    ruleset = serializers.CharField(allow_blank=True, trim_whitespace=False)
    database = serializers.CharField(allow_blank=True, trim_whitespace=False, required=False)
    stage = serializers.ChoiceField(choices=STAGES, default="rplus")


class EvalInputSerializer(_InputSerializer):
    instance_input = True
    database = serializers.CharField(allow_blank=True, trim_whitespace=False)
    query = serializers.CharField(trim_whitespace=False)
    max_length = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)


class CountermodelInputSerializer(_InputSerializer):
    ruleset = serializers.CharField(allow_blank=True, trim_whitespace=False)
    database = serializers.CharField(allow_blank=True, trim_whitespace=False)
    query = serializers.CharField(trim_whitespace=False)
    budget_seconds = serializers.FloatField(required=False, min_value=0.01, max_value=600)


# ==========================
# TWO-COUNTER AUTOMATA
# ==========================

class MachineInputSerializer(serializers.Serializer):
    machine = serializers.CharField(trim_whitespace=False)

    def validate_machine(self, value):
        try:
            return parse_tca(value)
        except ReasonerError as exc:
            raise serializers.ValidationError(str(exc))


class EncodeInputSerializer(MachineInputSerializer):
    sticky_hrpq = serializers.BooleanField(default=False)


class VerifyInputSerializer(MachineInputSerializer):
    steps = serializers.IntegerField(min_value=1, max_value=50, default=6)
    grid = serializers.IntegerField(min_value=1, max_value=40, default=8)


class GridInputSerializer(serializers.Serializer):
    size = serializers.IntegerField(min_value=1, max_value=40, default=3)
