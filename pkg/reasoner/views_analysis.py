"""
Stateless analysis endpoints: each parses the posted texts and returns
one engine report.
"""
import logging

from rest_framework import status
from rest_framework.permissions import AllowAny
from rest_framework.response import Response
from rest_framework.views import APIView

from .engine.exceptions import ReasonerError
from .engine.textio import serialize_rules
from .serializers import (
    ChaseInputSerializer,
    CountermodelInputSerializer,
    EvalInputSerializer,
    RewriteInputSerializer,
    RulesetInputSerializer,
    TransformInputSerializer,
)
from .services import (
    chase_report,
    countermodel_report,
    eval_report,
    rewrite_report,
    sticky_report,
    transform_stage,
)

logger = logging.getLogger(__name__)


class AnalysisView(APIView):
    """Validate with `serializer_class`, then answer with `report(data)`"""
    permission_classes = [AllowAny]
    serializer_class = None

    def report(self, data):
        raise NotImplementedError

    def post(self, request):
        serializer = self.serializer_class(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            return Response(self.report(serializer.validated_data), status=status.HTTP_200_OK)
        except ReasonerError as e:
            logger.info(f"{type(self).__name__} refused the input: {e}")
            return Response({'error': str(e)}, status=status.HTTP_400_BAD_REQUEST)
        except Exception as e:
            logger.error(f"{type(self).__name__} failed: {e}", exc_info=True)
            return Response({'error': str(e)}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)


class StickyView(AnalysisView):
    serializer_class = RulesetInputSerializer

    def report(self, data):
        return sticky_report(data['bundle'].rules)


class NormalizeView(AnalysisView):
    serializer_class = RulesetInputSerializer

    def report(self, data):
        rules = data['bundle'].rules
        return {'ruleset': serialize_rules(rules), 'rules': len(rules)}


class ChaseView(AnalysisView):
    serializer_class = ChaseInputSerializer

    def report(self, data):
        bundle = data['bundle']
        return chase_report(bundle.database, bundle.rules, data['steps'])


class RewriteView(AnalysisView):
    serializer_class = RewriteInputSerializer

    def report(self, data):
        bundle = data['bundle']
        return rewrite_report(bundle.query, bundle.rules)


class TransformView(AnalysisView):
    serializer_class = TransformInputSerializer

    def report(self, data):
        bundle = data['bundle']
        return {'stage': data['stage'], 'text': transform_stage(bundle.database, bundle.rules, data['stage'])}


class EvalView(AnalysisView):
    serializer_class = EvalInputSerializer

    def report(self, data):
        bundle = data['bundle']
        return eval_report(bundle.query, bundle.database, data['max_length'])


class CountermodelView(AnalysisView):
    serializer_class = CountermodelInputSerializer

    def report(self, data):
        bundle = data['bundle']
        return countermodel_report(bundle.database, bundle.rules, bundle.query, data.get('budget_seconds'))
