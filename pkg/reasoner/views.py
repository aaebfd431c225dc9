import logging

from django.shortcuts import get_object_or_404
from rest_framework import status
from rest_framework.permissions import AllowAny
from rest_framework.response import Response
from rest_framework.views import APIView

from .conf import reasoner_setting
from .engine.exceptions import ReasonerError
from .models import EntailmentRun, Problem
from .serializers import EntailmentRunSerializer, EntailRequestSerializer, ProblemSerializer
from .services import entail

logger = logging.getLogger(__name__)


class ProblemListCreateView(APIView):
    """List stored problems or store a new one (inputs must parse)"""
    permission_classes = [AllowAny]

    def get(self, request):
        queryset = Problem.objects.all()
        expected = request.query_params.get('expected_verdict')
        if expected:
            queryset = queryset.filter(expected_verdict=expected)
        serializer = ProblemSerializer(queryset, many=True)
        return Response(serializer.data, status=status.HTTP_200_OK)

    def post(self, request):
        serializer = ProblemSerializer(data=request.data)
        if serializer.is_valid():
            problem = serializer.save()
            logger.info(f"Problem '{problem.name}' stored")
            return Response(serializer.data, status=status.HTTP_201_CREATED)
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)


class ProblemDetailView(APIView):
    permission_classes = [AllowAny]

    def get(self, request, pk):
        problem = get_object_or_404(Problem, pk=pk)
        return Response(ProblemSerializer(problem).data, status=status.HTTP_200_OK)

    def patch(self, request, pk):
        problem = get_object_or_404(Problem, pk=pk)
        serializer = ProblemSerializer(problem, data=request.data, partial=True)
        if serializer.is_valid():
            serializer.save()
            return Response(serializer.data, status=status.HTTP_200_OK)
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

    def delete(self, request, pk):
        problem = get_object_or_404(Problem, pk=pk)
        problem.delete()
        return Response(status=status.HTTP_204_NO_CONTENT)


class ProblemEntailView(APIView):
    """
    Decide entailment for a stored problem within the requested budget and
    record the verdict as an EntailmentRun.
    """
    permission_classes = [AllowAny]

    def post(self, request, pk):
        problem = get_object_or_404(Problem, pk=pk)
        params = EntailRequestSerializer(data=request.data)
        if not params.is_valid():
            return Response(params.errors, status=status.HTTP_400_BAD_REQUEST)
        budget = params.validated_data.get('budget_seconds', reasoner_setting('ENTAIL_BUDGET_SECONDS'))
        bias = params.validated_data.get('bias', reasoner_setting('ENTAIL_BIAS'))
        try:
            verdict = entail(problem.to_bundle(), budget, bias)
        except ReasonerError as e:
            logger.warning(f"Entailment refused for problem {problem.pk}: {e}")
            return Response({'error': str(e)}, status=status.HTTP_400_BAD_REQUEST)
        except Exception as e:
            logger.error(f"Entailment failed for problem {problem.pk}: {e}", exc_info=True)
            return Response({'error': str(e)}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)

        payload = verdict.to_dict()
        run = EntailmentRun.objects.create(
            problem=problem,
            verdict=verdict.verdict,
            budget_seconds=budget,
            bias=bias,
            witness=verdict.witness(),
            elapsed_seconds=verdict.elapsed,
        )
        payload['run'] = run.pk
        return Response(payload, status=status.HTTP_200_OK)


class ProblemRunsView(APIView):
    permission_classes = [AllowAny]

    def get(self, request, pk):
        problem = get_object_or_404(Problem, pk=pk)
        serializer = EntailmentRunSerializer(problem.runs.all(), many=True)
        return Response(serializer.data, status=status.HTTP_200_OK)
