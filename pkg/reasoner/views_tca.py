import logging

from rest_framework import status
from rest_framework.permissions import AllowAny
from rest_framework.response import Response
from rest_framework.views import APIView

from .serializers import EncodeInputSerializer, GridInputSerializer, VerifyInputSerializer
from .services import encode_report, grid_report, verify_report
from .views_analysis import AnalysisView

logger = logging.getLogger(__name__)


class TcaEncodeView(AnalysisView):
    serializer_class = EncodeInputSerializer

    def report(self, data):
        return encode_report(data['machine'], data['sticky_hrpq'])


class TcaVerifyView(AnalysisView):
    serializer_class = VerifyInputSerializer

    def report(self, data):
        return verify_report(data['machine'], data['grid'], data['steps'])


class GridView(APIView):
    """The finite grid window used by the halting reduction"""
    permission_classes = [AllowAny]

    def get(self, request):
        serializer = GridInputSerializer(data=request.query_params)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        size = serializer.validated_data['size']
        logger.debug(f"Serving grid of size {size}")
        return Response(grid_report(size), status=status.HTTP_200_OK)
