import logging

from django.conf import settings
from rest_framework import permissions, status
from rest_framework.response import Response
from rest_framework.views import APIView

from .exceptions import TopologyError
from .metrics import bottleneck
from .reduction import reduce
from .serializers import (
    BottleneckRequestSerializer,
    EstimateSerializer,
    LipschitzQuerySerializer,
    PersistenceRequestSerializer,
    StabilizeRequestSerializer,
    diagram_to_json,
)
from .stabilize import smooth

logger = logging.getLogger(__name__)


def _invalid(serializer):
    return Response({
        'success': False,
        'message': 'Invalid input',
        'errors': serializer.errors
    }, status=status.HTTP_400_BAD_REQUEST)


def _failed(error):
    logger.warning("Rejected request: %s", error)
    return Response({
        'success': False,
        'message': str(error),
    }, status=status.HTTP_400_BAD_REQUEST)


class PersistenceView(APIView):
    """Persistence diagrams of a filtered complex, degrees 0..max_degree."""
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = PersistenceRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return _invalid(serializer)

        data = serializer.validated_data
        try:
            diagrams = reduce(
                data['complex'],
                data['max_degree'],
                want_cycles=data['cycles'],
                essential_mode=data['essential'],
            )
        except TopologyError as e:
            return _failed(e)
        return Response({
            'success': True,
            'data': {
                'diagrams': [diagram_to_json(d) for d in diagrams]
            }
        }, status=status.HTTP_200_OK)


class StabilizeView(APIView):
    """Monte-Carlo estimate of (h * K)(a) for one bandwidth."""
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = StabilizeRequestSerializer(
            data=request.data,
            context={'max_trials': settings.PHSTAB['API_MAX_TRIALS']},
        )
        if not serializer.is_valid():
            return _invalid(serializer)

        data = serializer.validated_data
        summary = data['summary']
        seed = data.get('seed', settings.PHSTAB['DEFAULT_SEED'])
        try:
            estimate = smooth(summary, data['a'], data['kernel'], data['trials'], seed)
        except TopologyError as e:
            return _failed(e)
        logger.info("API stabilize %s: M=%d alpha=%g", summary.summary_id, estimate.trials, estimate.bandwidth)

        return Response({
            'success': True,
            'data': {
                'summary_id': summary.summary_id,
                'estimate': EstimateSerializer(estimate).data,
            }
        }, status=status.HTTP_200_OK)


class BottleneckView(APIView):
    """Bottleneck distance between two diagrams; null when it is infinite."""
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = BottleneckRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return _invalid(serializer)

        data = serializer.validated_data
        distance = bottleneck(data['a']['points'], data['b']['points'])
        return Response({
            'success': True,
            'data': {
                'distance': distance if distance != float('inf') else None,
                'infinite': distance == float('inf'),
            }
        }, status=status.HTTP_200_OK)


class LipschitzInfoView(APIView):
    """Lipschitz constant of h * K for a kernel family and the matching minimum bandwidth."""
    permission_classes = [permissions.AllowAny]

    def get(self, request):
        serializer = LipschitzQuerySerializer(data=request.query_params)
        if not serializer.is_valid():
            return _invalid(serializer)

        return Response({
            'success': True,
            'data': serializer.validated_data
        }, status=status.HTTP_200_OK)
