import math

import numpy as np
from rest_framework import serializers

from .builders import PointCloud, TorusSample
from .complex import FilteredComplex, Simplex
from .exceptions import ComplexValidationError, TopologyError
from .kernels import FAMILIES, KernelSpec
from .reduction import EssentialMode
from .summaries import (
    REGIONS,
    CurveDistance,
    CyclePersistence,
    DensityThresholdRips,
    LineGraphLowerStar,
    MaxPersistence,
    RegionLongestBar,
    RipsOfCloud,
    SimplexPersistence,
    SummarySpec,
    TorusLowerStar,
    VertexPersistence,
)

COMPUTATIONS = ('line-graph-lower-star', 'curve', 'rips', 'torus', 'density-threshold-rips')


def _finite(value, name='value'):
    if value is None or not math.isfinite(value):
        raise serializers.ValidationError(f"{name} must be a finite number.")
    return value


# ----------------------------------------------------------------------
# Complexes
# ----------------------------------------------------------------------

class SimplexEntrySerializer(serializers.Serializer):
    v = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    f = serializers.FloatField()

    def validate_f(self, value):
        return _finite(value, 'Filtration value')


class ComplexSerializer(serializers.Serializer):
    """
    `{"simplices": [{"v": [0, 1], "f": 11.0}, ...]}` -> FilteredComplex.

    The validated data is the complex itself; every missing face and
    monotonicity violation is reported.
    """
    simplices = SimplexEntrySerializer(many=True, allow_empty=True)

    def validate(self, data):
        complex_ = FilteredComplex()
        try:
            for entry in data['simplices']:
                complex_.add_simplex(entry['v'], entry['f'])
            complex_.check()
        except ComplexValidationError as e:
            raise serializers.ValidationError({'simplices': [str(v) for v in e.violations]})
        except TopologyError as e:
            raise serializers.ValidationError({'error': str(e)})
        return complex_

    @staticmethod
    def dump(complex_: FilteredComplex) -> dict:
        return {
            'simplices': [
                {'v': list(s), 'f': complex_.value(s)} for s in complex_.sorted_filtration()
            ]
        }


# ----------------------------------------------------------------------
# Diagrams
# ----------------------------------------------------------------------

class PairSerializer(serializers.Serializer):
    birth = serializers.FloatField()
    # null stands for +inf
    death = serializers.FloatField(allow_null=True)
    creator = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    killer = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False, allow_null=True)
    essential = serializers.BooleanField(required=False, default=False)

    def to_representation(self, pair):
        data = super().to_representation(pair)
        if not pair.is_finite:
            data['death'] = None
        if pair.cycle is not None:
            data['cycle'] = [list(s) for s in sorted(pair.cycle, key=lambda s: (len(s), s))]
        return data

    def validate(self, data):
        birth = _finite(data['birth'], 'birth')
        death = math.inf if data.get('death') is None else data['death']
        if math.isnan(death) or death < birth:
            raise serializers.ValidationError(f"Pair ({birth}, {death}) must satisfy birth <= death.")
        data['death'] = death
        return data


class DiagramSerializer(serializers.Serializer):
    """
    Diagram JSON <-> PersistenceDiagram.

    Reading yields `{'degree': p, 'points': [(birth, death), ...]}`, which is
    all the bottleneck distance needs.
    """
    degree = serializers.IntegerField(min_value=0)
    pairs = PairSerializer(many=True, allow_empty=True)

    def validate(self, data):
        return {
            'degree': data['degree'],
            'points': [(p['birth'], p['death']) for p in data['pairs']],
        }


def diagram_to_json(diagram) -> dict:
    return {
        'degree': diagram.degree,
        'pairs': PairSerializer(diagram.pairs, many=True).data,
    }


# ----------------------------------------------------------------------
# Point clouds, kernels
# ----------------------------------------------------------------------

class PointCloudSerializer(serializers.Serializer):
    dim = serializers.IntegerField(min_value=1)
    points = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))

    def validate(self, data):
        dim = data['dim']
        for i, point in enumerate(data['points']):
            if len(point) != dim:
                raise serializers.ValidationError({'points': f"Point {i} has {len(point)} coordinates, expected {dim}."})
            if not all(math.isfinite(x) for x in point):
                raise serializers.ValidationError({'points': f"Point {i} has a non-finite coordinate."})
        return PointCloud(np.asarray(data['points'], dtype=float).reshape(-1, dim))


class TorusSampleSerializer(PointCloudSerializer):
    z = serializers.ListField(child=serializers.FloatField())

    def validate(self, data):
        cloud = super().validate({'dim': data['dim'], 'points': data['points']})
        if data['dim'] != 2:
            raise serializers.ValidationError({'dim': "A torus sample has 2-dimensional points (u, v)."})
        if len(data['z']) != len(cloud):
            raise serializers.ValidationError({'z': f"Expected {len(cloud)} values, got {len(data['z'])}."})
        if not all(math.isfinite(x) for x in data['z']):
            raise serializers.ValidationError({'z': "Values must be finite."})
        return TorusSample(cloud.points, data['z'])


class KernelSerializer(serializers.Serializer):
    family = serializers.ChoiceField(choices=FAMILIES)
    dim = serializers.IntegerField(min_value=1)
    bandwidth = serializers.FloatField()

    def validate(self, data):
        try:
            return KernelSpec(data['family'], data['dim'], data['bandwidth'])
        except TopologyError as e:
            raise serializers.ValidationError({'error': str(e)})


# ----------------------------------------------------------------------
# Summaries
# ----------------------------------------------------------------------

def functional_from_json(value):
    """
    Parse one of `{"vertex": i}`, `{"simplex": [i, j]}`, `{"cycle": [[i, j], ...]}`,
    `"max-persistence"` or `{"region": "second-quadrant"}`.
    """
    if value == 'max-persistence':
        return MaxPersistence()
    if not isinstance(value, dict) or len(value) != 1:
        raise serializers.ValidationError(f"Unrecognised functional: {value!r}")
    kind, arg = next(iter(value.items()))
    try:
        if kind == 'vertex':
            if isinstance(arg, bool) or not isinstance(arg, int):
                raise serializers.ValidationError("vertex must be an integer index.")
            return VertexPersistence(Simplex([arg])[0])
        if kind == 'simplex':
            return SimplexPersistence(Simplex(arg))
        if kind == 'cycle':
            return CyclePersistence(frozenset(Simplex(s) for s in arg))
        if kind == 'region':
            if arg not in REGIONS:
                raise serializers.ValidationError(f"Unknown region {arg!r}; expected one of {', '.join(REGIONS)}.")
            return RegionLongestBar(REGIONS[arg])
    except (TopologyError, TypeError) as e:
        raise serializers.ValidationError(f"Invalid {kind} functional: {e}")
    raise serializers.ValidationError(f"Unrecognised functional kind {kind!r}.")


class SummarySerializer(serializers.Serializer):
    """
    Summary config fragment -> SummarySpec.

    `n` (vertices or points) may be omitted when the caller passes the
    parameter count as `context['arity']`.
    """
    computation = serializers.ChoiceField(choices=COMPUTATIONS)
    functional = serializers.JSONField()
    degree = serializers.IntegerField(min_value=0, default=0)
    essential = serializers.CharField(default='extended')
    n = serializers.IntegerField(min_value=1, required=False)
    dim = serializers.IntegerField(min_value=1, default=2)
    max_scale = serializers.FloatField(required=False)
    cloud = PointCloudSerializer(required=False)
    label = serializers.CharField(required=False, allow_blank=True, default='')

    def validate_functional(self, value):
        return functional_from_json(value)

    def validate_essential(self, value):
        try:
            return EssentialMode.parse(value)
        except TopologyError as e:
            raise serializers.ValidationError(str(e))

    def _size(self, data, per_unit):
        if 'n' in data:
            return data['n']
        arity = self.context.get('arity')
        if arity is None or arity % per_unit:
            raise serializers.ValidationError({'n': "Give n, or parameters whose count fixes it."})
        return arity // per_unit

    def validate(self, data):
        name = data['computation']
        if name == 'line-graph-lower-star':
            computation = LineGraphLowerStar(self._size(data, 1))
        elif name == 'curve':
            computation = CurveDistance(self._size(data, 2), max(1, data['degree']))
        elif name == 'torus':
            computation = TorusLowerStar(self._size(data, 3))
        else:
            if 'max_scale' not in data:
                raise serializers.ValidationError({'max_scale': f"{name} needs max_scale."})
            max_scale = _finite(data['max_scale'], 'max_scale')
            max_degree = max(1, data['degree'])
            if name == 'rips':
                computation = RipsOfCloud(self._size(data, data['dim']), max_scale, data['dim'], max_degree)
            else:
                if 'cloud' not in data:
                    raise serializers.ValidationError({'cloud': "density-threshold-rips needs a base cloud."})
                computation = DensityThresholdRips(data['cloud'], max_scale, max_degree)
        functional = data['functional']
        if isinstance(functional, RegionLongestBar) and name != 'torus':
            raise serializers.ValidationError({'functional': "Region functionals apply to the torus computation only."})
        return SummarySpec(
            computation=computation,
            functional=functional,
            degree=data['degree'],
            essential_mode=data['essential'],
            label=data['label'],
        )


class EstimateSerializer(serializers.Serializer):
    mean = serializers.FloatField()
    stderr = serializers.FloatField()
    trials = serializers.IntegerField()
    seed = serializers.IntegerField()
    bandwidth = serializers.FloatField()

    def to_representation(self, estimate):
        data = super().to_representation(estimate)
        if not math.isfinite(estimate.stderr):
            data['stderr'] = None
        return data


# ----------------------------------------------------------------------
# API requests
# ----------------------------------------------------------------------

class PersistenceRequestSerializer(serializers.Serializer):
    complex = ComplexSerializer()
    max_degree = serializers.IntegerField(min_value=0, default=0)
    essential = serializers.CharField(default='extended')
    cycles = serializers.BooleanField(default=False)

    def validate_essential(self, value):
        try:
            return EssentialMode.parse(value)
        except TopologyError as e:
            raise serializers.ValidationError(str(e))


class StabilizeRequestSerializer(serializers.Serializer):
    """Validates a smoothing request; the kernel dimension defaults to len(a)."""
    a = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    summary = serializers.JSONField()
    kernel = serializers.JSONField()
    trials = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(required=False)

    def validate_a(self, value):
        for x in value:
            _finite(x, 'Parameter')
        return value

    def validate_trials(self, value):
        limit = self.context.get('max_trials')
        if limit is not None and value > limit:
            raise serializers.ValidationError(f"At most {limit} trials per request.")
        return value

    def validate(self, data):
        arity = len(data['a'])
        summary = SummarySerializer(data=data['summary'], context={'arity': arity})
        kernel_data = data['kernel']
        if isinstance(kernel_data, dict):
            kernel_data = {'dim': arity, **kernel_data}
        kernel = KernelSerializer(data=kernel_data)
        errors = {}
        if not summary.is_valid():
            errors['summary'] = summary.errors
        if not kernel.is_valid():
            errors['kernel'] = kernel.errors
        if errors:
            raise serializers.ValidationError(errors)
        if summary.validated_data.arity != arity:
            errors['summary'] = [f"Summary expects {summary.validated_data.arity} parameters, got {arity}."]
        if kernel.validated_data.dim != arity:
            errors['kernel'] = [f"Kernel dimension {kernel.validated_data.dim} does not match {arity} parameters."]
        if errors:
            raise serializers.ValidationError(errors)
        data['summary'] = summary.validated_data
        data['kernel'] = kernel.validated_data
        return data


class BottleneckRequestSerializer(serializers.Serializer):
    a = DiagramSerializer()
    b = DiagramSerializer()


class LipschitzQuerySerializer(serializers.Serializer):
    """
    Closed-form Lipschitz constant of h * K for a kernel family, and optionally the
    smallest bandwidth reaching `target`.
    """
    family = serializers.ChoiceField(choices=FAMILIES)
    M = serializers.FloatField(min_value=0)
    bandwidth = serializers.FloatField(required=False)
    dim = serializers.IntegerField(min_value=1, default=1)
    target = serializers.FloatField(required=False, min_value=0)
    noise = serializers.FloatField(required=False, min_value=0, default=0.0)

    def validate(self, data):
        from .kernels import lipschitz_bound, min_bandwidth

        if 'bandwidth' not in data and 'target' not in data:
            raise serializers.ValidationError({'error': 'Give a bandwidth, a target Lipschitz constant, or both.'})
        result = {'family': data['family'], 'M': data['M'], 'dim': data['dim']}
        try:
            if 'bandwidth' in data:
                result['bandwidth'] = data['bandwidth']
                result['lipschitz'] = lipschitz_bound(
                    f"cor-{data['family']}", M=data['M'], alpha=data['bandwidth'], d=data['dim'],
                )
            if 'target' in data:
                result['target'] = data['target']
                result['min_bandwidth'] = min_bandwidth(
                    data['family'], data['dim'], data['M'], data['target'], data['noise'],
                )
        except TopologyError as e:
            raise serializers.ValidationError({'error': str(e)})
        return result
