from django.urls import path

from .views import BottleneckView, LipschitzInfoView, PersistenceView, StabilizeView

urlpatterns = [
    path('persistence/', PersistenceView.as_view(), name='persistence'),
    path('stabilize/', StabilizeView.as_view(), name='stabilize'),
    path('bottleneck/', BottleneckView.as_view(), name='bottleneck'),
    path('kernels/lipschitz/', LipschitzInfoView.as_view(), name='kernel-lipschitz'),
]
