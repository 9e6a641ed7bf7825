"""
URL configuration for phstab project.

Only the JSON API is routed; there is no admin site or HTML surface.
"""
from django.urls import path, include


urlpatterns = [
    # API endpoints
    path('api/', include('topology.urls')),
]
