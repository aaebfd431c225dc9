"""
URL configuration for the stickyrpq project.

The reasoner app serves the API under /api/; /admin/ manages stored problems.
"""
from django.contrib import admin
from django.urls import include, path

import reasoner.urls

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include(reasoner.urls)),
]
