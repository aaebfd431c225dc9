"""
WSGI config for the stickyrpq project.

It exposes the WSGI callable as a module-level variable named ``application``.
Served by gunicorn in deployment: ``gunicorn stickyrpq.wsgi``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'stickyrpq.settings')

application = get_wsgi_application()
