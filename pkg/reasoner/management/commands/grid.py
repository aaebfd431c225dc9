"""
Django management command to print a finite window of the grid instance.
Usage: python manage.py grid --size 3
"""
from django.core.management.base import BaseCommand

from reasoner.cli import engine_errors
from reasoner.services import grid_report


class Command(BaseCommand):
    help = 'Prints the size x size grid over IncX, DecX, IncY, DecY, XZero and YZero'

    def add_arguments(self, parser):
        parser.add_argument('--size', type=int, default=3, help='Grid size (default: 3)')

    def handle(self, *args, **options):
        with engine_errors():
            report = grid_report(options['size'])
        self.stdout.write(report['instance'], ending='')
