"""
Django management command to check the three-step correspondence of a TCA on a finite grid.
Usage: python manage.py tca_verify machine.tca --steps 6 --grid 8
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, engine_errors, load_tca, write_json
from reasoner.services import verify_report


class Command(BaseCommand):
    help = 'Compares machine steps with three-step automaton walks on the grid'

    def add_arguments(self, parser):
        parser.add_argument('machine', help='Path to the TCA file')
        parser.add_argument('--steps', type=int, default=6, help='Machine steps to simulate (default: 6)')
        parser.add_argument('--grid', type=int, default=8, help='Grid size (default: 8)')
        add_format_argument(parser)

    def handle(self, *args, **options):
        machine = load_tca(options['machine'])
        with engine_errors():
            report = verify_report(machine, options['grid'], options['steps'])
        if options['format'] == 'json':
            write_json(self, report)
            return
        for row in report['rows']:
            mark = 'ok' if row['ok'] else 'FAIL'
            self.stdout.write(f"{mark:4} {row['configuration']} -> {row['expected']} observed {row['observed']}")
        self.stdout.write(f"halts: {report['halts']}, query holds: {report['query_holds']}")
        if report['passed']:
            self.stdout.write(self.style.SUCCESS('Correspondence verified'))
        else:
            self.stdout.write(self.style.ERROR('Correspondence failed'))
