"""
Django management command to run a bounded Skolem chase.
Usage: python manage.py chase --ruleset rules.txt --database db.txt --steps 3
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, add_problem_arguments, engine_errors, load_problem, write_json
from reasoner.services import chase_report


class Command(BaseCommand):
    help = 'Chases a database with a ruleset for a bounded number of levels'

    def add_arguments(self, parser):
        add_problem_arguments(parser, query=False)
        parser.add_argument('--steps', type=int, default=3, help='Number of chase levels (default: 3)')
        add_format_argument(parser)

    def handle(self, *args, **options):
        bundle = load_problem(options, instance=True)
        with engine_errors():
            report = chase_report(bundle.database, bundle.rules, options['steps'])
        if options['format'] == 'json':
            write_json(self, report)
            return
        for level, atoms in enumerate(report['levels']):
            for atom in atoms:
                self.stdout.write(f"{level}\t{atom}")
        state = 'terminated' if report['terminated'] else 'bounded'
        self.stdout.write(self.style.SUCCESS(f"{report['atoms']} atoms after {report['depth']} levels ({state})"))
