"""
Django management command to decide stickiness of a ruleset.
Usage: python manage.py check_sticky --ruleset rules.txt
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, add_problem_arguments, engine_errors, load_problem, write_json
from reasoner.services import sticky_report


class Command(BaseCommand):
    help = 'Checks whether a ruleset is sticky and prints the marking'

    def add_arguments(self, parser):
        add_problem_arguments(parser, database=False, query=False)
        add_format_argument(parser)

    def handle(self, *args, **options):
        bundle = load_problem(options)
        with engine_errors():
            report = sticky_report(bundle.rules)
        if options['format'] == 'json':
            write_json(self, report)
            return
        if report['sticky']:
            self.stdout.write(self.style.SUCCESS('sticky'))
            self.stdout.write(report['marking_table'])
        else:
            self.stdout.write(self.style.WARNING(f"not sticky: {report['violation']}"))
        if report['joinless']:
            self.stdout.write('joinless')
