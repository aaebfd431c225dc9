"""
Django management command to build and verify a finite countermodel.
Usage: python manage.py countermodel --ruleset rules.txt --database db.txt --query q.txt
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, add_problem_arguments, engine_errors, load_problem, write_json
from reasoner.services import countermodel_report


class Command(BaseCommand):
    help = 'Searches a finite model of the database and rules in which the query fails'

    def add_arguments(self, parser):
        add_problem_arguments(parser)
        parser.add_argument('--budget', type=float, default=None, help='Time budget in seconds')
        add_format_argument(parser)

    def handle(self, *args, **options):
        bundle = load_problem(options)
        with engine_errors():
            report = countermodel_report(bundle.database, bundle.rules, bundle.query, options['budget'])
        if options['format'] == 'json':
            write_json(self, report)
            return
        self.stdout.write(report['instance'], ending='')
        for check, passed in report['checks'].items():
            style = self.style.SUCCESS if passed else self.style.ERROR
            self.stdout.write(style(f"% {check}: {'ok' if passed else 'FAILED'}"))
        self.stdout.write(f"% found by {report['method']} after {report['rounds']} rounds, {report['atoms']} atoms")
