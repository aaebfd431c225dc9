"""
Django management command to compute the UCQ rewriting of a query.
Usage: python manage.py rewrite_query --ruleset rules.txt --query q.cq
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, add_problem_arguments, engine_errors, load_problem, write_json
from reasoner.services import rewrite_report


class Command(BaseCommand):
    help = 'Rewrites a (union of) conjunctive queries against a sticky ruleset'

    def add_arguments(self, parser):
        add_problem_arguments(parser, database=False)
        add_format_argument(parser)

    def handle(self, *args, **options):
        bundle = load_problem(options, ucq=True)
        with engine_errors():
            report = rewrite_report(bundle.query, bundle.rules)
        if options['format'] == 'json':
            write_json(self, report)
        else:
            self.stdout.write(report['ucq'], ending='')
