"""
Django management command to evaluate a path query over a finite instance.
Usage: python manage.py eval_query --database instance.txt --query q.txt
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, add_problem_arguments, engine_errors, load_problem, write_json
from reasoner.services import eval_report


class Command(BaseCommand):
    help = 'Evaluates an RPQ, 2RPQ or HRPQ and prints a witness path'

    def add_arguments(self, parser):
        add_problem_arguments(parser, ruleset=False)
        parser.add_argument('--max-length', type=int, default=None, help='Only consider paths of at most this many edges')
        add_format_argument(parser)

    def handle(self, *args, **options):
        bundle = load_problem(options, instance=True)
        with engine_errors():
            report = eval_report(bundle.query, bundle.database, options['max_length'])
        if options['format'] == 'json':
            write_json(self, report)
            return
        if report['holds']:
            self.stdout.write(self.style.SUCCESS('true'))
            self.stdout.write(report['witness_text'])
        else:
            self.stdout.write(self.style.WARNING('false'))
        for answer in report.get('answers', []):
            self.stdout.write(', '.join(answer))
