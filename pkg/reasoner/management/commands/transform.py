"""
Django management command to print one stage of the ruleset pipeline.
Usage: python manage.py transform --ruleset rules.txt --database db.txt --stage rplus
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_problem_arguments, engine_errors, load_problem
from reasoner.services import STAGES, transform_stage


class Command(BaseCommand):
    help = 'Prints rew(R), cr(R), cr+(R), R+ or the saturated database D+'

    def add_arguments(self, parser):
        add_problem_arguments(parser, query=False)
        parser.add_argument('--stage', choices=STAGES, default='rplus', help='Pipeline stage (default: rplus)')

    def handle(self, *args, **options):
        bundle = load_problem(options)
        with engine_errors():
            text = transform_stage(bundle.database, bundle.rules, options['stage'])
        self.stdout.write(text, ending='')
