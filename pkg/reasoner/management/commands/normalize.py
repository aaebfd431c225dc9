"""
Django management command to rewrite multi-head rules into single-head form.
Usage: python manage.py normalize --ruleset rules.txt
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_problem_arguments, load_problem
from reasoner.engine.textio import serialize_rules


class Command(BaseCommand):
    help = 'Prints the ruleset with every multi-head rule split into single-head rules'

    def add_arguments(self, parser):
        add_problem_arguments(parser, database=False, query=False)

    def handle(self, *args, **options):
        bundle = load_problem(options)
        self.stdout.write(serialize_rules(bundle.rules), ending='')
