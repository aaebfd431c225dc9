"""
Django management command to decide entailment of a (2)RPQ.
Usage: python manage.py entail --ruleset rules.txt --database db.txt --query q.txt --budget 30
"""
from django.core.management.base import BaseCommand

from reasoner.cli import add_format_argument, add_problem_arguments, engine_errors, load_problem, write_json
from reasoner.services import entail


class Command(BaseCommand):
    help = 'Races forward chasing against the countermodel search and prints the verdict'

    def add_arguments(self, parser):
        add_problem_arguments(parser)
        parser.add_argument('--budget', type=float, default=None, help='Wall-clock budget in seconds')
        parser.add_argument('--bias', type=float, default=None, help='Share of the budget for forward chasing, in [0, 1]')
        add_format_argument(parser)

    def handle(self, *args, **options):
        bundle = load_problem(options)
        with engine_errors():
            verdict = entail(bundle, options['budget'], options['bias'])
        payload = verdict.to_dict()
        if options['format'] == 'json':
            write_json(self, payload)
            return
        if payload['verdict'] == 'entailed':
            self.stdout.write(self.style.SUCCESS(f"entailed (chase level {payload['chase_level']})"))
            self.stdout.write(str(verdict.path))
        elif payload['verdict'] == 'not_entailed':
            self.stdout.write(self.style.SUCCESS(
                f"not entailed ({payload['method']}, countermodel of {payload['countermodel_atoms']} atoms)"
            ))
        else:
            self.stdout.write(self.style.WARNING('resource exhausted'))
            for reason in payload['reasons']:
                self.stdout.write(f"  {reason}")
