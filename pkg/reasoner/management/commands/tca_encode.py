"""
Django management command to encode a two-counter automaton as an entailment problem.
Usage: python manage.py tca_encode machine.tca --output-dir out/ [--sticky-hrpq]
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from reasoner.cli import engine_errors, load_tca
from reasoner.services import encode_report


class Command(BaseCommand):
    help = 'Writes ruleset.txt, database.txt and query.txt whose query is entailed iff the machine halts'

    def add_arguments(self, parser):
        parser.add_argument('machine', help='Path to the TCA file')
        parser.add_argument('--output-dir', required=True, help='Directory for the generated files')
        parser.add_argument(
            '--sticky-hrpq',
            action='store_true',
            help='Use the sticky higher-arity ruleset and an HRPQ',
        )

    def handle(self, *args, **options):
        machine = load_tca(options['machine'])
        with engine_errors():
            report = encode_report(machine, options['sticky_hrpq'])
        output = Path(options['output_dir'])
        try:
            output.mkdir(parents=True, exist_ok=True)
            for name in ('ruleset', 'database', 'query'):
                (output / f"{name}.txt").write_text(report[name], encoding='utf-8')
        except OSError as exc:
            raise CommandError(f"Cannot write to {output}: {exc.strerror}") from exc
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {report['kind']} problem to {output} (ruleset sticky: {report['sticky']})"
        ))
