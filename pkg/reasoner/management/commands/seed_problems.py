"""
Django management command to load the curated entailment problems.
Usage: python manage.py seed_problems [--clear]
"""
from django.core.management.base import BaseCommand

from reasoner.engine.catalog import CATALOG
from reasoner.models import Problem


class Command(BaseCommand):
    help = 'Seeds the database with the curated entailed and non-entailed sticky problems'

    def add_arguments(self, parser):
        parser.add_argument(
            '--clear',
            action='store_true',
            help='Delete existing problems before seeding',
        )

    def handle(self, *args, **options):
        if options['clear']:
            self.stdout.write(self.style.WARNING('Clearing existing problems...'))
            Problem.objects.all().delete()

        created = 0
        for case in CATALOG:
            _, was_created = Problem.objects.update_or_create(
                name=case.name,
                defaults={
                    'ruleset': case.ruleset,
                    'database': case.database,
                    'query': case.query,
                    'expected_verdict': 'entailed' if case.entailed else 'not_entailed',
                },
            )
            created += was_created

        self.stdout.write(self.style.SUCCESS(
            f"Seeded {len(CATALOG)} problems ({created} new)"
        ))
