# Generated by Django 5.1.5 on 2026-10-18 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Problem',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=120, unique=True)),
                ('description', models.TextField(blank=True)),
                ('ruleset', models.TextField(blank=True, help_text="Existential rules, one per line ending with '.'")),
                ('database', models.TextField(blank=True, help_text="Ground facts, one per line ending with '.'")),
                ('query', models.CharField(help_text='Path query, optionally headed by rpq:, 2rpq: or hrpq:', max_length=500)),
                ('expected_verdict', models.CharField(blank=True, help_text='Known answer for curated problems', max_length=20)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Problem',
                'verbose_name_plural': 'Problems',
                'ordering': ['name'],
            },
        ),
        migrations.CreateModel(
            name='EntailmentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('verdict', models.CharField(choices=[('entailed', 'Entailed'), ('not_entailed', 'Not entailed'), ('resource_exhausted', 'Resource exhausted')], max_length=20)),
                ('budget_seconds', models.FloatField()),
                ('bias', models.FloatField(default=0.5)),
                ('witness', models.JSONField(blank=True, default=dict)),
                ('elapsed_seconds', models.FloatField(default=0.0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('problem', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='runs', to='reasoner.problem')),
            ],
            options={
                'verbose_name': 'Entailment Run',
                'verbose_name_plural': 'Entailment Runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
