"""
Shared plumbing for the management commands: problem files in, text or
JSON out, engine errors turned into CommandError.
"""
import json
from contextlib import contextmanager
from pathlib import Path

from django.core.management.base import CommandError

from .engine.exceptions import ReasonerError
from .engine.textio import parse_tca
from .services import parse_inputs


def add_problem_arguments(parser, ruleset=True, database=True, query=True):
    if ruleset:
        parser.add_argument('--ruleset', required=True, help='Path to the ruleset file')
    if database:
        parser.add_argument('--database', required=True, help='Path to the database file')
    if query:
        parser.add_argument('--query', required=True, help='Path to the query file')


def add_format_argument(parser):
    parser.add_argument(
        '--format',
        choices=['text', 'json'],
        default='text',
        help='Output format (default: text)',
    )


def read_text(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise CommandError(f"Cannot read {path}: {exc.strerror}") from exc


def load_problem(options, instance=False, ucq=False):
    """Parse the --ruleset/--database/--query files given on the command line"""
    texts = {
        name: read_text(options[name]) if options.get(name) else None
        for name in ('ruleset', 'database', 'query')
    }
    with engine_errors():
        return parse_inputs(**texts, instance=instance, ucq=ucq)


def load_tca(path):
    with engine_errors():
        return parse_tca(read_text(path))


@contextmanager
def engine_errors():
    try:
        yield
    except (ReasonerError, ValueError) as exc:
        raise CommandError(str(exc)) from exc


def write_json(command, payload):
    command.stdout.write(json.dumps(payload, indent=2, sort_keys=True))
