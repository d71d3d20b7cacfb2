import json
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from cartogram.management.commands.build import INPUT_ERROR, error_text
from cartogram.utils.config import check_output_path
from cartogram.utils.documents import serialize_subdivision
from gadgets.utils.compiler import compile_formula
from gadgets.utils.formula import parse_formula


class Command(BaseCommand):
    help = 'Compiles a planar monotone 3-SAT formula into a gadget subdivision with absolute targets'

    def add_arguments(self, parser):
        parser.add_argument('formula', help='formula text file, one clause per line')
        parser.add_argument('out', help='subdivision document to write (JSON)')

    def handle(self, *args, **options):
        try:
            out = check_output_path(options['out'])
            weights_path = out.with_suffix('.weights.json')
            formula = parse_formula(Path(options['formula']).read_bytes())
            instance = compile_formula(formula)
        except (ValidationError, OSError) as e:
            raise CommandError(error_text(e), returncode=INPUT_ERROR)

        out.write_bytes(serialize_subdivision(instance.document()))
        weights_path.write_text(json.dumps(instance.targets, indent=2) + "\n")
        self.stdout.write(
            f"{len(instance.variables)} variables, {len(instance.clauses)} clauses, "
            f"{len(instance.subdivision.faces)} faces, sea change {instance.sea_delta:.6g}")
        self.stdout.write(self.style.SUCCESS(f"Wrote {out} and {weights_path}."))
