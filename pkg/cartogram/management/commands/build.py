import json
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from cartogram.exceptions import InvariantViolation
from cartogram.utils.config import MODES, RunConfig, check_output_path
from cartogram.utils.documents import (
    parse_polygon_soup, parse_subdivision, parse_weights, weights_format,
)
from cartogram.utils.flow import dump_network
from cartogram.utils.pipeline import run_pipeline
from cartogram.utils.report import aggregate_line, write_report
from cartogram.utils.svg_render import render_svg

INPUT_ERROR = 2
INTERNAL_ERROR = 3


def error_text(error):
    if isinstance(error, ValidationError):
        return '; '.join(error.messages)
    return str(error)


class Command(BaseCommand):
    help = 'Builds a circular-arc cartogram from a subdivision document and weights'

    def add_arguments(self, parser):
        parser.add_argument('input', help='subdivision document (JSON)')
        parser.add_argument('--weights', help='weight table, JSON object or two-column CSV')
        parser.add_argument('--soup', action='store_true', help='input is a polygon soup')
        parser.add_argument('--mode', choices=MODES)
        parser.add_argument('--snap-eps', type=float)
        parser.add_argument('--geom-eps', type=float)
        parser.add_argument('--max-sagitta-ratio', type=float)
        parser.add_argument('--merge-degree2', action='store_true')
        parser.add_argument('--sea-slack', action='store_true')
        parser.add_argument('--out-svg')
        parser.add_argument('--out-report')
        parser.add_argument('--dump-network', help='write the flow network as JSON diagnostics')

    def load_document(self, options):
        data = Path(options['input']).read_bytes()
        doc = parse_polygon_soup(data) if options['soup'] else parse_subdivision(data)
        if options.get('weights'):
            path = options['weights']
            doc = doc.with_weights(parse_weights(Path(path).read_bytes(), weights_format(path)))
        return doc

    def output_paths(self, options):
        source = Path(options['input'])
        svg = options.get('out_svg') or source.with_suffix('.svg')
        report = options.get('out_report') or source.with_suffix('.report.json')
        return check_output_path(svg), check_output_path(report)

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_settings(
                mode=options.get('mode'),
                snap_eps=options.get('snap_eps'),
                geom_eps=options.get('geom_eps'),
                max_sagitta_ratio=options.get('max_sagitta_ratio'),
                merge_degree2=options.get('merge_degree2') or None,
                sea_slack=options.get('sea_slack') or None,
            )
            svg_path, report_path = self.output_paths(options)
            dump_path = check_output_path(options['dump_network']) if options.get('dump_network') else None
            doc = self.load_document(options)
            result = run_pipeline(doc, config, label=options['input'], stream=self.stdout)
        except InvariantViolation as e:
            raise CommandError(f"internal error: {e}", returncode=INTERNAL_ERROR)
        except (ValidationError, OSError) as e:
            raise CommandError(error_text(e), returncode=INPUT_ERROR)

        svg_path.write_bytes(render_svg(result.subdivision, result.configuration, result.report))
        report_path.write_bytes(write_report(result.report))
        if dump_path is not None:
            dump_path.write_text(json.dumps(dump_network(result.network, result.flow), indent=2) + "\n")

        self.stdout.write(aggregate_line(result.report))
        self.stdout.write(self.style.SUCCESS(f"Wrote {svg_path} and {report_path}."))
