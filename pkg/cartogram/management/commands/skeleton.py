from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from cartogram.exceptions import DomainError
from cartogram.management.commands.build import INPUT_ERROR, error_text
from cartogram.utils.config import RunConfig, check_output_path
from cartogram.utils.documents import parse_polygon_soup, parse_subdivision, subdivision_from_document
from cartogram.utils.skeleton import max_sagitta, straight_skeleton
from cartogram.utils.svg_render import render_skeleton_svg


class Command(BaseCommand):
    help = 'Renders the straight skeleton of one face with its largest safe arcs'

    def add_arguments(self, parser):
        parser.add_argument('input', help='subdivision document (JSON)')
        parser.add_argument('--face', required=True, help='face name or index')
        parser.add_argument('--out', help='SVG path, defaults to <input>.face<index>.skeleton.svg')
        parser.add_argument('--soup', action='store_true', help='input is a polygon soup')

    def handle(self, *args, **options):
        config = RunConfig.from_settings()
        try:
            data = Path(options['input']).read_bytes()
            doc = parse_polygon_soup(data) if options['soup'] else parse_subdivision(data)
            s = subdivision_from_document(doc, config.snap_eps, config.snap_eps_ratio)
            index = s.face_index(options['face'])
            if s.faces[index].is_sea:
                raise DomainError(
                    "Face %(face)s is the sea and has no skeleton.",
                    code='sea_skeleton', params={'face': s.faces[index].name})
            out = check_output_path(
                options.get('out') or Path(options['input']).with_suffix(f".face{index}.skeleton.svg"))
            polygon = s.face_polygon(index)
            skeleton = straight_skeleton(polygon, index, config.geom_eps)
        except (ValidationError, OSError) as e:
            raise CommandError(error_text(e), returncode=INPUT_ERROR)

        arcs = []
        for position in range(len(polygon.vertices)):
            edge = polygon.edge_arc(position)
            h = max_sagitta(edge, skeleton.region(position), config.geom_eps,
                            config.max_sagitta_ratio, config.max_sagitta_iter)
            arcs.append(edge.with_sagitta(h))

        out.write_bytes(render_skeleton_svg(polygon, skeleton, arcs))
        self.stdout.write(
            f"{s.faces[index].name}: {len(skeleton.regions)} regions, {len(skeleton.ridges)} ridges")
        self.stdout.write(self.style.SUCCESS(f"Wrote {out}."))
