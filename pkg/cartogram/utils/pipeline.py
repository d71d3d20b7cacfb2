import logging
import math
from dataclasses import dataclass

from cartogram.exceptions import InvariantViolation, TopologyError
from cartogram.utils.bend import realize, verify
from cartogram.utils.config import RunConfig
from cartogram.utils.documents import subdivision_from_document
from cartogram.utils.flow import build_network, constrained_value, extract_transfers, max_flow
from cartogram.utils.metrics import build_report
from cartogram.utils.skeleton import compute_skeletons, edge_capacities
from cartogram.utils.stage_logger import StageLogger
from cartogram.utils.subdivision import (
    apply_targets, dual_graph, merge_degree2, normalize_weights, validate,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    subdivision: object
    skeletons: dict
    capacities: dict
    network: object
    flow: object
    plan: object
    configuration: object
    report: object


def prepare_subdivision(doc, config):
    """Subdivision with targets applied, checked against every structural rule."""
    s = subdivision_from_document(doc, config.snap_eps, config.snap_eps_ratio)
    if config.merge_degree2:
        s = merge_degree2(s, config.geom_eps)
    violations = validate(s, config.geom_eps)
    if violations:
        raise TopologyError(
            "Subdivision is invalid: %(first)s",
            code='invalid_subdivision',
            params={'faces': [v.entity for v in violations], 'first': str(violations[0]),
                    'violations': violations},
        )
    if not s.land_faces():
        return s
    weights = {face.name: face.weight for face in s.land_faces()}
    if doc.weight_mode == 'absolute':
        targets = apply_targets(s, weights)
    else:
        targets = normalize_weights(s, weights)
    return s.with_targets(targets)


def run_pipeline(doc, config=None, label='cartogram', stream=None):
    """build -> skeleton -> flow -> bend -> metrics for one document."""
    config = config or RunConfig.from_settings()
    with StageLogger(label, stream) as stages:
        with stages.stage('build'):
            s = prepare_subdivision(doc, config)
        with stages.stage('skeleton'):
            skeletons = compute_skeletons(s, config.geom_eps)
            g = dual_graph(s)
            deltas = s.deltas()
            caps = edge_capacities(s, g, config.mode, deltas, config, skeletons)
        with stages.stage('flow'):
            slack = math.fsum(face.initial_area for face in s.land_faces())
            network = build_network(g, deltas, caps, sea=s.sea_face, sea_slack=config.sea_slack,
                                    slack=slack, balance_tol=config.balance_tol)
            flow = max_flow(network, config.flow_eps)
            plan = extract_transfers(network, flow)
        with stages.stage('bend'):
            cfg = realize(s, plan, caps, config)
            violations = verify(s, cfg, config.mode, config, skeletons)
            if violations:
                raise InvariantViolation(
                    f"realized configuration is invalid: {'; '.join(map(str, violations))}")
        with stages.stage('metrics'):
            value = constrained_value(network, flow) if config.sea_slack else flow.value
            report = build_report(s, cfg.areas, value, network.demand, config.mode, violations)
    logger.info("%s: flow %.6g of %.6g", label, report.flow_value, report.demand)
    return PipelineResult(s, skeletons, caps, network, flow, plan, cfg, report)
