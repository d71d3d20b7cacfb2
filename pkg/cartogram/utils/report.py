import json
import math

SIGNIFICANT_DIGITS = 12


def _rounded(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


def report_as_dict(report):
    summary = report.summary
    return {
        'faces': [
            {
                'name': row.name,
                'a': row.initial_area,
                't': row.target_area,
                'b': row.resulting_area,
                'delta': row.delta,
                'success': row.success_rate,
                'error': row.cartographic_error,
                'absolute_error': row.absolute_error,
            }
            for row in report.faces
        ],
        'average_success_rate': summary.average_success_rate,
        'average_error': summary.average_error,
        'total_error': summary.total_error,
        'zero_error_faces': summary.zero_error_faces,
        'flow_value': report.flow_value,
        'demand': report.demand,
        'mode': report.mode,
        'violations': [str(v) for v in report.violations],
    }


def write_report(report):
    """Report as JSON bytes; fixed key order, floats cut to 12 significant digits."""
    return (json.dumps(_rounded(report_as_dict(report)), indent=2) + "\n").encode('utf-8')


def aggregate_line(report):
    def fmt(value):
        return 'n/a' if value is None else f"{value:.4g}"

    return (
        f"avg success rate {fmt(report.average_success_rate)}, "
        f"avg error {fmt(report.average_error)}, "
        f"total error {fmt(report.total_error)}, "
        f"flow {fmt(report.flow_value)}/{fmt(report.demand)}"
    )
