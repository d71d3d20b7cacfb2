import math
from dataclasses import asdict, dataclass, field

from cartogram.exceptions import DomainError

ZERO_ERROR_TOL = 1e-6


@dataclass(frozen=True)
class FaceReport:
    name: str
    initial_area: float
    target_area: float
    resulting_area: float
    delta: float
    success_rate: float = None
    cartographic_error: float = 0.0
    absolute_error: float = 0.0


@dataclass(frozen=True)
class Summary:
    average_success_rate: float = None
    average_error: float = None
    total_error: float = 0.0
    zero_error_faces: int = 0
    faces: int = 0


@dataclass(frozen=True)
class CartogramReport:
    faces: tuple = ()
    summary: Summary = field(default_factory=Summary)
    flow_value: float = 0.0
    demand: float = 0.0
    mode: str = 'weak'
    violations: tuple = ()

    @property
    def average_success_rate(self):
        return self.summary.average_success_rate

    @property
    def average_error(self):
        return self.summary.average_error

    @property
    def total_error(self):
        return self.summary.total_error

    def as_dict(self):
        data = asdict(self)
        data['violations'] = [str(v) for v in self.violations]
        return data


def face_metrics(a, t, b):
    """
    (success rate, cartographic error) of one face.

    The success rate is the achieved share of the wanted change, None when no
    change was wanted.

    Example:
        a=4, t=6, b=6 -> (1.0, 0.0)
        a=4, t=6, b=5 -> (0.5, 1/6)
    """
    if not t > 0:
        raise DomainError(
            "Target area must be positive, got %(target)s.",
            code='non_positive_target', params={'target': t})
    delta = t - a
    rate = None if delta == 0 else (b - a) / delta
    return rate, abs(b - t) / t


def summarize(rows):
    """Unweighted means over the faces; faces without a success rate are left out of its mean."""
    rows = list(rows)
    if not rows:
        raise DomainError("Nothing to summarize.", code='empty_report')
    rates = [row.success_rate for row in rows if row.success_rate is not None]
    errors = [row.cartographic_error for row in rows]
    return Summary(
        average_success_rate=math.fsum(rates) / len(rates) if rates else None,
        average_error=math.fsum(errors) / len(errors),
        total_error=math.fsum(row.absolute_error for row in rows),
        zero_error_faces=sum(1 for row in rows if row.absolute_error <= ZERO_ERROR_TOL * max(1.0, row.target_area)),
        faces=len(rows),
    )


def build_report(s, areas, flow_value, demand, mode='weak', violations=()):
    """
    Report over the land faces with targets.

    A zero target has no relative error; its row carries the absolute one.
    """
    rows = []
    for face in s.land_faces():
        if face.target_area is None:
            continue
        a, t, b = face.initial_area, face.target_area, areas[face.index]
        if t > 0:
            rate, error = face_metrics(a, t, b)
        else:
            rate = None if t == a else (b - a) / (t - a)
            error = abs(b - t)
        rows.append(FaceReport(
            name=face.name,
            initial_area=a,
            target_area=t,
            resulting_area=b,
            delta=face.delta,
            success_rate=rate,
            cartographic_error=error,
            absolute_error=abs(b - t),
        ))
    return CartogramReport(
        faces=tuple(rows),
        summary=summarize(rows) if rows else Summary(),
        flow_value=flow_value,
        demand=demand,
        mode=mode,
        violations=tuple(violations),
    )
