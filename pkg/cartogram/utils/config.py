from dataclasses import dataclass, fields, replace
from pathlib import Path

from django.conf import settings

from cartogram.exceptions import ConfigurationError

MODES = ('strong', 'weak')

# settings key -> RunConfig field
_SETTINGS_KEYS = {
    'GEOM_EPS': 'geom_eps',
    'SNAP_EPS_RATIO': 'snap_eps_ratio',
    'MAX_SAGITTA_RATIO': 'max_sagitta_ratio',
    'BISECTION_TOL': 'bisection_tol',
    'BISECTION_MAX_ITER': 'bisection_max_iter',
    'MAX_SAGITTA_ITER': 'max_sagitta_iter',
    'FLOW_EPS': 'flow_eps',
    'BALANCE_TOL': 'balance_tol',
    'MODE': 'mode',
    'SEED': 'seed',
}


@dataclass(frozen=True)
class RunConfig:
    """
    Tolerances and switches of one pipeline run.

    Defaults come from settings.CARTOGRAM; command-line flags override them
    through from_settings(**overrides).
    """

    geom_eps: float = 1e-9
    snap_eps_ratio: float = 1e-6
    max_sagitta_ratio: float = 1.0
    bisection_tol: float = 1e-12
    bisection_max_iter: int = 200
    max_sagitta_iter: int = 60
    flow_eps: float = 1e-12
    balance_tol: float = 1e-9
    mode: str = 'weak'
    seed: int = None
    sea_slack: bool = False
    merge_degree2: bool = False
    snap_eps: float = None

    def __post_init__(self):
        for name in ('geom_eps', 'snap_eps_ratio', 'bisection_tol', 'flow_eps', 'balance_tol'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(
                    "%(name)s must be positive.", code='invalid_tolerance', params={'name': name})
        if self.snap_eps is not None and not self.snap_eps > 0:
            raise ConfigurationError(
                "%(name)s must be positive.", code='invalid_tolerance', params={'name': 'snap_eps'})
        if not 0 < self.max_sagitta_ratio <= 2:
            raise ConfigurationError(
                "max_sagitta_ratio must lie in (0, 2], got %(value)s.",
                code='invalid_ratio', params={'value': self.max_sagitta_ratio})
        if self.bisection_max_iter < 1 or self.max_sagitta_iter < 1:
            raise ConfigurationError("Iteration limits must be at least 1.", code='invalid_iterations')
        if self.mode not in MODES:
            raise ConfigurationError(
                "Unknown mode %(mode)s, expected strong or weak.",
                code='invalid_mode', params={'mode': self.mode})

    @classmethod
    def from_settings(cls, **overrides):
        configured = getattr(settings, 'CARTOGRAM', {})
        values = {
            field: configured[key] for key, field in _SETTINGS_KEYS.items() if key in configured
        }
        known = {f.name for f in fields(cls)}
        values.update({k: v for k, v in overrides.items() if k in known and v is not None})
        return cls(**values)

    def with_mode(self, mode):
        return replace(self, mode=mode)


def check_output_path(path):
    """Output files may be new, but their directory has to exist."""
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise ConfigurationError(
            "Output directory %(path)s does not exist.",
            code='missing_directory', params={'path': str(parent)})
    return Path(path)
