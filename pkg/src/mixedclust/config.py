"""Run configuration shared by the statistic scan, calibration and extraction loop."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .nullmodel import NULL_MODES

MEMBERSHIP_RULES = ("and", "or")

# dotted config keys used in manifests and --config files
_KEYS = {
    "bins": "bins",
    "alpha": "alpha",
    "calib.B": "calib_B",
    "calib.seed": "calib_seed",
    "threshold.fixed": "threshold_fixed",
    "null.mode": "null_mode",
    "null.size": "null_size",
    "null.seed": "null_seed",
    "null.zero_floor": "zero_floor",
    "cutoff.continuous_minus_one": "continuous_minus_one",
    "radius.jump_factor": "jump_factor",
    "membership": "membership",
    "min_cluster_size": "min_cluster_size",
    "threads": "threads",
}


@dataclass
class ClusterConfig:
    bins: int = 10
    alpha: float = 0.05
    calib_B: int = 199
    calib_seed: int = 0
    threshold_fixed: float | None = None
    null_mode: str = "uniform-box"
    null_size: int | None = None  # None: max(n, 5000) at each iteration
    null_seed: int = 0
    zero_floor: float = 0.5
    continuous_minus_one: bool = False
    jump_factor: float = 5.0
    membership: str = "and"
    min_cluster_size: int = 2
    threads: int = 1

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.threshold_fixed is None:
            if self.calib_B < 19:
                raise ValueError(f"calib.B must be >= 19, got {self.calib_B}")
            rank_of(self.calib_B, self.alpha)
        elif self.threshold_fixed <= 0:
            raise ValueError("threshold.fixed must be positive")
        if self.null_mode not in NULL_MODES:
            raise ValueError(f"null.mode must be one of {NULL_MODES}, got {self.null_mode!r}")
        if self.null_size is not None and self.null_size < 1:
            raise ValueError("null.size must be >= 1")
        if self.zero_floor <= 0:
            raise ValueError("null.zero_floor must be positive")
        if self.jump_factor <= 0:
            raise ValueError("radius.jump_factor must be positive")
        if self.membership not in MEMBERSHIP_RULES:
            raise ValueError(f"membership must be one of {MEMBERSHIP_RULES}")
        if self.min_cluster_size < 1:
            raise ValueError("min_cluster_size must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def null_size_for(self, n: int) -> int:
        from .nullmodel import default_null_size

        return self.null_size if self.null_size is not None else default_null_size(n)

    def to_dict(self) -> dict:
        raw = asdict(self)
        return {key: raw[attr] for key, attr in _KEYS.items()}

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "ClusterConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in d.items():
            attr = _KEYS.get(key, key)
            if attr not in known:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[attr] = value
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


def rank_of(B: int, alpha: float) -> int:
    """Order-statistic rank ``(B + 1)(1 - alpha)``; must be an integer in ``1..B``."""
    x = (B + 1) * (1.0 - alpha)
    k = round(x)
    if abs(x - k) > 1e-9 or not 1 <= k <= B:
        raise ValueError(f"(B + 1)(1 - alpha) = {x:g} is not an attainable rank for B = {B}")
    return int(k)
