from ..errors import ValidationError
from .arima import ArimaMarginal, ArimaSpec, select_arima_order
from .base import MarginalBase, MarginalState, clamp_u
from .garch import ArimaGarchTMarginal
from .zeroadj import ZeroAdjustedGammaMarginal, ZeroAdjustedInverseGaussianMarginal

_KINDS = {
    "arima": ArimaMarginal,
    "arima_garch_t": ArimaGarchTMarginal,
    "zaga": ZeroAdjustedGammaMarginal,
    "zaig": ZeroAdjustedInverseGaussianMarginal,
}


def marginal_from_dict(d: dict) -> MarginalBase:
    """Rebuild a fitted marginal from its serialized form."""
    try:
        cls = _KINDS[d["kind"]]
    except KeyError:
        raise ValidationError(f"unknown marginal kind {d.get('kind')!r}") from None
    return cls.from_dict(d)


def marginal_from_spec(d: dict) -> MarginalBase:
    """Build an unfitted marginal from a config spec: ``kind`` plus the
    constructor arguments (orders, transform)."""
    d = dict(d)
    try:
        cls = _KINDS[d.pop("kind")]
    except KeyError:
        raise ValidationError(f"unknown marginal kind in spec {d!r}") from None
    try:
        return cls(**d)
    except TypeError as exc:
        raise ValidationError(f"bad marginal spec for {cls.__name__}: {exc}") from None


__all__ = [
    "ArimaGarchTMarginal",
    "ArimaMarginal",
    "ArimaSpec",
    "MarginalBase",
    "MarginalState",
    "clamp_u",
    "marginal_from_dict",
    "marginal_from_spec",
    "select_arima_order",
    "ZeroAdjustedGammaMarginal",
    "ZeroAdjustedInverseGaussianMarginal",
]
