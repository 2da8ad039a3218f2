from .core import PairCopula, ROTATABLE
from .families import EPS, FAMILIES, get_family
from .fit import DEFAULT_FAMILIES, fit_pair, kendall_tau

__all__ = [
    "DEFAULT_FAMILIES",
    "EPS",
    "FAMILIES",
    "PairCopula",
    "ROTATABLE",
    "fit_pair",
    "get_family",
    "kendall_tau",
]
