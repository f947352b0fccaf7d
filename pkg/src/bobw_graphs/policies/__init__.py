from .base import Decision, Policy
from .strong import StrongPolicy, recommended_c1
from .weak import WeakAltPolicy, WeakPolicy, recommended_weak_params

__all__ = [
    "Decision",
    "Policy",
    "StrongPolicy",
    "WeakAltPolicy",
    "WeakPolicy",
    "recommended_c1",
    "recommended_weak_params",
]
