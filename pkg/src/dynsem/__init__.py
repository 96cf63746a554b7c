"""Dynamic semantics engine: belief update as an algebra of epistemic operators."""

from .algebra import (
    EpistemicOperator, OperatorRegistry, StateSpace, accepts, apply, compose,
    entails, identity_op, is_compatible, is_idempotent, zero_op,
)
from .errors import DynsemError

__version__ = "0.1.0"

__all__ = [
    "DynsemError", "EpistemicOperator", "OperatorRegistry", "StateSpace", "accepts", "apply",
    "compose", "entails", "identity_op", "is_compatible", "is_idempotent", "zero_op",
]
