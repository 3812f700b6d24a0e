"""Truncated hom-category explorer and model-structure classifier for
finitely presented 2-theories."""

__version__ = "0.1.0"

from .bounds import Bound, default_bound
from .paths import (
    Relation, RewriteStep, TwoCellPath, Verdict, compose_paths, identity_path,
    invert_path,
)
from .presentations import (
    TermEquation, TheoryPresentation, TwoCellGenerator, apply_U, apply_c,
    apply_d, apply_pi0, coproduct, initial_theory, normalize_term,
)
from .terms import Leaf, Node, OperationSymbol, Term, substitute

__all__ = [
    "Bound", "default_bound", "Relation", "RewriteStep", "TwoCellPath",
    "Verdict", "compose_paths", "identity_path", "invert_path",
    "TermEquation", "TheoryPresentation", "TwoCellGenerator", "apply_U",
    "apply_c", "apply_d", "apply_pi0", "coproduct", "initial_theory",
    "normalize_term", "Leaf", "Node", "OperationSymbol", "Term", "substitute",
    "__version__",
]
