"""geomgen: generate plane-geometry proof problems with a symbolic deduction engine.

The pipeline goes: pick knowledge points -> look up constructive definition
sets in an offline mapping table -> build a numeric scene -> saturate a
deduction engine over it -> keep conclusions whose pruned proofs pass the
qualification checks -> render text and a diagram.
"""

__version__ = "0.1.0"

from .language import (  # noqa: F401
    PREDICATES,
    Statement,
    KnowledgeRule,
    DefinitionEntry,
    Repository,
    canonicalize,
    format_statement,
    parse_statement,
    parse_rules,
    parse_defs,
    load_repository,
)
