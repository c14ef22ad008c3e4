"""Zoea: programs synthesised from test cases.

Values are exchanged as JSON-compatible Python objects (None, bool, int,
float, str, list).
"""

import json

from . import _zoea
from ._zoea import CompileError, DocumentError, ParseError, RunError, catalog, catalog_version

__all__ = [
    "CompileError",
    "DocumentError",
    "ParseError",
    "RunError",
    "catalog",
    "catalog_version",
    "compile_text",
    "eval_expr",
    "export_document",
    "format_zoea",
    "import_zoea",
    "run_pipeline",
    "synthesize",
    "validate_zoea",
]


def format_zoea(source):
    return _zoea.format_zoea(source)


def validate_zoea(source):
    """List of (severity, code, message) for a .zoea text program."""
    return _zoea.validate_zoea(source)


def import_zoea(source, mode="steps"):
    """Document dict for a .zoea program. mode is "steps" or "list"."""
    return json.loads(_zoea.import_zoea(source, mode))


def export_document(document):
    return _zoea.export_document(json.dumps(document))


def synthesize(cases, constants=(), **budget):
    """Cheapest expression fitting cases [(inputs, output), ...], or None.

    budget: max_cost, timeout_ms, max_candidates.
    """
    rows = [[list(inputs), output] for inputs, output in cases]
    return _zoea.synthesize(json.dumps(rows), json.dumps(list(constants)), **budget)


def compile_text(source, **budget):
    """Compile a .zoea text program.

    Returns a dict with success, failed, candidates_expanded, events and
    pipeline (None on failure).
    """
    return json.loads(_zoea.compile_text(source, **budget))


def run_pipeline(pipeline, inputs):
    """Outputs of a compiled pipeline (dict or JSON text) for the given inputs."""
    text = pipeline if isinstance(pipeline, str) else json.dumps(pipeline)
    return json.loads(_zoea.run_pipeline(text, json.dumps(list(inputs))))


def eval_expr(expr, inputs=()):
    return json.loads(_zoea.eval_expr(expr, json.dumps(list(inputs))))
