# app/render.py

import os

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from app.models import VerificationReport
from app.testspace import Orthoalgebra

TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "templates")

templates = Environment(loader=FileSystemLoader(TEMPLATE_DIR), trim_blocks=True, lstrip_blocks=True,
                        undefined=StrictUndefined, keep_trailing_newline=True)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def render_hasse(logic: Orthoalgebra) -> str:
    """DOT source of the covering relation; dotted edges join orthocomplements."""
    atoms = set(logic.atoms())
    space = logic.space
    nodes = []
    for k, rep in enumerate(logic.representatives):
        if k == logic.zero:
            label = "0"
        elif k == logic.unit:
            label = "1"
        else:
            label = "p" + space.text_of(rep)
        nodes.append({"id": k, "label": _dot_escape(label), "atom": k in atoms})
    complements = sorted({tuple(sorted((a, c))) for a, c in enumerate(logic.complement)
                          if a != c and a not in (logic.zero, logic.unit)})
    return templates.get_template("hasse.dot.j2").render(
        name=_dot_escape(space.name), nodes=nodes, edges=logic.covers(), complements=complements)


def render_report(report: VerificationReport) -> str:
    return templates.get_template("report.md.j2").render(report=report)
