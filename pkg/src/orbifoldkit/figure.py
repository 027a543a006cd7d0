"""Schematic SVG of a pair on the unit-square fundamental domain.

Squares mark S_pi, open circles the canonical representatives of S_f, small
filled dots every lift of P_f.  One sample fiber is drawn as a closed chain
of arcs; a non-injectivity witness, if any, as a dashed segment.
"""
from __future__ import annotations

import random

from .injectivity import decide_pi_injectivity
from .qote import QotePair, pi_fiber, random_sphere_points
from .torus import sorted_points

SIZE = 400
MARGIN = 30


def _xy(p) -> tuple:
    x, y = p.coords
    return MARGIN + x * SIZE, MARGIN + (1 - y) * SIZE


def _f(v) -> str:
    return f"{float(v):.2f}"


def _square(p, cls, r=6) -> str:
    x, y = _xy(p)
    return (f'<rect class="{cls}" x="{_f(x - r)}" y="{_f(y - r)}" width="{2 * r}" '
            f'height="{2 * r}" fill="none" stroke="#1f4e79" stroke-width="2"/>')


def _circle(p, cls, r, fill) -> str:
    x, y = _xy(p)
    stroke = "#b03a2e" if fill == "none" else fill
    return (f'<circle class="{cls}" cx="{_f(x)}" cy="{_f(y)}" r="{r}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="1.5"/>')


def _arc(p, q, cls, dashed=False) -> str:
    (x1, y1), (x2, y2) = _xy(p), _xy(q)
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    # bow the arc sideways so coincident chords stay visible
    cx, cy = mx + (y2 - y1) / 6, my - (x2 - x1) / 6
    dash = ' stroke-dasharray="5,4"' if dashed else ""
    return (f'<path class="{cls}" d="M {_f(x1)} {_f(y1)} Q {_f(cx)} {_f(cy)} {_f(x2)} {_f(y2)}" '
            f'fill="none" stroke="#7d3c98" stroke-width="1"{dash}/>')


def render_svg(pair: QotePair, seed: int = 0) -> str:
    """Deterministic SVG text for ``pair``."""
    verdict = decide_pi_injectivity(pair)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE + 2 * MARGIN}" '
        f'height="{SIZE + 2 * MARGIN}" viewBox="0 0 {SIZE + 2 * MARGIN} {SIZE + 2 * MARGIN}">',
        f'<title>n={pair.n} A={list(map(list, pair.F.A))} deg f={pair.deg_f} '
        f'deg pi={pair.deg_pi} injective={str(verdict.injective).lower()}</title>',
        f'<rect class="domain" x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" '
        f'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    sample = random_sphere_points(pair, 1, random.Random(seed), exclude=pair.level_one,
                                  max_den=12)[0]
    fiber = pi_fiber(pair, sample)
    parts.append('<g class="fiber-arcs">')
    if len(fiber) > 1:
        for a, b in zip(fiber, fiber[1:] + fiber[:1]):
            parts.append(_arc(a, b, "fiber"))
    for x in fiber:
        parts.append(_circle(x, "fiber-point", 2, "#7d3c98"))
    parts.append("</g>")
    parts.append('<g class="S_pi">')
    parts += [_square(x, "s-pi") for x, _ in pair.s_pi]
    parts.append("</g>")
    parts.append('<g class="S_f">')
    parts += [_circle(p.rep, "s-f", 5, "none") for p, _ in pair.critical]
    parts.append("</g>")
    parts.append('<g class="P_f">')
    lifts = sorted_points({x for p in pair.postcritical for x in pi_fiber(pair, p)})
    parts += [_circle(x, "p-f", 3, "#1f4e79") for x in lifts]
    parts.append("</g>")
    if not verdict.injective and verdict.witnesses:
        w = verdict.witnesses[0]
        parts.append('<g class="witness">')
        parts.append(_arc(w.u, w.v, "witness", dashed=True))
        parts += [_circle(w.u, "witness-point", 4, "#d68910"),
                  _circle(w.v, "witness-point", 4, "#d68910")]
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
