"""SVG rendering of workspaces, planner trees and tours.

Pure ElementTree output, no drawing dependencies.  The scene is drawn in
workspace coordinates inside a group that flips the y axis, so the
conventional "y grows upward" planning frame renders the right way up.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

# Distinct tree colors, cycled when there are more trees than entries.
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#aec7e8", "#98df8a",
)

_BACKGROUND = "#fafaf7"
_OBSTACLE = "#4a4a4a"
_VIRTUAL = "#222222"
_TOUR = "#e6b422"
_TARGET = "#111111"


def _fmt(value: float) -> str:
    return f"{value:.4f}".rstrip("0").rstrip(".")


def render_svg(workspace, forest=None, tour_paths=(), path=None) -> str:
    """Draw a workspace (optionally with a planner's trees and a tour).

    ``forest`` may be any object with ``nodes`` (having ``config``,
    ``parent``, ``tree``) and optionally ``virtual_edges`` and ``targets``;
    both planner structures qualify.  ``tour_paths`` is an iterable of
    configuration sequences drawn as highlighted polylines.  When ``path``
    is given the document is also written there.  Returns the SVG text.
    """
    xmin, ymin, xmax, ymax = workspace.bounds
    width = xmax - xmin
    height = ymax - ymin
    stroke = max(width, height) / 600.0

    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "viewBox": f"{_fmt(xmin)} {_fmt(ymin)} {_fmt(width)} {_fmt(height)}",
            "width": "800",
            "height": _fmt(800.0 * height / width),
        },
    )
    # Flip y: translate the frame so the flipped scene lands back in view.
    scene = ET.SubElement(
        svg, "g", {"transform": f"translate(0,{_fmt(ymax + ymin)}) scale(1,-1)"}
    )
    ET.SubElement(
        scene,
        "rect",
        {
            "x": _fmt(xmin), "y": _fmt(ymin),
            "width": _fmt(width), "height": _fmt(height),
            "fill": _BACKGROUND, "stroke": "#333", "stroke-width": _fmt(stroke),
        },
    )
    for poly in workspace.obstacles:
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in poly.to_list())
        ET.SubElement(scene, "polygon", {"points": points, "fill": _OBSTACLE})

    targets = list(getattr(forest, "targets", ())) if forest is not None else []

    if forest is not None:
        edges = ET.SubElement(scene, "g", {"stroke-width": _fmt(stroke), "fill": "none"})
        for node in forest.nodes:
            if node.parent is None:
                continue
            parent = forest.nodes[node.parent]
            ET.SubElement(
                edges,
                "line",
                {
                    "x1": _fmt(parent.config.x), "y1": _fmt(parent.config.y),
                    "x2": _fmt(node.config.x), "y2": _fmt(node.config.y),
                    "stroke": PALETTE[node.tree % len(PALETTE)],
                },
            )
        for edge in getattr(forest, "virtual_edges", ()):
            a = forest.nodes[edge.a].config
            b = forest.nodes[edge.b].config
            ET.SubElement(
                scene,
                "line",
                {
                    "x1": _fmt(a.x), "y1": _fmt(a.y),
                    "x2": _fmt(b.x), "y2": _fmt(b.y),
                    "stroke": _VIRTUAL,
                    "stroke-width": _fmt(1.6 * stroke),
                    "stroke-dasharray": f"{_fmt(3 * stroke)} {_fmt(3 * stroke)}",
                },
            )

    for leg in tour_paths:
        points = " ".join(f"{_fmt(c.x)},{_fmt(c.y)}" for c in leg)
        ET.SubElement(
            scene,
            "polyline",
            {
                "points": points,
                "fill": "none",
                "stroke": _TOUR,
                "stroke-width": _fmt(4 * stroke),
                "stroke-opacity": "0.75",
                "stroke-linejoin": "round",
            },
        )

    for t in targets:
        ET.SubElement(
            scene,
            "circle",
            {
                "cx": _fmt(t.x), "cy": _fmt(t.y), "r": _fmt(5 * stroke),
                "fill": "none", "stroke": _TARGET, "stroke-width": _fmt(1.5 * stroke),
            },
        )
        ET.SubElement(
            scene,
            "circle",
            {"cx": _fmt(t.x), "cy": _fmt(t.y), "r": _fmt(1.8 * stroke), "fill": _TARGET},
        )

    text = ET.tostring(svg, encoding="unicode")
    document = '<?xml version="1.0" encoding="UTF-8"?>\n' + text + "\n"
    if path is not None:
        Path(path).write_text(document)
    return document
