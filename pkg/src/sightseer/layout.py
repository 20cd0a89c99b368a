"""Deterministic vertical block layout and rasterization for parsed pages.

The in-process browser has no real rendering engine; it stacks rendered
boxes top to bottom with fixed type-dependent sizes. The same layout feeds
element geometry, screenshots, and static snapshots, so coordinates are
consistent everywhere and bit-stable across runs.
"""

from __future__ import annotations

from PIL import Image, ImageDraw, ImageFont

from .geometry import Rect
from .htmldom import Document, Node, NON_RENDERED_TAGS, is_displayed

MARGIN = 16
GAP = 8
CHAR_W = 7
TEXT_H = 18
FIELD_H = 26
TEXTAREA_H = 60
FIELD_W = 220

INTERACTIVE_TAGS = frozenset({"input", "textarea", "select", "button", "a"})


def is_interactive_box(node: Node) -> bool:
    if node.tag in INTERACTIVE_TAGS:
        return True
    return node.has_attr("onclick") or (node.attr("role") or "") == "button"


def box_label(node: Node) -> str:
    if node.tag == "input":
        kind = (node.attr("type") or "text").lower()
        if kind in ("submit", "button"):
            return node.attr("value") or "Submit"
        return node.attr("value") or node.attr("placeholder") or ""
    return node.text()


def compute_layout(doc: Document, viewport_width: int) -> dict[Node, Rect]:
    """Assign a rect to every displayed element; containers get child bounding boxes."""
    rects: dict[Node, Rect] = {}
    cursor = {"y": MARGIN}
    max_w = viewport_width - 2 * MARGIN

    def emit(width: float, height: float) -> Rect:
        rect = Rect(MARGIN, cursor["y"], min(width, max_w), height)
        cursor["y"] += height + GAP
        return rect

    def fill_subtree(node: Node, rect: Rect) -> None:
        for el in node.iter_elements():
            rects[el] = rect

    def walk(node: Node) -> Rect | None:
        if node.tag in NON_RENDERED_TAGS or not is_displayed(node):
            return None
        if is_interactive_box(node):
            rect = _interactive_rect(node, emit)
            fill_subtree(node, rect)
            return rect
        bounds: Rect | None = None
        own = node.own_text()
        if own:
            h = 30 if node.tag in ("h1", "h2", "h3") else TEXT_H
            bounds = emit(CHAR_W * max(len(own), 1), h)
        for child in node.element_children():
            child_rect = walk(child)
            if child_rect is not None:
                bounds = child_rect if bounds is None else bounds.union(child_rect)
        if bounds is not None:
            rects[node] = bounds
        return bounds

    walk(doc.body)
    return rects


def _interactive_rect(node: Node, emit) -> Rect:
    if node.tag == "textarea":
        return emit(FIELD_W, TEXTAREA_H)
    if node.tag == "input" and (node.attr("type") or "text").lower() not in (
        "submit",
        "button",
    ):
        return emit(FIELD_W, FIELD_H)
    if node.tag == "select":
        return emit(140, FIELD_H)
    label = box_label(node)
    return emit(14 + CHAR_W * max(len(label), 1), FIELD_H)


def page_height(rects: dict[Node, Rect]) -> int:
    if not rects:
        return 0
    return int(max(r.bottom for r in rects.values()) + MARGIN)


def render_page(
    doc: Document,
    rects: dict[Node, Rect],
    viewport: tuple[int, int],
    scale: float = 1.0,
) -> Image.Image:
    """Rasterize the laid-out page into an RGBA viewport screenshot."""
    w = int(viewport[0] * scale)
    h = int(viewport[1] * scale)
    img = Image.new("RGBA", (w, h), (255, 255, 255, 255))
    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default()

    def sbox(rect: Rect):
        r = rect.scaled(scale)
        return (r.x, r.y, r.right - 1, r.bottom - 1)

    seen: set[int] = set()
    for el in doc.iter_elements():
        rect = rects.get(el)
        if rect is None or id(rect) in seen or rect.y >= viewport[1]:
            continue
        if is_interactive_box(el):
            seen.add(id(rect))
            label = box_label(el)
            if el.tag == "a":
                draw.text((rect.x * scale, rect.y * scale + 2), label, fill=(20, 60, 200), font=font)
                continue
            fill = (245, 245, 245) if el.tag in ("input", "textarea") else (224, 224, 224)
            draw.rectangle(sbox(rect), fill=fill, outline=(120, 120, 120))
            draw.text(((rect.x + 6) * scale, (rect.y + 6) * scale), label[:60], fill=(0, 0, 0), font=font)
        elif el.own_text() and el.tag not in NON_RENDERED_TAGS:
            draw.text((rect.x * scale, rect.y * scale + 2), el.own_text()[:80], fill=(0, 0, 0), font=font)
    return img
