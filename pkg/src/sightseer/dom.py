"""DOM analysis over page snapshots.

Detects fillable input widgets, extracts their attribute-declared
constraints as English descriptions, derives global/local textual context,
enumerates clickable candidates with stable identity keys, and measures
DOM-tree distances for the nearest-button selection mode.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from weakref import WeakKeyDictionary

from .driver import ElementHandle, PageSnapshot, RELEVANT_SELECTOR
from .errors import NoCandidates, ParseError
from .htmldom import Document, Node, NON_RENDERED_TAGS, collapse_ws, parse_html

# Input types that take free text; all other input types are not widgets.
TEXTUAL_INPUT_TYPES = frozenset(
    {"text", "password", "email", "number", "search", "tel", "url"}
)

IW_ATTRIBUTES = ("type", "id", "placeholder", "name", "value")

LOCAL_CONTEXT_RADIUS = 6
LOCAL_CONTEXT_MAX_CHARS = 120

CANDIDATE_KINDS = frozenset({"button", "link", "submit_input", "clickable_other"})


@dataclass(frozen=True)
class ConstraintDescription:
    attribute: str
    text: str


@dataclass
class InputWidget:
    handle: ElementHandle
    tag: str
    input_type: str
    attrs: dict[str, str]
    constraints: list[ConstraintDescription]
    local_context: str
    filled: bool
    key: str
    all_attrs: dict[str, str] = field(default_factory=dict, repr=False)
    node: Node | None = field(default=None, repr=False, compare=False)


@dataclass
class InteractiveElement:
    handle: ElementHandle
    key: str
    label: str
    kind: str
    node: Node | None = field(default=None, repr=False, compare=False)


def make_element_key(node: Node) -> str:
    """Stable identity: tag + normalized identity attrs + DOM path, hashed.

    Independent of geometry, stable across reloads of an identical page;
    sibling indices in the path split otherwise-identical twins.
    """
    ident = collapse_ws(node.attr("id") or "")
    name = collapse_ws(node.attr("name") or "")
    text = node.text()[:80]
    material = "|".join((node.tag, ident, name, text, node.dom_path()))
    return hashlib.sha1(material.encode("utf-8")).hexdigest()[:16]


class PageModel:
    """Parsed view of one snapshot: DOM tree zipped with wire geometry."""

    def __init__(self, snapshot: PageSnapshot):
        self.snapshot = snapshot
        try:
            self.doc: Document = parse_html(snapshot.source)
        except Exception as exc:  # html.parser rarely raises, but be explicit
            raise ParseError(f"cannot parse DOM: {exc}") from exc
        self.relevant: list[Node] = self.doc.select(RELEVANT_SELECTOR)
        if len(self.relevant) != len(snapshot.elements):
            raise ParseError(
                f"wire/source element mismatch: {len(snapshot.elements)} observed, "
                f"{len(self.relevant)} parsed"
            )
        self.observed = dict(zip(self.relevant, snapshot.elements))
        for node, obs in self.observed.items():
            if node.tag != obs.tag:
                raise ParseError(f"tag mismatch at {node.dom_path()}: {obs.tag}")
        self.by_remote_id = {
            obs.handle.remote_id: node for node, obs in self.observed.items()
        }
        self.keys = {node: make_element_key(node) for node in self.relevant}

    def node_for(self, handle: ElementHandle) -> Node:
        node = self.by_remote_id.get(handle.remote_id)
        if node is None:
            raise ParseError(f"unknown element handle {handle.remote_id}")
        return node


_models: "WeakKeyDictionary[PageSnapshot, PageModel]" = WeakKeyDictionary()


def model_of(snapshot: PageSnapshot) -> PageModel:
    model = _models.get(snapshot)
    if model is None:
        model = PageModel(snapshot)
        _models[snapshot] = model
    return model


def detect_input_widgets(snapshot: PageSnapshot) -> list[InputWidget]:
    """All displayed, enabled, editable input/textarea widgets in document order."""
    model = model_of(snapshot)
    widgets = []
    for node in model.relevant:
        if node.tag not in ("input", "textarea"):
            continue
        input_type = (node.attr("type") or "text").lower()
        if node.tag == "input" and input_type not in TEXTUAL_INPUT_TYPES:
            continue
        obs = model.observed[node]
        if not obs.handle.displayed or not obs.handle.enabled:
            continue
        if node.has_attr("readonly"):
            continue
        attrs = {a: node.attr(a) for a in IW_ATTRIBUTES if node.has_attr(a)}
        widget = InputWidget(
            handle=obs.handle,
            tag=node.tag,
            input_type=input_type,
            attrs=attrs,
            constraints=[],
            local_context="",
            filled=bool(obs.value.strip()),
            key=model.keys[node],
            all_attrs=dict(node.attrs),
            node=node,
        )
        widget.constraints = extract_constraints(widget)
        widget.local_context = local_context(snapshot, widget)
        widgets.append(widget)
    return widgets


def global_context(snapshot: PageSnapshot) -> str:
    return snapshot.title.strip()


def local_context(snapshot: PageSnapshot, widget: InputWidget) -> str:
    """Text of the nearest tree node carrying its own rendered text.

    Breadth-first outward up to LOCAL_CONTEXT_RADIUS edges; at equal
    distance preceding nodes beat following ones, then document order.
    """
    model = model_of(snapshot)
    start = widget.node if widget.node is not None else model.node_for(widget.handle)
    distances = _tree_distances(start, LOCAL_CONTEXT_RADIUS)
    best: tuple[int, int, int] | None = None
    best_text = ""
    for node, dist in distances.items():
        if node is start or node.tag in NON_RENDERED_TAGS:
            continue
        text = node.own_text()
        if not text:
            continue
        rank = (dist, 0 if node.order < start.order else 1, node.order)
        if best is None or rank < best:
            best = rank
            best_text = text
    return best_text[:LOCAL_CONTEXT_MAX_CHARS]


def _tree_distances(start: Node, radius: int) -> dict[Node, int]:
    distances = {start: 0}
    frontier = deque([start])
    while frontier:
        node = frontier.popleft()
        dist = distances[node]
        if dist >= radius:
            continue
        neighbors = list(node.element_children())
        if node.parent is not None:
            neighbors.append(node.parent)
        for nb in neighbors:
            if nb not in distances:
                distances[nb] = dist + 1
                frontier.append(nb)
    return distances


# (input type, attribute) -> description pattern; {value} is the raw attribute
# value, {base} the numeric step base (min, else value, else 0).
_CONSTRAINT_PATTERNS: dict[str, list[tuple[str, str]]] = {
    "text": [
        ("maxlength", "maximum length of text is {value}"),
        ("minlength", "minimum length of text is {value}"),
    ],
    "password": [
        ("maxlength", "maximum length of password is {value}"),
        ("minlength", "minimum length of password is {value}"),
    ],
    "email": [
        ("multiple", "multiple emails are allowed, with each email separated by a comma"),
    ],
    "number": [
        ("max", "maximum value of number is {value}"),
        ("min", "minimum value of number is {value}"),
        ("step", "number interval is {value} since {base}"),
    ],
    "search": [],
    "tel": [
        ("pattern", "telephone number has regular expression pattern {value}"),
    ],
    "url": [],
}

TEXTAREA_CONSTRAINT = "multi-line input is allowed"


def extract_constraints(widget: InputWidget) -> list[ConstraintDescription]:
    """Render attribute-declared constraints as English descriptions."""
    if widget.tag == "textarea":
        return [ConstraintDescription(attribute="", text=TEXTAREA_CONSTRAINT)]
    attrs = widget.all_attrs
    out = []
    for attr, pattern in _CONSTRAINT_PATTERNS.get(widget.input_type, []):
        if attr not in attrs:
            continue
        base = attrs.get("min", attrs.get("value", "0")) or "0"
        out.append(
            ConstraintDescription(
                attribute=attr,
                text=pattern.format(value=attrs[attr], base=base),
            )
        )
    return out


_KIND_BY_TAG = {"button": "button", "a": "link"}


def _candidate_kind(node: Node) -> str | None:
    if node.tag == "button":
        return "button"
    if node.tag == "a" and node.has_attr("href"):
        return "link"
    if node.tag == "input" and (node.attr("type") or "").lower() in ("submit", "button"):
        return "submit_input"
    if (node.attr("role") or "") == "button" or node.has_attr("onclick"):
        return "clickable_other"
    return None


def _candidate_label(node: Node) -> str:
    if node.tag == "input":
        return collapse_ws(node.attr("value") or node.attr("aria-label") or "Submit")
    return node.text()[:80] or collapse_ws(node.attr("aria-label") or "")


def candidate_elements(
    snapshot: PageSnapshot, kinds: frozenset[str] = CANDIDATE_KINDS
) -> list[InteractiveElement]:
    """Displayed, enabled clickable elements, deduplicated by key, document order."""
    model = model_of(snapshot)
    out = []
    seen: set[str] = set()
    for node in model.relevant:
        kind = _candidate_kind(node)
        if kind is None or kind not in kinds:
            continue
        obs = model.observed[node]
        if not obs.handle.displayed or not obs.handle.enabled:
            continue
        key = model.keys[node]
        if key in seen:
            continue
        seen.add(key)
        out.append(
            InteractiveElement(
                handle=obs.handle,
                key=key,
                label=_candidate_label(node),
                kind=kind,
                node=node,
            )
        )
    return out


def dom_distance(snapshot: PageSnapshot, a: ElementHandle, b: ElementHandle) -> int:
    """Length of the path between two nodes through their lowest common ancestor."""
    model = model_of(snapshot)
    return node_distance(model.node_for(a), model.node_for(b))


def node_distance(na: Node, nb: Node) -> int:
    if na is nb:
        return 0
    chain_a = [na, *na.ancestors()]
    depth_a = {id(n): i for i, n in enumerate(chain_a)}
    steps_b = 0
    node: Node | None = nb
    while node is not None:
        if id(node) in depth_a:
            return depth_a[id(node)] + steps_b
        node = node.parent
        steps_b += 1
    raise ParseError("nodes share no common ancestor")


def nearest_button(snapshot: PageSnapshot, widget: InputWidget) -> InteractiveElement:
    """The candidate minimizing DOM-tree distance to the widget; ties by document order."""
    candidates = candidate_elements(snapshot)
    if not candidates:
        raise NoCandidates("page has no clickable candidates")
    model = model_of(snapshot)
    wnode = widget.node if widget.node is not None else model.node_for(widget.handle)
    return min(
        candidates,
        key=lambda c: (node_distance(wnode, c.node), c.node.order),
    )
