"""Minimal element-tree DOM built on stdlib html.parser.

The analysis code and the bundled in-process browser both parse markup
through this module, so the two sides always see identical trees (same
sibling indices, same document order). Only the HTML subset needed for
form-centric pages is modeled: elements, text, attributes, void tags.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser

VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

NON_RENDERED_TAGS = frozenset({"script", "style", "template", "head", "title"})


def collapse_ws(text: str) -> str:
    """Collapse runs of whitespace to single spaces and strip the ends."""
    return " ".join(text.split())


class Node:
    """One element. Children hold Node instances and plain-str text runs."""

    __slots__ = ("tag", "attrs", "parent", "children", "order")

    def __init__(self, tag: str, attrs: dict[str, str], parent: "Node | None" = None):
        self.tag = tag
        self.attrs = attrs
        self.parent = parent
        self.children: list[Node | str] = []
        self.order = -1  # document-order index, assigned after parse

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        ident = self.attrs.get("id")
        return f"<Node {self.tag}{'#' + ident if ident else ''} @{self.order}>"

    def attr(self, name: str, default: str | None = None) -> str | None:
        return self.attrs.get(name, default)

    def has_attr(self, name: str) -> bool:
        return name in self.attrs

    def element_children(self) -> list["Node"]:
        return [c for c in self.children if isinstance(c, Node)]

    def iter_elements(self):
        """Pre-order walk including self."""
        yield self
        for child in self.children:
            if isinstance(child, Node):
                yield from child.iter_elements()

    def own_text(self) -> str:
        """Whitespace-collapsed text of the direct text children only."""
        return collapse_ws("".join(c for c in self.children if isinstance(c, str)))

    def text(self) -> str:
        """Whitespace-collapsed subtree text, skipping script/style content."""
        parts: list[str] = []
        self._collect_text(parts)
        return collapse_ws("".join(parts))

    def _collect_text(self, parts: list[str]) -> None:
        if self.tag in NON_RENDERED_TAGS:
            return
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                child._collect_text(parts)
        parts.append(" ")  # element boundaries separate words

    def sibling_index(self) -> int:
        """Index among the element siblings of the parent (0 for the root)."""
        if self.parent is None:
            return 0
        return self.parent.element_children().index(self)

    def dom_path(self) -> str:
        """Root-to-node path with per-parent sibling indices, e.g. html[0]/body[1]/input[2]."""
        parts = []
        node: Node | None = self
        while node is not None:
            parts.append(f"{node.tag}[{node.sibling_index()}]")
            node = node.parent
        return "/".join(reversed(parts))

    def depth(self) -> int:
        d = 0
        node = self.parent
        while node is not None:
            d += 1
            node = node.parent
        return d

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent


def is_displayed(node: Node) -> bool:
    """Static displayedness: display:none / hidden / type=hidden on self or ancestors."""
    if node.tag == "input" and (node.attr("type") or "").lower() == "hidden":
        return False
    chain = [node, *node.ancestors()]
    for el in chain:
        if el.has_attr("hidden"):
            return False
        style = el.attr("style") or ""
        if re.search(r"display\s*:\s*none", style, re.IGNORECASE):
            return False
        if el.tag in NON_RENDERED_TAGS:
            return False
    return True


def is_enabled(node: Node) -> bool:
    if node.has_attr("disabled"):
        return False
    return not any(a.tag == "fieldset" and a.has_attr("disabled") for a in node.ancestors())


class Document:
    def __init__(self, root: Node):
        self.root = root
        for i, el in enumerate(root.iter_elements()):
            el.order = i

    def iter_elements(self):
        return self.root.iter_elements()

    @property
    def body(self) -> Node:
        for el in self.root.element_children():
            if el.tag == "body":
                return el
        return self.root

    @property
    def title(self) -> str:
        for el in self.iter_elements():
            if el.tag == "title":
                return collapse_ws("".join(c for c in el.children if isinstance(c, str)))
        return ""

    def select(self, selector: str) -> list[Node]:
        """Comma-grouped simple selectors (tag, #id, .class, [attr], [attr=value]).

        Matches are deduplicated and returned in document order, mirroring how
        browsers evaluate grouped CSS for findElements.
        """
        simples = [_parse_simple(s.strip()) for s in selector.split(",") if s.strip()]
        out = [
            el
            for el in self.iter_elements()
            if any(_match_simple(el, s) for s in simples)
        ]
        return out

    def get_by_path(self, path: str) -> Node | None:
        node = self.root
        steps = path.split("/")
        if not steps or _step_of(node) != steps[0]:
            return None
        for step in steps[1:]:
            node = next((c for c in node.element_children() if _step_of(c) == step), None)
            if node is None:
                return None
        return node


def _step_of(node: Node) -> str:
    return f"{node.tag}[{node.sibling_index()}]"


_SIMPLE_RE = re.compile(
    r"^(?P<tag>[a-zA-Z][\w-]*|\*)?"
    r"(?P<id>#[\w-]+)?"
    r"(?P<cls>\.[\w-]+)?"
    r"(?P<attrs>(?:\[[^\]]+\])*)$"
)
_ATTR_RE = re.compile(r"\[\s*([\w-]+)\s*(?:=\s*(?:\"([^\"]*)\"|'([^']*)'|([^\]\s]+)))?\s*\]")


def _parse_simple(sel: str):
    m = _SIMPLE_RE.match(sel)
    if not m:
        raise ValueError(f"unsupported selector: {sel!r}")
    tag = m.group("tag")
    ident = m.group("id")[1:] if m.group("id") else None
    cls = m.group("cls")[1:] if m.group("cls") else None
    attrs = []
    for am in _ATTR_RE.finditer(m.group("attrs") or ""):
        name = am.group(1).lower()
        value = next((g for g in am.groups()[1:] if g is not None), None)
        attrs.append((name, value))
    return (None if tag in (None, "*") else tag.lower(), ident, cls, attrs)


def _match_simple(el: Node, parsed) -> bool:
    tag, ident, cls, attrs = parsed
    if tag is not None and el.tag != tag:
        return False
    if ident is not None and el.attr("id") != ident:
        return False
    if cls is not None and cls not in (el.attr("class") or "").split():
        return False
    for name, value in attrs:
        if not el.has_attr(name):
            return False
        if value is not None and el.attr(name) != value:
            return False
    return True


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.top: list[Node | str] = []
        self.stack: list[Node] = []

    def _append(self, item: Node | str) -> None:
        if self.stack:
            self.stack[-1].children.append(item)
        else:
            self.top.append(item)

    def handle_starttag(self, tag, attrs):
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name.lower(), value if value is not None else "")
        node = Node(tag.lower(), attr_map, self.stack[-1] if self.stack else None)
        self._append(node)
        if tag.lower() not in VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        if tag.lower() not in VOID_TAGS:
            self.handle_endtag(tag)

    def handle_endtag(self, tag):
        tag = tag.lower()
        # Tolerate stray close tags: pop to the nearest matching open element.
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        if data:
            self._append(data)


def parse_html(source: str) -> Document:
    """Parse markup into a Document, synthesizing html/body wrappers for fragments."""
    builder = _TreeBuilder()
    builder.feed(source or "")
    builder.close()

    html_node = next(
        (n for n in builder.top if isinstance(n, Node) and n.tag == "html"), None
    )
    if html_node is None:
        html_node = Node("html", {})
        body = Node("body", {}, html_node)
        html_node.children.append(body)
        for item in builder.top:
            if isinstance(item, Node):
                item.parent = body
            body.children.append(item)
    elif not any(c.tag == "body" for c in html_node.element_children()):
        body = Node("body", {}, html_node)
        moved: list[Node | str] = []
        kept: list[Node | str] = []
        for item in html_node.children:
            if isinstance(item, Node) and item.tag in ("head", "body"):
                kept.append(item)
            else:
                if isinstance(item, Node):
                    item.parent = body
                moved.append(item)
        body.children = moved
        html_node.children = [*kept, body]
    return Document(html_node)
