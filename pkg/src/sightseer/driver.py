"""Browser session layer speaking the W3C WebDriver wire protocol over HTTP.

Works against any compliant remote end (chromedriver, geckodriver, or the
bundled deterministic stub server). Snapshots capture URL, title, serialized
DOM, a viewport screenshot, and geometry for the relevant elements in one
consistent page generation.
"""

from __future__ import annotations

import base64
import io
import time
import warnings
from dataclasses import dataclass, field

import requests
from PIL import Image

from .errors import (
    ConnectionFailed,
    NavigationFailed,
    NotInteractable,
    SessionLost,
    StaleElement,
)
from .geometry import Rect
from .htmldom import is_displayed, is_enabled, parse_html
from .layout import compute_layout, render_page

# Grouped query used for every snapshot; dom analysis replays the same
# selector on the serialized source so wire handles zip with parsed nodes.
RELEVANT_SELECTOR = "input, textarea, select, button, a, [role], [onclick]"

ELEMENT_KEY = "element-6066-11e4-a52e-4f735466cecf"

_VALUE_TAGS = ("input", "textarea", "select")


@dataclass
class FailureRecord:
    """One severe browser-console entry."""

    timestamp: float
    message: str
    source: str = ""

    def to_json(self) -> dict:
        return {"timestamp": self.timestamp, "message": self.message, "source": self.source}


@dataclass
class ElementHandle:
    remote_id: str
    rect: Rect
    displayed: bool = True
    enabled: bool = True


@dataclass
class SnapshotElement:
    """A relevant element observed on the wire, in document order."""

    handle: ElementHandle
    tag: str
    value: str = ""


@dataclass(eq=False)
class PageSnapshot:
    url: str
    title: str
    source: str
    screenshot_png: bytes
    viewport: tuple[int, int]
    device_pixel_ratio: float
    elements: list[SnapshotElement] = field(default_factory=list)

    @classmethod
    def from_static_html(
        cls,
        source: str,
        url: str = "static://page",
        viewport: tuple[int, int] = (1280, 800),
    ) -> "PageSnapshot":
        """Build a snapshot straight from markup (no browser), with synthetic layout."""
        doc = parse_html(source)
        rects = compute_layout(doc, viewport[0])
        shot = render_page(doc, rects, viewport)
        buf = io.BytesIO()
        shot.save(buf, format="PNG")
        elements = []
        for i, node in enumerate(doc.select(RELEVANT_SELECTOR)):
            rect = rects.get(node, Rect(0, 0, 0, 0))
            handle = ElementHandle(
                remote_id=f"static-{i}",
                rect=rect,
                displayed=is_displayed(node),
                enabled=is_enabled(node),
            )
            value = node.attr("value") or ""
            if node.tag == "textarea":
                value = node.own_text()
            elements.append(SnapshotElement(handle=handle, tag=node.tag, value=value))
        return cls(
            url=url,
            title=doc.title,
            source=source,
            screenshot_png=buf.getvalue(),
            viewport=viewport,
            device_pixel_ratio=1.0,
            elements=elements,
        )


@dataclass(eq=False)
class BrowserSession:
    endpoint: str
    session_id: str
    viewport: tuple[int, int]
    device_pixel_ratio: float = 1.0
    page_load_timeout: float = 5.0
    actions_executed: int = 0
    _http: requests.Session = field(default_factory=requests.Session, repr=False)
    _log_endpoint_missing: bool = field(default=False, repr=False)

    def _url(self, path: str) -> str:
        return f"{self.endpoint.rstrip('/')}/session/{self.session_id}{path}"


def _unwrap(resp: requests.Response):
    try:
        payload = resp.json()
    except ValueError as exc:
        raise SessionLost(f"non-JSON wire response: {resp.status_code}") from exc
    value = payload.get("value")
    if resp.status_code >= 400 or (isinstance(value, dict) and "error" in value):
        code = (value or {}).get("error", "unknown error") if isinstance(value, dict) else "unknown error"
        message = (value or {}).get("message", "") if isinstance(value, dict) else str(value)
        raise _map_error(code, message)
    return value


def _map_error(code: str, message: str) -> Exception:
    if code == "stale element reference":
        return StaleElement(message or code)
    if code in ("element not interactable", "invalid element state"):
        return NotInteractable(message or code)
    if code in ("invalid session id", "no such window", "session not created"):
        return SessionLost(message or code)
    if code in ("invalid argument", "unknown url"):
        return NavigationFailed(message or code)
    if code == "unknown command":
        return _UnknownCommand(message or code)
    return SessionLost(f"{code}: {message}")


class _UnknownCommand(Exception):
    pass


def _request(session: BrowserSession, method: str, path: str, body: dict | None = None):
    try:
        resp = session._http.request(
            method, session._url(path), json=body if body is not None else {}, timeout=30
        )
    except requests.RequestException as exc:
        raise SessionLost(f"wire transport failed: {exc}") from exc
    return _unwrap(resp)


def connect(
    endpoint: str,
    start_url: str,
    viewport: tuple[int, int] = (1280, 800),
    page_load_timeout: float = 5.0,
) -> BrowserSession:
    """Open a WebDriver session, size the window, and load the start URL."""
    http = requests.Session()
    try:
        resp = http.post(
            f"{endpoint.rstrip('/')}/session",
            json={"capabilities": {"alwaysMatch": {}}},
            timeout=30,
        )
    except requests.RequestException as exc:
        raise ConnectionFailed(f"WebDriver server unreachable at {endpoint}: {exc}") from exc
    value = _unwrap(resp)
    session_id = value.get("sessionId") or (value.get("capabilities") or {}).get("sessionId")
    if not session_id:
        raise ConnectionFailed(f"no session id in response from {endpoint}")
    session = BrowserSession(
        endpoint=endpoint,
        session_id=session_id,
        viewport=viewport,
        page_load_timeout=page_load_timeout,
        _http=http,
    )
    try:
        _request(
            session,
            "POST",
            "/window/rect",
            {"width": viewport[0], "height": viewport[1]},
        )
    except (_UnknownCommand, SessionLost):
        pass  # window sizing is best-effort on remote ends without it
    navigate(session, start_url)
    return session


def navigate(session: BrowserSession, url: str) -> None:
    try:
        _request(session, "POST", "/url", {"url": url})
    except (NavigationFailed, SessionLost):
        raise
    except _UnknownCommand as exc:
        raise NavigationFailed(str(exc)) from exc


def close(session: BrowserSession) -> None:
    try:
        _request(session, "DELETE", "")
    except SessionLost:
        pass
    session.session_id = ""


def current_url(session: BrowserSession) -> str:
    return _request(session, "GET", "/url")


def snapshot(session: BrowserSession, max_attempts: int = 3) -> PageSnapshot:
    """Capture a consistent observation; re-captures if a navigation interrupts."""
    if not session.session_id:
        raise SessionLost("session is closed")
    last_url = None
    for _ in range(max_attempts):
        url0 = current_url(session)
        title = _request(session, "GET", "/title") or ""
        source = _request(session, "GET", "/source") or ""
        shot_b64 = _request(session, "GET", "/screenshot")
        refs = _request(
            session,
            "POST",
            "/elements",
            {"using": "css selector", "value": RELEVANT_SELECTOR},
        )
        try:
            elements = [_observe_element(session, ref[ELEMENT_KEY]) for ref in refs]
        except StaleElement:
            last_url = url0
            continue  # page changed under us; recapture
        if current_url(session) != url0:
            last_url = url0
            continue
        png = base64.b64decode(shot_b64)
        dpr = _raster_ratio(png, session.viewport)
        session.device_pixel_ratio = dpr
        return PageSnapshot(
            url=url0,
            title=title.strip(),
            source=source,
            screenshot_png=png,
            viewport=session.viewport,
            device_pixel_ratio=dpr,
            elements=elements,
        )
    raise SessionLost(f"page kept navigating during capture (last url {last_url})")


def _observe_element(session: BrowserSession, remote_id: str) -> SnapshotElement:
    base = f"/element/{remote_id}"
    rect = _request(session, "GET", f"{base}/rect")
    tag = (_request(session, "GET", f"{base}/name") or "").lower()
    enabled = bool(_request(session, "GET", f"{base}/enabled"))
    try:
        displayed = bool(_request(session, "GET", f"{base}/displayed"))
    except _UnknownCommand:
        displayed = rect.get("width", 0) > 0 and rect.get("height", 0) > 0
    value = ""
    if tag in _VALUE_TAGS:
        value = _request(session, "GET", f"{base}/property/value") or ""
    handle = ElementHandle(
        remote_id=remote_id,
        rect=Rect(
            float(rect.get("x", 0)),
            float(rect.get("y", 0)),
            float(rect.get("width", 0)),
            float(rect.get("height", 0)),
        ),
        displayed=displayed,
        enabled=enabled,
    )
    return SnapshotElement(handle=handle, tag=tag, value=str(value))


def _raster_ratio(png: bytes, viewport: tuple[int, int]) -> float:
    try:
        with Image.open(io.BytesIO(png)) as img:
            width = img.size[0]
    except Exception:
        return 1.0
    return width / viewport[0] if viewport[0] else 1.0


def type_text(session: BrowserSession, element: ElementHandle, text: str) -> None:
    """Clear the field and type text; counts as one web action."""
    base = f"/element/{element.remote_id}"
    _request(session, "POST", f"{base}/clear")
    _request(session, "POST", f"{base}/value", {"text": text})
    session.actions_executed += 1


def click(session: BrowserSession, element: ElementHandle) -> None:
    """Dispatch a click and await document readiness; counts as one web action."""
    _request(session, "POST", f"/element/{element.remote_id}/click")
    session.actions_executed += 1
    _await_ready(session)


def _await_ready(session: BrowserSession) -> None:
    deadline = time.monotonic() + session.page_load_timeout
    while time.monotonic() < deadline:
        try:
            state = _request(
                session, "POST", "/execute/sync", {"script": "return document.readyState", "args": []}
            )
        except _UnknownCommand:
            return  # remote end cannot run scripts; its click already blocked on load
        except SessionLost:
            return
        if state == "complete":
            return
        time.sleep(0.05)


def console_failures(session: BrowserSession) -> list[FailureRecord]:
    """Drain severe console entries accumulated since the last call."""
    if not session.session_id:
        raise SessionLost("session is closed")
    entries = None
    for path in ("/se/log", "/log"):
        try:
            entries = _request(session, "POST", path, {"type": "browser"})
            break
        except (_UnknownCommand, NavigationFailed):
            continue
    if entries is None:
        if not session._log_endpoint_missing:
            warnings.warn("remote end exposes no console log endpoint; failures not collected")
            session._log_endpoint_missing = True
        return []
    records = []
    for entry in entries:
        if str(entry.get("level", "")).upper() not in ("SEVERE", "ERROR"):
            continue
        records.append(
            FailureRecord(
                timestamp=float(entry.get("timestamp", 0)),
                message=str(entry.get("message", "")),
                source=str(entry.get("source", "")),
            )
        )
    return records
