"""Prompt assembly and answer parsing.

Prompts are concatenations of fixed template sections (role playing, visual
information, global/local context, input-widget description, output format),
loaded from an editable JSON resource so wording changes need no rebuild.
Answer parsing tolerates models that drop or echo the requested lead-in.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dom import InputWidget

INPUT_PROMPT = "input_prompt"
ELEMENT_PROMPT = "element_prompt"
LLM_INPUT_PROMPT = "llm_input_prompt"

TEXT_MARKER = "Generated Input Text:"
BUTTON_MARKER = "Selected Button Number:"

# Which widget attribute names the topic sentence; first present wins.
TOPIC_PRIORITY = ("id", "placeholder", "name")

MAX_PROMPT_CHARS = 4000

_SECTION_ORDER = ("RP", "VI", "GC", "LC", "IW", "OS")


@dataclass(frozen=True)
class PromptSection:
    kind: str  # RP | VI | GC | LC | IW | OS
    text: str


@dataclass
class PromptBundle:
    flavor: str
    text: str
    sections: list[PromptSection]
    image: bytes | None = None
    button_numbering: dict[int, str] | None = None

    def attach_image(self, image: bytes, numbering: dict[int, str] | None = None) -> "PromptBundle":
        self.image = image
        if numbering is not None:
            self.button_numbering = dict(numbering)
        return self


@dataclass(frozen=True)
class ParsedAnswer:
    kind: str  # generated_text | button_number | fallback_raw | fallback_skip
    text_value: str | None = None
    number_value: int | None = None


_templates_cache: dict[str, str] | None = None


def load_templates(path: str | Path | None = None) -> dict[str, str]:
    """Load section templates; default is the packaged resource file."""
    global _templates_cache
    if path is not None:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    if _templates_cache is None:
        raw = resources.files("sightseer").joinpath("templates/prompts.json").read_text("utf-8")
        _templates_cache = json.loads(raw)
    return _templates_cache


def _assemble(sections: list[PromptSection], lc_text: str, templates: dict[str, str]) -> str:
    text = " ".join(s.text for s in sections)
    if len(text) <= MAX_PROMPT_CHARS:
        return text
    # Over budget: shorten the local-context sentence first, then hard-cap.
    overshoot = len(text) - MAX_PROMPT_CHARS
    shortened = templates["lc"].format(text=lc_text[: max(len(lc_text) - overshoot, 0)])
    rebuilt = " ".join(
        shortened if s.kind == "LC" else s.text for s in sections
    )
    return rebuilt[:MAX_PROMPT_CHARS]


def _widget_sections(widget: InputWidget, templates: dict[str, str]) -> list[PromptSection]:
    sections = []
    if "type" in widget.attrs:
        sections.append(
            PromptSection("IW", templates["iw.type"].format(value=widget.attrs["type"]))
        )
    topic = next((widget.attrs[a] for a in TOPIC_PRIORITY if a in widget.attrs), None)
    if topic is not None:
        sections.append(PromptSection("IW", templates["iw.topic"].format(value=topic)))
    if "value" in widget.attrs:
        sections.append(
            PromptSection("IW", templates["iw.value"].format(value=widget.attrs["value"]))
        )
    if widget.constraints:
        joined = "; ".join(c.text for c in widget.constraints)
        sections.append(
            PromptSection("IW", templates["iw.constraints"].format(value=joined))
        )
    return sections


def build_input_prompt(
    gc: str,
    lc: str,
    widget: InputWidget,
    flavor: str = "vision",
    templates: dict[str, str] | None = None,
) -> PromptBundle:
    """Prompt requesting generated text for one widget.

    flavor "vision" carries the visual-information sentence and expects an
    annotated screenshot attached before querying; "text_only" omits both.
    """
    t = templates or load_templates()
    sections = [PromptSection("RP", t["rp.input"])]
    if flavor == "vision":
        sections.append(PromptSection("VI", t["vi.input"]))
    sections.append(PromptSection("GC", t["gc"].format(title=gc)))
    sections.append(PromptSection("LC", t["lc"].format(text=lc)))
    sections.extend(_widget_sections(widget, t))
    sections.append(PromptSection("OS", t["os.input"]))
    return PromptBundle(
        flavor=INPUT_PROMPT if flavor == "vision" else LLM_INPUT_PROMPT,
        text=_assemble(sections, lc, t),
        sections=sections,
    )


def build_element_prompt(
    gc: str,
    lc: str,
    generated_text: str,
    n_buttons: int,
    templates: dict[str, str] | None = None,
) -> PromptBundle:
    """Prompt asking which numbered button should follow the filled widget."""
    if n_buttons < 1:
        raise ValueError("n_buttons must be >= 1")
    t = templates or load_templates()
    numbers = ",".join(str(i) for i in range(1, n_buttons + 1))
    sections = [
        PromptSection("RP", t["rp.element"]),
        PromptSection("VI", t["vi.element"].format(numbers=numbers)),
        PromptSection("GC", t["gc"].format(title=gc)),
        PromptSection("LC", t["lc"].format(text=lc)),
        PromptSection("IW", t["iw.element"].format(value=generated_text)),
        PromptSection("OS", t["os.element"]),
    ]
    return PromptBundle(
        flavor=ELEMENT_PROMPT,
        text=_assemble(sections, lc, t),
        sections=sections,
    )


def section_kinds(bundle: PromptBundle) -> list[str]:
    return [s.kind for s in bundle.sections]


def parse_text_answer(raw: str) -> ParsedAnswer:
    """Take everything after the last lead-in marker; without one, use raw as-is."""
    matches = list(re.finditer(re.escape(TEXT_MARKER), raw, re.IGNORECASE))
    if matches:
        return ParsedAnswer(kind="generated_text", text_value=raw[matches[-1].end():].strip())
    return ParsedAnswer(kind="fallback_raw", text_value=raw.strip())


def parse_button_answer(raw: str, valid: set[int]) -> ParsedAnswer:
    """Extract the chosen button number; anything not in `valid` means skip."""
    if not valid:
        raise ValueError("valid number set must be non-empty")
    number = None
    matches = list(re.finditer(re.escape(BUTTON_MARKER), raw, re.IGNORECASE))
    if matches:
        m = re.search(r"\d+", raw[matches[-1].end():])
        if m:
            number = int(m.group())
    if number is None:
        m = re.search(r"\d+", raw)
        if m:
            number = int(m.group())
    if number is None or number not in valid:
        return ParsedAnswer(kind="fallback_skip")
    return ParsedAnswer(kind="button_number", number_value=number)
