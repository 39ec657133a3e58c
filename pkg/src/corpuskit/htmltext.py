"""Tolerant HTML parsing and a small CSS selector subset for text extraction.

The parser never raises on malformed markup: unclosed tags, stray end tags,
and self-nesting <p>/<li> are recovered in the HTML5 spirit. The selector
subset covers type selectors, ``.class``, ``#id``, the descendant
combinator, and a trailing ``::text`` meaning "collect the text of the
matched elements". Entity references are decoded; markup inside a matched
element is flattened to its text, with <br> contributing a newline and
script/style subtrees excluded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)
_SKIP_TEXT_TAGS = frozenset(("script", "style", "template"))
# Tags auto-closed when the same tag reopens directly inside them.
_SELF_NESTING = frozenset(("p", "li", "option", "dt", "dd", "tr", "td", "th"))


class Element:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: dict[str, str | None], parent: "Element | None"):
        self.tag = tag
        self.attrs = attrs
        self.children: list[Element | str] = []
        self.parent = parent

    @property
    def classes(self) -> list[str]:
        value = self.attrs.get("class") or ""
        return value.split()

    def __repr__(self) -> str:
        return f"<Element {self.tag} children={len(self.children)}>"


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Element("#document", {}, None)
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        if tag in _SELF_NESTING and self.stack[-1].tag == tag:
            self.stack.pop()
        element = Element(tag, dict(attrs), self.stack[-1])
        self.stack[-1].children.append(element)
        if tag not in VOID_TAGS:
            self.stack.append(element)

    def handle_startendtag(self, tag, attrs):
        element = Element(tag, dict(attrs), self.stack[-1])
        self.stack[-1].children.append(element)

    def handle_endtag(self, tag):
        # Pop to the nearest matching open tag; ignore unmatched end tags.
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def parse_html(html: str) -> Element:
    """Parse HTML into an element tree; never raises on malformed input."""
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root


def iter_elements(root: Element):
    """Yield elements in document order (pre-order DFS), excluding the root."""
    stack = list(reversed(root.children))
    while stack:
        node = stack.pop()
        if isinstance(node, Element):
            yield node
            stack.extend(reversed(node.children))


def element_text(element: Element) -> str:
    """Flatten an element's subtree to its text content.

    <br> becomes a newline; script/style/template subtrees contribute nothing.
    """
    parts: list[str] = []

    def walk(node: Element) -> None:
        for child in node.children:
            if isinstance(child, str):
                parts.append(child)
            elif child.tag == "br":
                parts.append("\n")
            elif child.tag not in _SKIP_TEXT_TAGS:
                walk(child)

    walk(element)
    return "".join(parts)


class SelectorError(ValueError):
    """Selector syntax outside the supported subset."""


@dataclass(frozen=True)
class _Step:
    tag: str | None
    classes: tuple[str, ...]
    id_: str | None


@dataclass(frozen=True)
class Selector:
    steps: tuple[_Step, ...]
    source: str


_STEP_RE = re.compile(r"^(?P<tag>[A-Za-z][A-Za-z0-9-]*)?(?P<quals>(?:[.#][\w-]+)*)$")
_QUAL_RE = re.compile(r"[.#][\w-]+")


def compile_selector(selector: str) -> Selector:
    """Compile a selector string, validating it against the supported subset.

    Raises SelectorError for anything outside {type, .class, #id, descendant
    combinator, trailing ::text} so bad configuration fails at load time,
    never at crawl time.
    """
    text = selector.strip()
    if text.endswith("::text"):
        text = text[: -len("::text")].rstrip()
    if "::" in text or ":" in text:
        raise SelectorError(f"unsupported pseudo-element or pseudo-class in {selector!r}")
    if any(ch in text for ch in ">+~[]()*,\"'"):
        raise SelectorError(f"unsupported selector syntax in {selector!r}")
    parts = text.split()
    if not parts:
        raise SelectorError(f"empty selector: {selector!r}")
    steps = []
    for part in parts:
        match = _STEP_RE.match(part)
        if not match or (not match.group("tag") and not match.group("quals")):
            raise SelectorError(f"unsupported simple selector {part!r} in {selector!r}")
        tag = match.group("tag")
        classes = []
        id_ = None
        for qual in _QUAL_RE.findall(match.group("quals")):
            if qual[0] == ".":
                classes.append(qual[1:])
            else:
                id_ = qual[1:]
        steps.append(_Step(tag=tag.lower() if tag else None, classes=tuple(classes), id_=id_))
    return Selector(steps=tuple(steps), source=selector)


def _step_matches(element: Element, step: _Step) -> bool:
    if step.tag is not None and element.tag != step.tag:
        return False
    if step.id_ is not None and element.attrs.get("id") != step.id_:
        return False
    if step.classes:
        have = element.classes
        return all(cls in have for cls in step.classes)
    return True


def _matches(element: Element, steps: tuple[_Step, ...]) -> bool:
    if not _step_matches(element, steps[-1]):
        return False
    i = len(steps) - 2
    node = element.parent
    while i >= 0 and node is not None and node.tag != "#document":
        if _step_matches(node, steps[i]):
            i -= 1
        node = node.parent
    return i < 0


def select(root: Element, selector: Selector) -> list[Element]:
    """All elements matching the selector, in document order."""
    return [el for el in iter_elements(root) if _matches(el, selector.steps)]


def extract_content(html: str | Element, selector: str | Selector) -> str:
    """Text of every element matched by the selector, joined by newlines.

    Each matched element's text is stripped; elements reducing to the empty
    string are dropped. A selector matching nothing yields the empty string.
    """
    if isinstance(selector, str):
        selector = compile_selector(selector)
    root = parse_html(html) if isinstance(html, str) else html
    chunks = []
    for element in select(root, selector):
        text = element_text(element).strip()
        if text:
            chunks.append(text)
    return "\n".join(chunks)


def extract_title(root: Element) -> str | None:
    """Text of the first <title> element, whitespace-collapsed; None if absent."""
    for element in iter_elements(root):
        if element.tag == "title":
            title = " ".join(element_text(element).split())
            return title or None
    return None


def iter_link_hrefs(root: Element) -> list[str]:
    """href attributes of anchors, in document order, skipping empty ones."""
    hrefs = []
    for element in iter_elements(root):
        if element.tag == "a":
            href = element.attrs.get("href")
            if href:
                hrefs.append(href)
    return hrefs
