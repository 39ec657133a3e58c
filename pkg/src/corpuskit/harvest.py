"""Configurable breadth-limited crawling with URL path filtering, link
discovery by pattern, and CSS-selector text extraction.

A spider is three fields of substance: start URLs, a link-following rule,
and a content selector, plus an optional ``url_must_contain`` path filter
that restricts the crawl to one language's section of a site. Crawling is
breadth-first with a visited set (no URL fetched twice, no recrawl),
honors a per-host delay and robots.txt by default, and never aborts on
fetch errors.

The page-fetch capability is injected: tests drive the crawl against
canned responses or a local fixture server through the same seam the
real HTTP fetcher plugs into.
"""

from __future__ import annotations

import hashlib
import re
import time
import urllib.error
import urllib.request
import urllib.robotparser
from collections import deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from urllib.parse import urljoin, urlsplit, urlunsplit

from . import __version__
from .core import Document
from .htmltext import (
    Element,
    Selector,
    compile_selector,
    extract_content,
    extract_title,
    iter_link_hrefs,
    parse_html,
)

DEFAULT_USER_AGENT = f"corpuskit/{__version__}"
_DEFAULT_PORTS = {"http": "80", "https": "443"}


class SpiderConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SpiderConfig:
    name: str
    start_urls: tuple[str, ...]
    content_selector: str
    allow_patterns: tuple[str, ...] = ()
    url_must_contain: str | None = None
    max_pages: int = 100
    min_delay_ms: int = 0
    same_host_only: bool = True
    obey_robots: bool = True
    user_agent: str = DEFAULT_USER_AGENT
    _selector: Selector = field(init=False, repr=False, compare=False)
    _allow_res: tuple[re.Pattern, ...] = field(init=False, repr=False, compare=False)
    _start_hosts: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "start_urls", tuple(self.start_urls))
        object.__setattr__(self, "allow_patterns", tuple(self.allow_patterns))
        if not self.start_urls:
            raise SpiderConfigError(f"spider {self.name!r}: start_urls must be non-empty")
        if self.max_pages < 1:
            raise SpiderConfigError(f"spider {self.name!r}: max_pages must be >= 1")
        if self.min_delay_ms < 0:
            raise SpiderConfigError(f"spider {self.name!r}: min_delay_ms must be >= 0")
        hosts = set()
        for url in self.start_urls:
            parts = urlsplit(url)
            if not parts.scheme or not parts.netloc:
                raise SpiderConfigError(f"spider {self.name!r}: start URL not absolute: {url!r}")
            hosts.add(urlsplit(canonicalize_url(url)).netloc)
        # Selector and patterns are compiled here so configuration errors
        # surface at load time, never mid-crawl.
        object.__setattr__(self, "_selector", compile_selector(self.content_selector))
        try:
            object.__setattr__(
                self, "_allow_res", tuple(re.compile(p) for p in self.allow_patterns)
            )
        except re.error as exc:
            raise SpiderConfigError(f"spider {self.name!r}: bad allow_pattern: {exc}") from exc
        object.__setattr__(self, "_start_hosts", frozenset(hosts))


@dataclass
class CrawlState:
    frontier: deque = field(default_factory=deque)
    visited: set[str] = field(default_factory=set)
    pages_fetched: int = 0
    docs_emitted: int = 0
    errors: int = 0


@dataclass(frozen=True)
class FetchResponse:
    status: int
    content_type: str
    body: str


class FetchTimeout(Exception):
    pass


class FetchError(Exception):
    pass


Fetcher = Callable[[str], FetchResponse]


def _remove_dot_segments(path: str) -> str:
    output: list[str] = []
    for segment in path.split("/"):
        if segment == "..":
            if output and output[-1] != "":
                output.pop()
        elif segment != ".":
            output.append(segment)
    result = "/".join(output)
    if path.startswith("/") and not result.startswith("/"):
        result = "/" + result
    return result


def canonicalize_url(url: str) -> str:
    """Canonical form: lowercase scheme/host, default port dropped, dot
    segments resolved, fragment stripped, empty path normalized to "/".
    Query strings are preserved (pagination often lives there)."""
    parts = urlsplit(url)
    scheme = parts.scheme.lower()
    host = parts.hostname.lower() if parts.hostname else ""
    port = parts.port
    netloc = host
    if port is not None and str(port) != _DEFAULT_PORTS.get(scheme):
        netloc = f"{host}:{port}"
    path = _remove_dot_segments(parts.path) or "/"
    return urlunsplit((scheme, netloc, path, parts.query, ""))


def url_filter(url: str, config: SpiderConfig) -> bool:
    """True iff the URL is inside the spider's crawl scope.

    Scope = host matches a start URL host (when same_host_only) and the
    url_must_contain substring, if configured, occurs in the URL path.
    """
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc:
        raise ValueError(f"url_filter requires an absolute URL, got {url!r}")
    if config.same_host_only and parts.netloc.lower() not in config._start_hosts:
        return False
    if config.url_must_contain is not None and config.url_must_contain not in parts.path:
        return False
    return True


def discover_links(html: str | Element, base_url: str, config: SpiderConfig) -> list[str]:
    """Frontier candidates from a page: anchors resolved against base_url,
    canonicalized, kept iff matching any allow_pattern AND passing
    url_filter, de-duplicated preserving document order.

    With no allow_patterns nothing is followed (seed-only crawl).
    """
    root = parse_html(html) if isinstance(html, str) else html
    seen: set[str] = set()
    links: list[str] = []
    for href in iter_link_hrefs(root):
        try:
            absolute = urljoin(base_url, href)
        except ValueError:
            continue
        parts = urlsplit(absolute)
        if parts.scheme not in ("http", "https"):
            continue
        url = canonicalize_url(absolute)
        if url in seen:
            continue
        if not any(rx.search(url) for rx in config._allow_res):
            continue
        if not url_filter(url, config):
            continue
        seen.add(url)
        links.append(url)
    return links


def _is_html(content_type: str) -> bool:
    if not content_type:
        return True
    return "html" in content_type.lower()


class _Politeness:
    """Spaces consecutive requests to one host at least min_delay apart."""

    def __init__(self, delay_s: float, clock: Callable[[], float], sleep: Callable[[float], None]):
        self.delay_s = delay_s
        self.clock = clock
        self.sleep = sleep
        self.last: dict[str, float] = {}

    def wait(self, host: str) -> None:
        if self.delay_s <= 0:
            return
        now = self.clock()
        previous = self.last.get(host)
        if previous is not None:
            remaining = self.delay_s - (now - previous)
            if remaining > 0:
                self.sleep(remaining)
        self.last[host] = self.clock()


def crawl(
    config: SpiderConfig,
    fetcher: Fetcher,
    state: CrawlState | None = None,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
    timestamp: Callable[[], str] | None = None,
) -> Iterator[Document]:
    """Breadth-first crawl from the start URLs, yielding one Document per
    fetched page with non-empty extraction.

    Fetch errors never abort the crawl: HTTP >= 400 and network failures
    are counted in ``state.errors`` and the page skipped; a timeout is
    retried once before counting. Stops when the frontier is empty or
    max_pages fetches have been attempted. Document ids are the SHA-256
    hex digest of the canonical URL; ``fetched_at`` is set only when a
    ``timestamp`` callable is supplied (deterministic runs omit it).
    """
    if state is None:
        state = CrawlState()
    politeness = _Politeness(config.min_delay_ms / 1000.0, clock, sleep)
    robots: dict[str, urllib.robotparser.RobotFileParser | None] = {}

    def request(url: str) -> FetchResponse:
        politeness.wait(urlsplit(url).netloc)
        return fetcher(url)

    def robots_allows(url: str) -> bool:
        if not config.obey_robots:
            return True
        parts = urlsplit(url)
        host = parts.netloc
        if host not in robots:
            robots_url = urlunsplit((parts.scheme, host, "/robots.txt", "", ""))
            try:
                response = request(robots_url)
            except Exception:
                response = None
            if response is None or response.status >= 400:
                robots[host] = None
            else:
                parser = urllib.robotparser.RobotFileParser()
                parser.parse(response.body.splitlines())
                robots[host] = parser
        parser = robots[host]
        return True if parser is None else parser.can_fetch(config.user_agent, url)

    for url in config.start_urls:
        canonical = canonicalize_url(url)
        if canonical not in state.visited and url_filter(canonical, config):
            state.visited.add(canonical)
            state.frontier.append(canonical)

    while state.frontier and state.pages_fetched < config.max_pages:
        url = state.frontier.popleft()
        if not robots_allows(url):
            continue
        state.pages_fetched += 1
        response = None
        try:
            response = request(url)
        except FetchTimeout:
            try:
                response = request(url)
            except Exception:
                response = None
        except Exception:
            response = None
        if response is None or response.status >= 400:
            state.errors += 1
            continue
        if not _is_html(response.content_type):
            continue

        root = parse_html(response.body)
        text = extract_content(root, config._selector)
        if text:
            state.docs_emitted += 1
            yield Document(
                id=hashlib.sha256(url.encode("utf-8")).hexdigest(),
                source_id=config.name,
                url=url,
                title=extract_title(root),
                text=text,
                fetched_at=timestamp() if timestamp is not None else None,
            )
        for link in discover_links(root, url, config):
            if link not in state.visited:
                state.visited.add(link)
                state.frontier.append(link)


def urllib_fetcher(user_agent: str = DEFAULT_USER_AGENT, timeout_s: float = 20.0) -> Fetcher:
    """Real HTTP fetcher: URL in, (status, content-type, decoded body) out.

    Bodies are decoded with the content-type-declared charset, falling back
    to UTF-8 with replacement.
    """

    def fetch(url: str) -> FetchResponse:
        req = urllib.request.Request(url, headers={"User-Agent": user_agent})
        try:
            with urllib.request.urlopen(req, timeout=timeout_s) as response:
                raw = response.read()
                content_type = response.headers.get("Content-Type", "")
                charset = response.headers.get_content_charset() or "utf-8"
                try:
                    body = raw.decode(charset, errors="replace")
                except LookupError:
                    body = raw.decode("utf-8", errors="replace")
                return FetchResponse(response.status, content_type, body)
        except urllib.error.HTTPError as exc:
            return FetchResponse(exc.code, exc.headers.get("Content-Type", ""), "")
        except TimeoutError as exc:
            raise FetchTimeout(str(exc)) from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise FetchTimeout(str(exc)) from exc
            raise FetchError(str(exc)) from exc

    return fetch
