"""Encyclopedia background lookup with an offline cache and manual overrides.

Backgrounds come from a search + page-summary REST API (Wikipedia-compatible,
single configurable base URL). Every result, including "page not found", is
cached as one JSON file per normalized phrase so offline runs are pure.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
import urllib.parse
from dataclasses import dataclass
from pathlib import Path

import httpx

from .entities import split_sentences
from .errors import InputError, NetworkError
from .similarity import normalize_mention

CACHE_DIR_ENV = "STAKENLI_CACHE_DIR"
DEFAULT_BASE_URL = "https://en.wikipedia.org"


@dataclass(frozen=True)
class PageRef:
    title: str
    url: str
    summary: str


@dataclass(frozen=True)
class CacheEntry:
    page: PageRef | None  # None records a cached negative result
    fetched_at: float


def _cache_key(phrase: str) -> str:
    normalized = normalize_mention(phrase)
    slug = re.sub(r"[^a-z0-9]+", "-", normalized).strip("-")[:60]
    digest = hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:12]
    return f"{slug or 'blank'}-{digest}"


class KnowledgeCache:
    """Directory-backed phrase -> PageRef map; hits never touch the network."""

    def __init__(self, directory=None):
        if directory is None:
            directory = os.environ.get(CACHE_DIR_ENV)
        if directory is None:
            raise InputError(
                f"no cache directory given and {CACHE_DIR_ENV} is not set"
            )
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, phrase: str) -> Path:
        return self.directory / f"{_cache_key(phrase)}.json"

    def get(self, phrase: str) -> CacheEntry | None:
        path = self._path(phrase)
        if not path.exists():
            return None
        raw = json.loads(path.read_text(encoding="utf-8"))
        page = None
        if raw.get("found"):
            page = PageRef(**raw["page"])
        return CacheEntry(page=page, fetched_at=raw.get("fetched_at", 0.0))

    def put(self, phrase: str, page: PageRef | None) -> CacheEntry:
        entry = CacheEntry(page=page, fetched_at=time.time())
        payload = {
            "phrase": phrase,
            "found": page is not None,
            "fetched_at": entry.fetched_at,
        }
        if page is not None:
            payload["page"] = {"title": page.title, "url": page.url, "summary": page.summary}
        tmp = self._path(phrase).with_suffix(".tmp")
        tmp.write_text(
            json.dumps(payload, sort_keys=True, ensure_ascii=False), encoding="utf-8"
        )
        tmp.replace(self._path(phrase))  # atomic per-entry write
        return entry


def load_overrides(path) -> dict[str, str]:
    """Override file: JSON map from entity phrase to definite page title."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"override file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg}")
    if not isinstance(raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
    ):
        raise InputError(f"{path}: expected a JSON object mapping phrase to title")
    return raw


class EncyclopediaClient:
    """Minimal search + summary client; counts requests for cache verification."""

    def __init__(self, base_url: str = DEFAULT_BASE_URL, timeout: float = 10.0, transport=None):
        self.base_url = base_url.rstrip("/")
        self.request_count = 0
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def _get(self, path: str, params=None) -> httpx.Response:
        self.request_count += 1
        try:
            return self._client.get(self.base_url + path, params=params)
        except httpx.HTTPError as exc:
            raise NetworkError(f"encyclopedia request failed: {exc}", provider="encyclopedia")

    def search_title(self, query: str) -> str | None:
        resp = self._get("/w/rest.php/v1/search/page", params={"q": query, "limit": 1})
        if resp.status_code != 200:
            raise NetworkError(
                f"search returned HTTP {resp.status_code}", provider="encyclopedia"
            )
        pages = resp.json().get("pages", [])
        return pages[0]["title"] if pages else None

    def fetch_summary(self, title: str) -> PageRef | None:
        quoted = urllib.parse.quote(title.replace(" ", "_"), safe="")
        resp = self._get(f"/api/rest_v1/page/summary/{quoted}")
        if resp.status_code == 404:
            return None
        if resp.status_code != 200:
            raise NetworkError(
                f"summary returned HTTP {resp.status_code}", provider="encyclopedia"
            )
        data = resp.json()
        summary = data.get("extract", "")
        if not summary:
            return None
        url = (
            data.get("content_urls", {}).get("desktop", {}).get("page")
            or f"{self.base_url}/wiki/{quoted}"
        )
        return PageRef(title=data.get("title", title), url=url, summary=summary)

    def close(self):
        self._client.close()


def lookup_page(
    phrase: str,
    cache: KnowledgeCache,
    overrides: dict[str, str] | None = None,
    online: bool = False,
    client: EncyclopediaClient | None = None,
) -> PageRef | None:
    """Resolve a phrase to a page: overrides first, then cache, then remote search.

    Whatever the outcome, it is written to the cache, so a second call never
    reaches the network. Offline misses return None.
    """
    overrides = overrides or {}
    title = overrides.get(phrase)
    cache_phrase = title if title is not None else phrase
    entry = cache.get(cache_phrase)
    if entry is not None:
        return entry.page
    if not online:
        return None
    if client is None:
        client = EncyclopediaClient()
    if title is None:
        title = client.search_title(phrase)
        if title is None:
            cache.put(phrase, None)
            return None
    page = client.fetch_summary(title)
    cache.put(cache_phrase, page)
    return page


def intro_sentences(page: PageRef, n: int) -> str:
    """First n sentences of the page summary, single-space joined."""
    if n < 1:
        raise ValueError("n must be at least 1")
    sentences = split_sentences(page.summary)
    return " ".join(s.text for s in sentences[:n])
