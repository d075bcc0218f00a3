import json

import httpx
import pytest

from stakenli.errors import InputError, NetworkError
from stakenli.knowledge import (
    EncyclopediaClient,
    KnowledgeCache,
    PageRef,
    intro_sentences,
    load_overrides,
    lookup_page,
)

RBI_PAGE = PageRef(
    title="Reserve Bank of India",
    url="https://en.wikipedia.org/wiki/Reserve_Bank_of_India",
    summary="The central bank of India. It sets policy. It sits in Mumbai.",
)


def fake_wiki(found_title="Reserve Bank of India", summary=RBI_PAGE.summary):
    def handler(request):
        if request.url.path == "/w/rest.php/v1/search/page":
            pages = [{"title": found_title}] if found_title else []
            return httpx.Response(200, json={"pages": pages})
        if request.url.path.startswith("/api/rest_v1/page/summary/"):
            return httpx.Response(
                200,
                json={
                    "title": found_title,
                    "extract": summary,
                    "content_urls": {"desktop": {"page": RBI_PAGE.url}},
                },
            )
        return httpx.Response(404)

    return httpx.MockTransport(handler)


@pytest.fixture
def cache(tmp_path):
    return KnowledgeCache(tmp_path / "cache")


class TestCache:
    def test_roundtrip(self, cache):
        cache.put("RBI", RBI_PAGE)
        entry = cache.get("RBI")
        assert entry is not None and entry.page == RBI_PAGE

    def test_negative_result_cached(self, cache):
        cache.put("nobody", None)
        entry = cache.get("nobody")
        assert entry is not None and entry.page is None

    def test_miss_is_distinct_from_negative(self, cache):
        assert cache.get("never seen") is None

    def test_key_normalization(self, cache):
        cache.put("Dr. Urjit  Patel", RBI_PAGE)
        assert cache.get("urjit patel").page == RBI_PAGE

    def test_persists_across_instances(self, tmp_path):
        KnowledgeCache(tmp_path / "k").put("RBI", RBI_PAGE)
        assert KnowledgeCache(tmp_path / "k").get("RBI").page == RBI_PAGE

    def test_requires_directory_or_env(self, monkeypatch):
        monkeypatch.delenv("STAKENLI_CACHE_DIR", raising=False)
        with pytest.raises(InputError):
            KnowledgeCache()

    def test_env_var_supplies_directory(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STAKENLI_CACHE_DIR", str(tmp_path / "env-cache"))
        KnowledgeCache().put("RBI", RBI_PAGE)
        assert KnowledgeCache().get("RBI").page == RBI_PAGE


class TestLookup:
    def test_offline_miss_returns_none(self, cache):
        assert lookup_page("RBI", cache, online=False) is None

    def test_override_precedence_offline(self, cache):
        cache.put("Reserve Bank of India", RBI_PAGE)
        page = lookup_page(
            "RBI", cache, overrides={"RBI": "Reserve Bank of India"}, online=False
        )
        assert page == RBI_PAGE

    def test_online_fetch_then_cache_hit(self, cache):
        client = EncyclopediaClient("https://wiki.test", transport=fake_wiki())
        first = lookup_page("RBI", cache, online=True, client=client)
        assert first.title == "Reserve Bank of India"
        count_after_first = client.request_count
        assert count_after_first == 2  # search + summary
        second = lookup_page("RBI", cache, online=True, client=client)
        assert second == first
        assert client.request_count == count_after_first  # zero new network calls

    def test_search_miss_cached_negatively(self, cache):
        client = EncyclopediaClient("https://wiki.test", transport=fake_wiki(found_title=None))
        assert lookup_page("zzz", cache, online=True, client=client) is None
        assert client.request_count == 1
        assert lookup_page("zzz", cache, online=True, client=client) is None
        assert client.request_count == 1  # negative result served from cache

    def test_network_failure_raises_retryable(self, cache):
        def boom(request):
            raise httpx.ConnectError("down")

        client = EncyclopediaClient("https://wiki.test", transport=httpx.MockTransport(boom))
        with pytest.raises(NetworkError):
            lookup_page("RBI", cache, online=True, client=client)

    def test_override_fetches_exact_title(self, cache):
        client = EncyclopediaClient("https://wiki.test", transport=fake_wiki())
        page = lookup_page(
            "the bank", cache, overrides={"the bank": "Reserve Bank of India"},
            online=True, client=client,
        )
        assert page.title == "Reserve Bank of India"
        assert client.request_count == 1  # summary only, no search


class TestOverridesFile:
    def test_loads_mapping(self, tmp_path):
        path = tmp_path / "overrides.json"
        path.write_text(json.dumps({"RBI": "Reserve Bank of India"}))
        assert load_overrides(path) == {"RBI": "Reserve Bank of India"}

    def test_rejects_non_mapping(self, tmp_path):
        path = tmp_path / "overrides.json"
        path.write_text(json.dumps(["RBI"]))
        with pytest.raises(InputError):
            load_overrides(path)


class TestIntroSentences:
    def test_first_n(self):
        page = PageRef("T", "u", "A one. B two. C three.")
        assert intro_sentences(page, 2) == "A one. B two."

    def test_n_larger_than_summary(self):
        page = PageRef("T", "u", "A one. B two.")
        assert intro_sentences(page, 9) == "A one. B two."

    def test_single_sentence(self):
        page = PageRef("T", "u", RBI_PAGE.summary)
        assert intro_sentences(page, 1) == "The central bank of India."

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            intro_sentences(PageRef("T", "u", "A."), 0)
