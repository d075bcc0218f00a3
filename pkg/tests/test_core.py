import json

import pytest

from stakenli.core import (
    Document,
    EntityDescription,
    LabelRegistry,
    PipelineConfig,
    Snippet,
    StakeholderLabel,
    candidates_for_topic,
    default_registry_path,
    load_label_registry,
)
from stakenli.errors import ConfigError, RegistryError

TABLE_ROWS = {
    "Agriculture Act": [
        "Government", "Opposition", "Citizen/Activists", "Bureaucrat",
        "Farmers", "International-figure",
    ],
    "Demonetization": [
        "Government", "Opposition", "Citizen/Activists", "Bureaucrat",
        "Banking Sector", "Private Companies",
    ],
    "CAB Bill": [
        "Government", "Opposition", "Citizen/Activists", "Bureaucrat",
        "International-figure",
    ],
    "COVID Control": [
        "Government", "Opposition", "Citizen/Activists", "Bureaucrat",
        "International-figure", "Scientist/Researchers",
    ],
    "Article 370": [
        "Government", "Opposition", "Citizen/Activists", "Bureaucrat",
        "International-figure", "Judiciary", "Kashmiri people",
    ],
}


class TestRegistry:
    def test_default_registry_rows(self, registry):
        for topic, expected in TABLE_ROWS.items():
            names = [c.name for c in registry.candidates_for_topic(topic)]
            assert sorted(names) == sorted(expected), topic

    def test_demonetization_has_six_candidates(self, registry):
        assert len(registry.candidates_for_topic("Demonetization")) == 6

    def test_cab_bill_has_five(self, registry):
        assert len(registry.candidates_for_topic("CAB Bill")) == 5

    def test_article_370_has_seven(self, registry):
        assert len(registry.candidates_for_topic("Article 370")) == 7

    def test_common_labels_everywhere(self, registry):
        for topic in registry.known_topics:
            names = {c.name for c in registry.candidates_for_topic(topic)}
            assert {"Government", "Opposition", "Citizen/Activists", "Bureaucrat"} <= names

    def test_unknown_topic_lists_known(self, registry):
        with pytest.raises(RegistryError, match="Demonetization"):
            candidates_for_topic(registry, "XYZ")

    def test_singleton_registry(self):
        registry = LabelRegistry(
            [StakeholderLabel("Government", topic_specific=True, topics={"T"})]
        )
        assert [c.name for c in registry.candidates_for_topic("T")] == ["Government"]

    def test_duplicate_label_rejected(self, tmp_path):
        path = tmp_path / "registry.json"
        path.write_text(json.dumps({"labels": [
            {"name": "Government", "topic_specific": False, "topics": []},
            {"name": "Government", "topic_specific": False, "topics": []},
        ]}))
        with pytest.raises(RegistryError, match="duplicate"):
            load_label_registry(path)

    def test_topic_specific_needs_topics(self):
        with pytest.raises(RegistryError):
            StakeholderLabel("Farmers", topic_specific=True, topics=frozenset())

    def test_roundtrip_is_canonical(self, tmp_path):
        original = default_registry_path().read_text(encoding="utf-8")
        registry = load_label_registry(default_registry_path())
        assert registry.serialize() == original
        rewritten = tmp_path / "registry.json"
        rewritten.write_text(registry.serialize(), encoding="utf-8")
        assert load_label_registry(rewritten).serialize() == original

    def test_candidates_preserve_registry_order(self, registry):
        names = [c.name for c in registry.candidates_for_topic("Demonetization")]
        positions = [registry.names.index(n) for n in names]
        assert positions == sorted(positions)

    def test_parse_error_reports_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"labels": [}')
        with pytest.raises(RegistryError, match="line"):
            load_label_registry(path)


class TestDescription:
    def test_rendered_is_background_then_snippets(self):
        description = EntityDescription(
            entity_name="X",
            snippets=(Snippet("d1", 0, "S one."), Snippet("d2", 1, "S two.")),
            background="B.",
        )
        assert description.rendered == "B. S one. S two."

    def test_rendered_without_background(self):
        description = EntityDescription("X", (Snippet("d1", 0, "S."),))
        assert description.rendered == "S."

    def test_rendered_starts_with_background_when_present(self):
        description = EntityDescription("X", (Snippet("d", 0, "S."),), background="Bg.")
        assert description.rendered.startswith("Bg.")

    def test_empty_snippets_rejected(self):
        with pytest.raises(ValueError):
            EntityDescription("X", ())


class TestConfig:
    def test_defaults(self):
        config = PipelineConfig()
        assert config.saliency_min_mentions == 2
        assert config.jw_threshold == 0.85
        assert config.jw_prefix_scale == 0.1
        assert config.max_premise_chars == 2000
        assert config.background_sentences == 3
        assert config.template_id == "original"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"saliency_min_mentions": 0},
            {"jw_threshold": 1.2},
            {"jw_prefix_scale": 0.5},
            {"max_premise_chars": 0},
            {"background_sentences": 0},
        ],
    )
    def test_bounds_enforced(self, kwargs):
        with pytest.raises(ConfigError):
            PipelineConfig(**kwargs)

    def test_threshold_outside_paper_range_warns(self):
        with pytest.warns(UserWarning, match="0.8"):
            PipelineConfig(jw_threshold=0.95)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="nope"):
            PipelineConfig.from_dict({"nope": 1})


class TestDocument:
    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            Document(id="d", topic="t", title="x", text="")
