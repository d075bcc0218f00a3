"""stakenli-sidecar: NER and NLI entailment scoring behind the stakenli wire protocol."""

__version__ = "0.1.0"
