"""stakenli: zero-shot stakeholder typing for news entities via textual entailment."""

__version__ = "0.1.0"
