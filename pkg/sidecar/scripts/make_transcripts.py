"""Regenerate the golden wire-protocol transcripts in tests/data/.

The transcripts are recorded against the deterministic rule backends so they
replay identically on any machine; they pin the protocol layer (paths, field
names, ordering), not model quality. Audit the diff before committing.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from stakenli_sidecar.backends import OverlapEntailmentBackend
from stakenli_sidecar.ner import PatternNerBackend
from stakenli_sidecar.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "transcripts.json"

REQUESTS = [
    ("GET", "/v1/health", None),
    (
        "POST",
        "/v1/entail",
        {
            "pairs": [
                {"premise": "A man is sleeping.", "hypothesis": "A man is sleeping."},
                {
                    "premise": "The Reserve Bank steered the banking sector.",
                    "hypothesis": "The entity Reserve Bank belongs to the stakeholder group of Banking Sector",
                },
                {"premise": "Totally unrelated.", "hypothesis": "Farmers protest loudly"},
            ]
        },
    ),
    (
        "POST",
        "/v1/entail",
        {
            # pair i shares exactly i of the 5 hypothesis tokens with the
            # premise, so the expected scores are 0.0, 0.2, 0.4, 0.6, 0.8
            # in order and any reordering is visible
            "pairs": [
                {
                    "premise": "alpha beta gamma delta epsilon",
                    "hypothesis": " ".join(
                        ["alpha", "beta", "gamma", "delta"][:i]
                        + ["nova", "quark", "zephyr", "umbra", "korma"][i:]
                    ),
                }
                for i in range(5)
            ]
        },
    ),
    (
        "POST",
        "/v1/ner",
        {
            "text": (
                "Officials at the Reserve Bank of India met Narendra Modi "
                "near the Supreme Court."
            )
        },
    ),
    ("POST", "/v1/ner", {"text": "no capitalized entities in this text"}),
]


def main():
    app = create_app(OverlapEntailmentBackend(), PatternNerBackend())
    client = TestClient(app)
    transcripts = []
    for method, path, body in REQUESTS:
        if method == "GET":
            response = client.get(path)
        else:
            response = client.post(path, json=body)
        transcripts.append(
            {
                "method": method,
                "path": path,
                "request": body,
                "status": response.status_code,
                "response": response.json(),
            }
        )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(transcripts, indent=2, ensure_ascii=False) + "\n")
    print(f"wrote {len(transcripts)} transcripts to {OUT}")


if __name__ == "__main__":
    main()
