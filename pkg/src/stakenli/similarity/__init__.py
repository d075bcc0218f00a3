"""String normalization and similarity kernels for cross-document mention matching.

Kernels run JIT-compiled via numba by default; set ``STAKENLI_KERNELS=numpy``
to force the plain numpy implementations (or ``numba`` to require the JIT).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from ..core import PipelineConfig
from ..errors import ConfigError

_requested = os.environ.get("STAKENLI_KERNELS", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ConfigError(
        f"STAKENLI_KERNELS must be 'numba' or 'numpy', got {_requested!r}"
    )
if _requested == "numpy":
    from . import _numpy_kernels as _kernels
else:
    try:
        from . import _numba_kernels as _kernels
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy_kernels as _kernels


def active_backend() -> str:
    """Name of the kernel implementation in use ('numba' or 'numpy')."""
    return _kernels.BACKEND


_HONORIFICS = frozenset({"mr", "mrs", "ms", "dr", "shri", "smt"})
_PUNCT_RE = re.compile(r"[^\w\s]+")
_DEFAULT_CONFIG = PipelineConfig()


@dataclass(frozen=True)
class MatchDecision:
    matched: bool
    rule: str  # "exact" | "jaro_winkler" | "substring"
    score: float


def normalize_mention(s: str) -> str:
    """Lowercase, strip honorific prefixes and punctuation, collapse whitespace."""
    tokens = _PUNCT_RE.sub("", s.lower()).split()
    while tokens and tokens[0] in _HONORIFICS:
        tokens.pop(0)
    return " ".join(tokens)


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


def jaro(a: str, b: str) -> float:
    """Jaro similarity in [0, 1]; both-empty compares equal (1.0)."""
    return float(_kernels.jaro_kernel(_codes(a), _codes(b)))


def jaro_winkler(a: str, b: str, prefix_scale: float = 0.1) -> float:
    """Jaro boosted by the shared prefix: j + l * prefix_scale * (1 - j), l <= 4."""
    if not 0.0 <= prefix_scale <= 0.25:
        raise ValueError(f"prefix_scale must lie in [0, 0.25], got {prefix_scale}")
    j = jaro(a, b)
    prefix = 0
    for ca, cb in zip(a[:4], b[:4]):
        if ca != cb:
            break
        prefix += 1
    return j + prefix * prefix_scale * (1.0 - j)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert / delete / substitute)."""
    return int(_kernels.levenshtein_kernel(_codes(a), _codes(b)))


def substring_match(a: str, b: str) -> bool:
    """True iff the shorter input (len >= 3) is a token-aligned run of the longer.

    Inputs must already be normalized (single-space separated tokens).
    """
    shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
    if len(shorter) < 3:
        return False
    st = shorter.split()
    lt = longer.split()
    n = len(st)
    return any(lt[i : i + n] == st for i in range(len(lt) - n + 1))


def mention_match(a: str, b: str, config: PipelineConfig | None = None) -> MatchDecision:
    """Decide whether two mention surfaces refer to the same entity.

    Rules are tried in a fixed order: normalized exact equality, Jaro-Winkler
    against the configured threshold, then token-aligned substring. The score
    is always the Jaro-Winkler value of the normalized strings.
    """
    if config is None:
        config = _DEFAULT_CONFIG
    na = normalize_mention(a)
    nb = normalize_mention(b)
    score = jaro_winkler(na, nb, config.jw_prefix_scale)
    if na == nb:
        return MatchDecision(True, "exact", score)
    if score >= config.jw_threshold:
        return MatchDecision(True, "jaro_winkler", score)
    if substring_match(na, nb):
        return MatchDecision(True, "substring", score)
    return MatchDecision(False, "jaro_winkler", score)
