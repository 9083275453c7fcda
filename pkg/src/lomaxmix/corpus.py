"""Text ingestion: markup stripping, tokenization and frequency-of-frequencies histograms."""
from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyCorpusError, ParameterError

_JOINERS = "'-"
# typographic apostrophe folds onto the ASCII one
_NORMALIZE = str.maketrans({"’": "'"})
_TOKEN = re.compile(r"[^\s'-]+(?:['-][^\s'-]+)*")


def _keep(ch):
    return ch if ch.isalpha() or ch in _JOINERS else " "


def tokenize(text: str) -> list[str]:
    """Lowercased word-forms: alphabetic runs with internal apostrophes or hyphens.

    >>> tokenize("The cat, the CAT!")
    ['the', 'cat', 'the', 'cat']
    >>> tokenize("don't stop -- don't")
    ["don't", 'stop', "don't"]
    """
    lowered = text.lower().translate(_NORMALIZE)
    cleaned = "".join(map(_keep, lowered))
    return _TOKEN.findall(cleaned)


# elements whose content is never human-readable text
_SKIP = frozenset({"script", "style", "head", "title", "noscript", "template"})
_BLOCK = frozenset(
    """address article aside blockquote body br dd div dl dt fieldset figcaption figure
    footer form h1 h2 h3 h4 h5 h6 header hr html li main nav ol option p pre section
    table tbody td tfoot th thead tr ul""".split()
)


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts = []
        self.skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag == "body":
            # an unclosed <head> ends where the body starts
            self.skip_depth = 0
        if tag in _SKIP:
            self.skip_depth += 1
        elif tag in _BLOCK:
            self.parts.append(" ")

    def handle_startendtag(self, tag, attrs):
        if tag in _BLOCK:
            self.parts.append(" ")

    def handle_endtag(self, tag):
        if tag in _SKIP:
            self.skip_depth = max(0, self.skip_depth - 1)
        elif tag in _BLOCK:
            self.parts.append(" ")

    def handle_data(self, data):
        if not self.skip_depth:
            self.parts.append(data)


def strip_markup(html: str) -> str:
    """Human-readable text of an HTML document.

    Tags, comments, and the contents of script/style/head are removed and
    character entities decoded.  Anchor text is kept; alt text is not.
    """
    parser = _TextExtractor()
    try:
        parser.feed(html)
        parser.close()
    except Exception:  # noqa: BLE001 - best effort on hopeless markup
        pass
    text = "".join(parser.parts)
    # a trailing unterminated tag is left raw by the parser
    text = re.sub(r"<[^<>]*$", " ", text)
    return " ".join(text.split())


def read_text(path, html=False) -> str:
    raw = Path(path).read_bytes().decode("utf-8", errors="replace")
    return strip_markup(raw) if html else raw


@dataclass(frozen=True)
class FrequencyHistogram:
    """Map from occurrence number k to the number of word-forms seen exactly k times."""

    bins: Mapping[int, int]
    source: str = ""
    total_types: int = field(init=False)
    total_tokens: int = field(init=False)

    def __post_init__(self):
        clean = {}
        for k, n in self.bins.items():
            k, n = int(k), int(n)
            if k < 1 or n < 0:
                raise ParameterError(f"invalid bin {k}: {n}")
            if n:
                clean[k] = clean.get(k, 0) + n
        object.__setattr__(self, "bins", dict(sorted(clean.items())))
        object.__setattr__(self, "total_types", sum(clean.values()))
        object.__setattr__(self, "total_tokens", sum(k * n for k, n in clean.items()))

    @classmethod
    def from_samples(cls, samples: Iterable[int], source=""):
        ks, ns = np.unique(np.asarray(samples, dtype=np.int64), return_counts=True)
        return cls(dict(zip(ks.tolist(), ns.tolist())), source=source)

    def __len__(self):
        return len(self.bins)

    def __add__(self, other):
        merged = Counter(self.bins)
        merged.update(other.bins)
        sources = [s for s in (self.source, other.source) if s]
        return FrequencyHistogram(merged, source="+".join(sources))

    def arrays(self):
        """(k, n_k) as ascending float / int arrays."""
        ks = np.fromiter(self.bins.keys(), dtype=float, count=len(self.bins))
        ns = np.fromiter(self.bins.values(), dtype=np.int64, count=len(self.bins))
        return ks, ns

    def low_frequency_share(self, upto=2):
        """Fraction of word-forms met at most ``upto`` times."""
        if not self.total_types:
            return 0.0
        return sum(n for k, n in self.bins.items() if k <= upto) / self.total_types

    def to_dict(self):
        return {
            "bins": {str(k): n for k, n in self.bins.items()},
            "total_types": self.total_types,
            "total_tokens": self.total_tokens,
            "source": self.source,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data):
        try:
            bins = {int(k): int(n) for k, n in data["bins"].items()}
        except (KeyError, AttributeError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed histogram: {exc}") from None
        hist = cls(bins, source=str(data.get("source", "")))
        for key in ("total_types", "total_tokens"):
            if key in data and int(data[key]) != getattr(hist, key):
                raise ParameterError(f"histogram {key} does not match its bins")
        return hist

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"malformed histogram JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ParameterError("histogram JSON must be an object")
        return cls.from_dict(data)


def build_histogram(tokens: Iterable[str], source="") -> FrequencyHistogram:
    counts = Counter(tokens)
    if not counts:
        raise EmptyCorpusError()
    return FrequencyHistogram(Counter(counts.values()), source=source)


def ingest_files(paths, html=False) -> FrequencyHistogram:
    """Tokenize every file and merge the word counts into one histogram."""
    counts = Counter()
    for path in paths:
        counts.update(tokenize(read_text(path, html=html)))
    if not counts:
        raise EmptyCorpusError()
    return FrequencyHistogram(
        Counter(counts.values()), source=",".join(str(p) for p in paths)
    )
