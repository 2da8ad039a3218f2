"""Lexicon-based daily sentiment scoring with population scaling.

Tokenization is deliberately simple and fully documented so that scores
are reproducible given the same lexicon files: lowercase, strip URLs and
@mentions, drop punctuation, split on whitespace. No stemming, negation
handling, or emoji support.
"""

import csv
import re
from dataclasses import dataclass
from datetime import date as Date
from datetime import datetime

import pandas as pd

from .errors import ValidationError

__all__ = ["Lexicon", "ScoredDocument", "aggregate_daily", "score_document", "tokenize"]

_URL_RE = re.compile(r"(?:https?://\S+|www\.\S+)", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list:
    """Lowercase, strip URLs/mentions/punctuation, split on whitespace."""
    text = text.lower()
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = _PUNCT_RE.sub(" ", text)
    return text.split()


@dataclass(frozen=True)
class Lexicon:
    """Word -> score map; ``binary`` lexicons score +-1, scored ones [-5, 5]."""

    kind: str  # "binary" or "scored"
    entries: dict

    def __post_init__(self):
        if self.kind not in ("binary", "scored"):
            raise ValidationError(f"lexicon kind must be 'binary' or 'scored', got {self.kind!r}")
        if not self.entries:
            raise ValidationError("lexicon must be nonempty")
        for word, score in self.entries.items():
            if word != word.lower():
                raise ValidationError(f"lexicon words must be lowercase: {word!r}")
            if self.kind == "binary" and score not in (-1, 1):
                raise ValidationError(f"binary lexicon scores must be +-1: {word!r} -> {score}")
            if self.kind == "scored" and not (-5 <= score <= 5):
                raise ValidationError(f"scored lexicon scores must lie in [-5, 5]: {word!r} -> {score}")

    @classmethod
    def from_tsv(cls, path, kind: str) -> "Lexicon":
        """Parse a UTF-8 TSV lexicon: ``word<TAB>score``, '#' comments."""
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValidationError(f"{path}:{lineno}: expected 'word<TAB>score'")
                word, score = parts[0].strip().lower(), parts[1].strip()
                try:
                    entries[word] = int(score)
                except ValueError:
                    raise ValidationError(f"{path}:{lineno}: non-integer score {score!r}") from None
        return cls(kind, entries)


@dataclass(frozen=True)
class ScoredDocument:
    date: Date
    raw_score: float
    token_count: int


def score_document(text: str, lexicon: Lexicon) -> float:
    """Sum of per-token lexicon scores (binary: +-1 per hit)."""
    return float(sum(lexicon.entries.get(tok, 0) for tok in tokenize(text)))


def score_corpus(path, lexicon: Lexicon) -> list:
    """Score a UTF-8 CSV corpus with header ``date,text`` (RFC-4180)."""
    docs = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"date", "text"} <= set(reader.fieldnames):
            raise ValidationError(f"{path}: corpus CSV must have 'date' and 'text' columns")
        for i, row in enumerate(reader, start=2):
            try:
                day = datetime.strptime(row["date"], "%Y-%m-%d").date()
            except ValueError:
                raise ValidationError(f"{path}:{i}: unparseable ISO date {row['date']!r}") from None
            text = row["text"]
            docs.append(ScoredDocument(day, score_document(text, lexicon), len(tokenize(text))))
    return docs


def aggregate_daily(docs, population: int, start=None, end=None) -> pd.Series:
    """Daily sum of raw scores divided by population; empty days score 0.

    The output covers every calendar day from ``start`` to ``end``
    (defaulting to the corpus span).
    """
    if population <= 0:
        raise ValidationError("population must be positive")
    docs = list(docs)
    if not docs and (start is None or end is None):
        raise ValidationError("empty corpus requires explicit start and end dates")
    start = pd.Timestamp(start if start is not None else min(d.date for d in docs))
    end = pd.Timestamp(end if end is not None else max(d.date for d in docs))
    idx = pd.date_range(start, end, freq="D")
    totals = pd.Series(0.0, index=idx)
    for d in docs:
        ts = pd.Timestamp(d.date)
        if start <= ts <= end:
            totals[ts] += d.raw_score
    return totals / float(population)
