"""Inverted-index construction and TF-IDF ranked retrieval.

Scoring: score(d) = sum over filtered query tokens of tf(t, d) * ln(1 + N/df(t)).
The smoothed idf is always positive, so a document scores iff it contains at
least one query term; repeated query tokens contribute repeatedly.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import BinaryIO, Iterable, Mapping, Sequence

from .errors import IndexingError, ParameterError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_ID_RE = re.compile(r"^\S+$")


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str

    def __post_init__(self):
        if not _ID_RE.match(self.doc_id or ""):
            raise ParameterError(f"doc_id must be non-empty without whitespace, got {self.doc_id!r}")
        if not self.body:
            raise ParameterError(f"document {self.doc_id!r} has an empty body")


@dataclass(frozen=True)
class RankedList:
    """(doc_id, score) pairs, score descending then doc_id ascending."""

    entries: tuple
    query_terms: tuple

    def __post_init__(self):
        prev = None
        seen = set()
        for doc_id, score in self.entries:
            if not (math.isfinite(score) and score >= 0.0):
                raise ParameterError(f"score for {doc_id!r} must be finite and >= 0")
            if doc_id in seen:
                raise ParameterError(f"duplicate result doc {doc_id!r}")
            seen.add(doc_id)
            key = (-score, doc_id)
            if prev is not None and key < prev:
                raise ParameterError("entries are not in (score desc, doc_id asc) order")
            prev = key

    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.entries]


def tokenize_filter(text: str, stopwords: Iterable[str] = ()) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop empties and stopwords."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stop]


class InvertedIndex:
    """term -> sorted (doc_id, tf) postings plus the document statistics."""

    def __init__(self, postings: Mapping[str, Sequence[tuple[str, int]]],
                 doc_lengths: Mapping[str, int], stopwords: Iterable[str] = ()):
        self.postings = {t: sorted(p) for t, p in postings.items()}
        self.doc_lengths = dict(doc_lengths)
        self.stopwords = frozenset(stopwords)
        for term, plist in self.postings.items():
            if term in self.stopwords:
                raise IndexingError(f"stopword {term!r} appears as an index term")
            for doc_id, _tf in plist:
                if doc_id not in self.doc_lengths:
                    raise IndexingError(f"posting references unknown document {doc_id!r}")

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, term: str) -> float:
        df = self.df(term)
        return math.log(1.0 + self.doc_count / df) if df else 0.0


def index_documents(docs: Sequence[Document], stopwords: Iterable[str] = ()) -> InvertedIndex:
    """Build the index over title + body tokens; tf is the raw count."""
    stop = frozenset(stopwords)
    postings: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    for doc in docs:
        if doc.doc_id in doc_lengths:
            raise IndexingError(f"duplicate doc_id {doc.doc_id!r}")
        tokens = tokenize_filter(doc.title + " " + doc.body, stop)
        doc_lengths[doc.doc_id] = len(tokens)
        for token in tokens:
            postings.setdefault(token, {}).setdefault(doc.doc_id, 0)
            postings[token][doc.doc_id] += 1
    plists = {t: sorted(counts.items()) for t, counts in postings.items()}
    return InvertedIndex(plists, doc_lengths, stop)


def search(index: InvertedIndex, query: str, top_k: int = 10) -> RankedList:
    """TF-IDF retrieval; zero-scoring documents are omitted, ties break by doc_id."""
    if top_k < 0:
        raise ParameterError("top_k must be >= 0")
    terms = tokenize_filter(query, index.stopwords)
    scores: dict[str, float] = {}
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = math.log(1.0 + index.doc_count / len(plist))
        for doc_id, tf in plist:
            scores[doc_id] = scores.get(doc_id, 0.0) + tf * idf
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))[:top_k]
    return RankedList(entries=tuple(ordered), query_terms=tuple(terms))


# ---------------------------------------------------------------------------
# Corpus ingestion
# ---------------------------------------------------------------------------

def load_corpus_dir(directory: "str | os.PathLike") -> list[Document]:
    """Each regular file becomes a document; doc_id is its relative path."""
    root = os.fspath(directory)
    docs = []
    for dirpath, _dirnames, filenames in sorted(os.walk(root)):
        for name in sorted(filenames):
            full = os.path.join(dirpath, name)
            rel = os.path.relpath(full, root).replace(os.sep, "/")
            with open(full, "r", encoding="utf-8") as fh:
                body = fh.read()
            if body.strip():
                docs.append(Document(doc_id=rel, title="", body=body))
    if not docs:
        raise IndexingError(f"no non-empty documents under {root}")
    return docs


def load_corpus_manifest(path: "str | os.PathLike") -> list[Document]:
    """Lines of ``doc_id<TAB>title<TAB>body-path``, paths relative to the manifest."""
    base = os.path.dirname(os.path.abspath(os.fspath(path)))
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParameterError(f"{path}:{lineno}: expected 'doc_id<TAB>title<TAB>body-path'")
            doc_id, title, body_path = parts
            if not os.path.isabs(body_path):
                body_path = os.path.join(base, body_path)
            with open(body_path, "r", encoding="utf-8") as body_fh:
                docs.append(Document(doc_id=doc_id, title=title, body=body_fh.read()))
    return docs


def default_stopwords() -> frozenset:
    text = resources.files("vircis").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(load_stopword_lines(text.splitlines()))


def load_stopwords(path: "str | os.PathLike") -> frozenset:
    with open(path, "r", encoding="utf-8") as fh:
        return frozenset(load_stopword_lines(fh))


def load_stopword_lines(lines: Iterable[str]) -> list[str]:
    words = []
    for line in lines:
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.append(word)
    return words


# ---------------------------------------------------------------------------
# Index serialization: header with doc stats, then "term df" / "doc_id tf"
# ---------------------------------------------------------------------------

def save_index(index: InvertedIndex, target: "str | os.PathLike | BinaryIO") -> None:
    lines = [f"doc_count {index.doc_count}"]
    for doc_id in sorted(index.doc_lengths):
        lines.append(f"doc {doc_id} {index.doc_lengths[doc_id]}")
    for word in sorted(index.stopwords):
        lines.append(f"stopword {word}")
    for term in sorted(index.postings):
        plist = index.postings[term]
        lines.append(f"{term} {len(plist)}")
        for doc_id, tf in plist:
            lines.append(f"{doc_id} {tf}")
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text.encode("utf-8"))  # type: ignore[union-attr]
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_index(source: "str | os.PathLike | BinaryIO") -> InvertedIndex:
    if hasattr(source, "read"):
        raw = source.read()  # type: ignore[union-attr]
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("doc_count "):
        raise ParameterError("bad index file: missing doc_count header")
    doc_count = int(lines[0].split()[1])
    doc_lengths: dict[str, int] = {}
    stopwords: list[str] = []
    i = 1
    while i < len(lines) and lines[i].startswith("doc "):
        _, doc_id, length = lines[i].split()
        doc_lengths[doc_id] = int(length)
        i += 1
    while i < len(lines) and lines[i].startswith("stopword "):
        stopwords.append(lines[i].split()[1])
        i += 1
    if len(doc_lengths) != doc_count:
        raise ParameterError(f"index header declares {doc_count} docs, found {len(doc_lengths)}")
    postings: dict[str, list[tuple[str, int]]] = {}
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        term, df_s = lines[i].split()
        df = int(df_s)
        i += 1
        plist = []
        for _ in range(df):
            doc_id, tf_s = lines[i].split()
            plist.append((doc_id, int(tf_s)))
            i += 1
        postings[term] = plist
    return InvertedIndex(postings, doc_lengths, stopwords)
