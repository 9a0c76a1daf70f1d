"""Collaborative search sessions: fusing, filtering, re-ranking, and splitting
the collaborators' individual result lists into one shared judgment.

Fusion is CombMNZ over min-max normalized scores: each per-collaborator list
is normalized to [0, 1] (single-entry or constant lists become 1.0), pairs a
collaborator judged irrelevant are dropped, documents whose best normalized
score falls below the threshold are dropped, and the surviving scores are
summed and multiplied by the number of distinct contributors.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional, Sequence

from .audio import AudioClip, load_wav, split_on_silence
from .errors import ConfigurationError, MembershipError, ParameterError
from .frontend import FrameSpec, MfccConfig
from .recognizer import Vocabulary, recognize
from .retrieval import InvertedIndex, RankedList, search


class MergedEntry(NamedTuple):
    doc_id: str
    score: float
    contributors: int


@dataclass(frozen=True)
class RelevanceFilterConfig:
    """Knobs of the relevance filter: score threshold and judgment boost."""

    threshold: float = 0.0
    boost: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.boost <= 0.0:
            raise ConfigurationError(f"boost must be positive, got {self.boost}")


@dataclass(frozen=True)
class MergedResult:
    """Fused entries (score desc, doc_id asc) with per-document provenance."""

    entries: tuple
    provenance: Mapping[str, frozenset]

    def __post_init__(self):
        seen = set()
        prev = None
        for entry in self.entries:
            if entry.doc_id in seen:
                raise ParameterError(f"duplicate merged doc {entry.doc_id!r}")
            seen.add(entry.doc_id)
            contributors = self.provenance.get(entry.doc_id, frozenset())
            if entry.contributors != len(contributors) or entry.contributors < 1:
                raise ParameterError(f"contributor count mismatch for {entry.doc_id!r}")
            key = (-entry.score, entry.doc_id)
            if prev is not None and key < prev:
                raise ParameterError("merged entries out of order")
            prev = key

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    @property
    def top(self) -> Optional[str]:
        return self.entries[0].doc_id if self.entries else None


EMPTY_MERGED = MergedResult(entries=(), provenance={})


@dataclass(frozen=True)
class SplitAssignment:
    """Disjoint round-robin division of the merged list among collaborators."""

    assignment: Mapping[str, tuple]


def _normalize(entries: Sequence[tuple[str, float]]) -> list[tuple[str, float]]:
    scores = [s for _, s in entries]
    low, high = min(scores), max(scores)
    if high == low:
        return [(d, 1.0) for d, _ in entries]
    return [(d, (s - low) / (high - low)) for d, s in entries]


def merge_results(lists: Mapping[str, RankedList],
                  config: RelevanceFilterConfig = RelevanceFilterConfig(),
                  judgments: Mapping[tuple[str, str], bool] = {}) -> MergedResult:
    """Filter and fuse per-collaborator ranked lists into one judgment."""
    contributions: dict[str, list[tuple[str, float]]] = {}
    order: dict[str, int] = {}
    for collaborator, ranked in lists.items():
        if not ranked.entries:
            continue
        for doc_id, norm in _normalize(ranked.entries):
            if judgments.get((collaborator, doc_id)) is False:
                continue  # the relevance filter drops pairs judged irrelevant
            order.setdefault(doc_id, len(order))
            contributions.setdefault(doc_id, []).append((collaborator, norm))

    survivors = []
    provenance = {}
    for doc_id in sorted(contributions, key=order.get):
        contribs = contributions[doc_id]
        best = max(norm for _, norm in contribs)
        if best < config.threshold:
            continue
        fused = len({c for c, _ in contribs}) * sum(norm for _, norm in contribs)
        survivors.append(MergedEntry(doc_id, fused, len({c for c, _ in contribs})))
        provenance[doc_id] = frozenset(c for c, _ in contribs)

    survivors.sort(key=lambda e: (-e.score, e.doc_id))
    return MergedResult(entries=tuple(survivors), provenance=provenance)


def rerank_with_judgments(merged: MergedResult,
                          judgments: Mapping[tuple[str, str], bool],
                          boost: float = 2.0) -> MergedResult:
    """Boost docs anyone judged relevant; drop docs only judged irrelevant."""
    if boost <= 0.0:
        raise ConfigurationError(f"boost must be positive, got {boost}")
    relevant = {doc for (_, doc), rel in judgments.items() if rel}
    irrelevant = {doc for (_, doc), rel in judgments.items() if not rel}
    entries = []
    provenance = {}
    for entry in merged.entries:
        if entry.doc_id in relevant:
            entry = entry._replace(score=entry.score * boost)
        elif entry.doc_id in irrelevant:
            continue
        entries.append(entry)
        provenance[entry.doc_id] = merged.provenance[entry.doc_id]
    entries.sort(key=lambda e: (-e.score, e.doc_id))
    return MergedResult(entries=tuple(entries), provenance=provenance)


def split_results(merged: MergedResult, collaborators: Sequence[str]) -> SplitAssignment:
    """Deal merged docs round-robin, by rank, over collaborators sorted by id."""
    ordered = sorted(dict.fromkeys(collaborators))
    if not ordered:
        raise ConfigurationError("cannot split results among zero collaborators")
    buckets: dict[str, list[str]] = {c: [] for c in ordered}
    for rank, entry in enumerate(merged.entries):
        buckets[ordered[rank % len(ordered)]].append(entry.doc_id)
    return SplitAssignment(assignment={c: tuple(docs) for c, docs in buckets.items()})


class _HistoryEntry(NamedTuple):
    seq: int
    query: str
    results: RankedList


class Session:
    """One collaborative search session; mutations are serialized per session."""

    def __init__(self, session_id: str, config: RelevanceFilterConfig = RelevanceFilterConfig()):
        if not session_id:
            raise ParameterError("session_id must be non-empty")
        self.session_id = session_id
        self.config = config
        self.collaborators: list[str] = []
        self.history: dict[str, list[_HistoryEntry]] = {}
        self.judgments: dict[tuple[str, str], bool] = {}
        self.merged: MergedResult = EMPTY_MERGED
        self._seq = 0
        self._lock = threading.RLock()

    def join(self, collaborator_id: str) -> None:
        if not collaborator_id:
            raise ParameterError("collaborator_id must be non-empty")
        with self._lock:
            if collaborator_id not in self.collaborators:
                self.collaborators.append(collaborator_id)

    def _require_member(self, collaborator_id: str) -> None:
        if collaborator_id not in self.collaborators:
            raise MembershipError(
                f"{collaborator_id!r} is not a member of session {self.session_id!r}")

    def submit_query(self, collaborator_id: str, query: str,
                     index: InvertedIndex, top_k: int = 10) -> RankedList:
        """Search for one collaborator, record it, and refresh the merged view."""
        with self._lock:
            self._require_member(collaborator_id)
            results = search(index, query, top_k)
            self._seq += 1
            self.history.setdefault(collaborator_id, []).append(
                _HistoryEntry(self._seq, query, results))
            self._recompute()
            return results

    def judge(self, collaborator_id: str, doc_id: str, relevant: bool) -> MergedResult:
        with self._lock:
            self._require_member(collaborator_id)
            if not self._doc_was_retrieved(doc_id):
                raise ParameterError(
                    f"document {doc_id!r} never appeared in this session's results")
            self.judgments[(collaborator_id, doc_id)] = relevant
            self._recompute()
            return self.merged

    def _doc_was_retrieved(self, doc_id: str) -> bool:
        return any(doc_id in entry.results.doc_ids()
                   for entries in self.history.values() for entry in entries)

    def _recompute(self) -> None:
        latest = {c: entries[-1].results
                  for c, entries in self.history.items() if entries}
        merged = merge_results(latest, self.config, self.judgments)
        self.merged = rerank_with_judgments(merged, self.judgments, self.config.boost)

    def suggestions(self, collaborator_id: str) -> list[str]:
        """Teammates' past queries, newest first, minus ones I already asked."""
        with self._lock:
            self._require_member(collaborator_id)
            own = {e.query for e in self.history.get(collaborator_id, [])}
            others = [(e.seq, e.query)
                      for c, entries in self.history.items() if c != collaborator_id
                      for e in entries]
            others.sort(key=lambda item: -item[0])
            seen = set()
            out = []
            for _, query in others:
                if query in own or query in seen:
                    continue
                seen.add(query)
                out.append(query)
            return out

    def split(self) -> SplitAssignment:
        with self._lock:
            return split_results(self.merged, self.collaborators)


def create_session(session_id: str,
                   config: RelevanceFilterConfig = RelevanceFilterConfig()) -> Session:
    return Session(session_id, config)


def join_session(session: Session, collaborator_id: str) -> Session:
    session.join(collaborator_id)
    return session


# ---------------------------------------------------------------------------
# Scripted replay: JOIN / QUERY / QUERY_WAV / JUDGE / EXPECT_TOP
# ---------------------------------------------------------------------------

@dataclass
class ReplayResult:
    session: Session
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def parse_script(lines: Sequence[str], origin: str = "<script>") -> list[tuple]:
    events = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0].upper()
        where = f"{origin}:{lineno}"
        if kind == "JOIN" and len(parts) == 2:
            events.append(("join", parts[1]))
        elif kind == "QUERY" and len(parts) >= 3:
            events.append(("query", parts[1], " ".join(parts[2:])))
        elif kind == "QUERY_WAV" and len(parts) == 3:
            events.append(("query_wav", parts[1], parts[2]))
        elif kind == "JUDGE" and len(parts) == 4 and parts[3] in ("rel", "irrel"):
            events.append(("judge", parts[1], parts[2], parts[3] == "rel"))
        elif kind == "EXPECT_TOP" and len(parts) == 2:
            events.append(("expect_top", parts[1]))
        else:
            raise ParameterError(f"{where}: cannot parse {line!r}")
    return events


def transcribe_clip(clip: AudioClip, vocab: Vocabulary,
                    frame_spec: FrameSpec = FrameSpec(),
                    config: MfccConfig = MfccConfig(), *,
                    silence_threshold: float = 0.01,
                    min_silence_ms: float = 200.0) -> str:
    """Silence-split a clip and recognize one vocabulary word per segment."""
    segments = split_on_silence(clip, threshold=silence_threshold,
                                min_silence_ms=min_silence_ms)
    if not segments:
        segments = [clip]
    return " ".join(recognize(seg, vocab, frame_spec, config).label for seg in segments)


def replay_events(events: Sequence[tuple], index: InvertedIndex, *,
                  session_id: str = "replay",
                  filter_config: RelevanceFilterConfig = RelevanceFilterConfig(),
                  vocab: Optional[Vocabulary] = None,
                  frame_spec: FrameSpec = FrameSpec(),
                  mfcc_config: MfccConfig = MfccConfig(),
                  top_k: int = 10) -> ReplayResult:
    session = create_session(session_id, filter_config)
    result = ReplayResult(session=session)
    for event in events:
        kind = event[0]
        if kind == "join":
            session.join(event[1])
        elif kind == "query":
            session.submit_query(event[1], event[2], index, top_k)
        elif kind == "query_wav":
            if vocab is None:
                raise ConfigurationError("script uses QUERY_WAV but no models were given")
            transcript = transcribe_clip(load_wav(event[2]), vocab, frame_spec, mfcc_config)
            session.submit_query(event[1], transcript, index, top_k)
        elif kind == "judge":
            session.judge(event[1], event[2], event[3])
        elif kind == "expect_top":
            if session.merged.top != event[1]:
                result.failures.append(
                    f"expected top {event[1]!r}, merged top is {session.merged.top!r}")
    return result
