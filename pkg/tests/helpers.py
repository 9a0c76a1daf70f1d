"""Independent oracles and generators used across the test suite.

Everything here recomputes expected values from first principles (exhaustive
enumeration, naive scans, direct formulas) so the library paths they check
stay independently verified.
"""

import itertools
import math

import numpy as np

from vircis import AudioClip, Document, HmmModel, RankedList, tokenize_filter


def random_hmm(n_states, dim, rng, label="w"):
    """A fully-connected random model with valid stochastic rows."""
    entry = rng.random(n_states) + 0.1
    entry /= entry.sum()
    rows = rng.random((n_states, n_states + 1)) + 0.1
    rows /= rows.sum(axis=1, keepdims=True)
    return HmmModel(
        label=label,
        means=rng.normal(size=(n_states, dim)),
        variances=rng.uniform(0.1, 2.0, (n_states, dim)),
        entry_logprob=np.log(entry),
        trans_logprob=np.log(rows[:, :n_states]),
        exit_logprob=np.log(rows[:, n_states]),
    )


def gaussian_logpdf(obs, mean, var):
    return -0.5 * float(np.sum(np.log(2.0 * np.pi * var) + (obs - mean) ** 2 / var))


def brute_force_best_path(obs, model):
    """Enumerate all N^T complete paths; returns (best_logprob, best_path)."""
    num_obs = obs.shape[0]
    n = model.num_states
    emis = np.array([[gaussian_logpdf(obs[t], model.means[s], model.variances[s])
                      for s in range(n)] for t in range(num_obs)])
    best = -np.inf
    best_path = None
    for path in itertools.product(range(n), repeat=num_obs):
        total = model.entry_logprob[path[0]] + emis[0, path[0]]
        for t in range(1, num_obs):
            total += model.trans_logprob[path[t - 1], path[t]] + emis[t, path[t]]
        total += model.exit_logprob[path[-1]]
        if total > best:
            best = total
            best_path = tuple(s + 1 for s in path)
    return best, best_path


def sample_from_model(model, rng, min_len=1, max_len=200):
    """Draw one observation sequence by walking the model until it exits."""
    frames = []
    probs = np.exp(model.entry_logprob)
    state = rng.choice(model.num_states, p=probs / probs.sum())
    while True:
        frames.append(rng.normal(model.means[state], np.sqrt(model.variances[state])))
        if len(frames) >= max_len:
            break
        moves = np.concatenate([np.exp(model.trans_logprob[state]),
                                [np.exp(model.exit_logprob[state])]])
        nxt = rng.choice(model.num_states + 1, p=moves / moves.sum())
        if nxt == model.num_states:
            if len(frames) >= min_len:
                break
            continue
        state = nxt
    return np.array(frames)


def naive_tfidf_search(docs, query, stopwords=(), top_k=1000):
    """Full-scan scorer with no index: the retrieval oracle."""
    terms = tokenize_filter(query, set(stopwords))
    doc_tokens = {d.doc_id: tokenize_filter(d.title + " " + d.body, set(stopwords))
                  for d in docs}
    n_docs = len(docs)
    df = {}
    for term in set(terms):
        df[term] = sum(1 for tokens in doc_tokens.values() if term in tokens)
    results = []
    for doc in docs:
        tokens = doc_tokens[doc.doc_id]
        score = 0.0
        for term in terms:
            tf = tokens.count(term)
            if tf and df[term]:
                score += tf * math.log(1.0 + n_docs / df[term])
        if score > 0.0:
            results.append((doc.doc_id, score))
    results.sort(key=lambda item: (-item[1], item[0]))
    return results[:top_k]


def brute_combmnz(lists, threshold=0.0, judgments=None):
    """Reference fusion: materialize every (doc, collaborator, score) triple."""
    judgments = judgments or {}
    triples = []
    for collaborator, ranked in lists.items():
        entries = list(ranked.entries)
        if not entries:
            continue
        scores = [s for _, s in entries]
        low, high = min(scores), max(scores)
        for doc_id, score in entries:
            norm = 1.0 if high == low else (score - low) / (high - low)
            if judgments.get((collaborator, doc_id)) is False:
                continue
            triples.append((doc_id, collaborator, norm))
    docs = []
    for doc_id in dict.fromkeys(d for d, _, _ in triples):
        mine = [(c, s) for d, c, s in triples if d == doc_id]
        if max(s for _, s in mine) < threshold:
            continue
        contributors = len({c for c, _ in mine})
        fused = contributors * sum(s for _, s in mine)
        docs.append((doc_id, fused, contributors))
    docs.sort(key=lambda item: (-item[1], item[0]))
    return docs


def random_corpus(rng, max_docs=10, max_terms=30):
    """Random small document collection over a bounded term pool."""
    n_docs = int(rng.integers(2, max_docs + 1))
    pool = [f"t{i}" for i in range(int(rng.integers(3, max_terms + 1)))]
    docs = []
    for i in range(n_docs):
        length = int(rng.integers(1, 12))
        words = [pool[int(rng.integers(len(pool)))] for _ in range(length)]
        docs.append(Document(doc_id=f"d{i:02d}", title="", body=" ".join(words)))
    return docs, pool


def random_ranked_lists(rng, max_lists=5, max_docs=20):
    """Per-collaborator RankedLists over a shared doc universe."""
    n_lists = int(rng.integers(1, max_lists + 1))
    universe = [f"d{i:02d}" for i in range(int(rng.integers(1, max_docs + 1)))]
    lists = {}
    for i in range(n_lists):
        size = int(rng.integers(0, len(universe) + 1))
        chosen = list(rng.choice(universe, size=size, replace=False))
        entries = sorted(((d, float(np.round(rng.uniform(0, 10), 3))) for d in chosen),
                         key=lambda item: (-item[1], item[0]))
        lists[f"c{i}"] = RankedList(entries=tuple(entries), query_terms=("q",))
    return lists


def tone_clip(freq_hz, duration_s, sample_rate=16000, amplitude=0.4):
    t = np.arange(int(duration_s * sample_rate))
    return AudioClip(amplitude * np.sin(2 * np.pi * freq_hz * t / sample_rate), sample_rate)
