"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Every expected value is computed by an independent oracle
(exhaustive enumeration, naive scans, closed forms) before being asserted.
"""

import json
import math
import os
import socket
import subprocess
import sys
import time

import numpy as np
import pytest
import requests

from vircis import (AudioClip, FrameSpec, MfccConfig, create_session,
                    default_stopwords, emission_logprob, evaluate,
                    extract_mfcc, index_documents, load_corpus_dir,
                    load_vocabulary, load_wav, merge_results, parse_script,
                    path_logprob, power_spectrum, read_manifest, replay_events,
                    search, split_results, train_model, train_vocabulary,
                    training_loglik, transcribe_clip, viterbi, wav_bytes)
from vircis.frontend import LOG_FLOOR, log_filter_energies, mel_filter_centers
from vircis.service import render_merged
from conftest import FAST_CONFIG, FAST_SPEC, FIXTURES, TONE_WORDS
from helpers import (brute_combmnz, brute_force_best_path, naive_tfidf_search,
                     random_corpus, random_hmm, random_ranked_lists, tone_clip)


def _report(name):
    print(f"\nACCEPTANCE PASS: {name}")


class TestViterbiOracle:
    def test_viterbi_oracle_equivalence(self):
        """200 random decodes match exhaustive path enumeration within 1e-9."""
        rng = np.random.default_rng(2024)
        started = time.monotonic()
        for _ in range(200):
            n = int(rng.choice([2, 3, 4]))
            t = int(rng.integers(1, 7))
            d = int(rng.choice([1, 2]))
            model = random_hmm(n, d, rng)
            obs = rng.normal(size=(t, d))
            result, _ = viterbi(obs, model)
            best, _ = brute_force_best_path(obs, model)
            assert abs(result.log_prob - best) < 1e-9
            assert abs(path_logprob(obs, model, result.state_path) - best) < 1e-9
        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f}s"
        _report("viterbi oracle equivalence (200 cases, 1e-9, "
                f"{elapsed:.1f}s)")


class TestTrellisFidelity:
    def test_initialization_column_cell_by_cell(self):
        """First trellis column is entry + emission; backpointers start at 0."""
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 5))
            t = int(rng.integers(1, 6))
            model = random_hmm(n, 2, rng)
            obs = rng.normal(size=(t, 2))
            _, trellis = viterbi(obs, model)
            for s in range(1, n + 1):
                expected = model.entry_logprob[s - 1] + emission_logprob(model, s, obs[0])
                assert trellis.scores[s, 0] == pytest.approx(expected, abs=1e-12)
            assert np.all(trellis.backpointers[:, 0] == 0)
        _report("trellis initialization fidelity (50 random instances)")


class TestMfccAnalytic:
    def test_parseval(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            frame = rng.normal(size=400)
            power = power_spectrum(frame, 512)
            total = power[0] + power[-1] + 2.0 * np.sum(power[1:-1])
            energy = np.sum(frame * frame)
            assert abs(total - energy) <= 1e-6 * energy
        _report("Parseval identity (1e-6 relative, 50 frames)")

    def test_pure_tone_peak_filter(self):
        config = MfccConfig(include_deltas=False, include_delta_deltas=False)
        energies = log_filter_energies(tone_clip(1000, 0.5), FrameSpec(), config)
        expected = int(np.argmin(np.abs(mel_filter_centers(config) - 1000.0)))
        for t in range(1, energies.shape[0] - 1):
            assert int(np.argmax(energies[t])) == expected
        _report("1 kHz tone peaks at nearest mel filter (all interior frames)")

    def test_constant_log_spectrum_dct(self):
        clip = AudioClip(np.zeros(16000), 16000)
        features = extract_mfcc(clip, config=MfccConfig(include_deltas=False,
                                                        include_delta_deltas=False))
        v = math.log(LOG_FLOOR)
        assert features.frames[0, 0] == pytest.approx(v * math.sqrt(26), rel=1e-12)
        assert np.allclose(features.frames[:, 1:], 0.0, atol=1e-12)
        _report("constant log-spectrum DCT: c0 = v*sqrt(M), higher cepstra 0")


class TestSyntheticVocabulary:
    def test_recognition_and_metric_fidelity(self, tone_dataset, tone_vocabulary,
                                             tmp_path, capsys):
        started = time.monotonic()
        report = evaluate(tone_dataset["test"], tone_vocabulary, FAST_SPEC, FAST_CONFIG)
        assert report.accuracy_percent >= 95.0

        # metric-formula fidelity: a fabricated 13-of-16 manifest prints 81.25
        from vircis import Vocabulary, save_vocabulary
        solo_dir = tmp_path / "solo"
        save_vocabulary(Vocabulary([tone_vocabulary["low"]]), solo_dir)
        low = [p for l, p in read_manifest(tone_dataset["test_manifest"]) if l == "low"]
        high = [p for l, p in read_manifest(tone_dataset["test_manifest"]) if l == "high"]
        manifest = tmp_path / "thirteen.tsv"
        lines = [f"low\t{low[i % len(low)]}" for i in range(13)]
        lines += [f"high\t{high[i]}" for i in range(3)]
        manifest.write_text("\n".join(lines) + "\n")

        from vircis.cli import main
        code = main(["eval", "--manifest", str(manifest), "--models", str(solo_dir),
                     "--no-deltas"])
        out = capsys.readouterr().out
        assert code == 0
        assert "81.25" in out.splitlines()
        payload = json.loads(out.splitlines()[-1])
        assert payload == {"total": 16, "correct": 13, "accuracy_percent": 81.25}

        elapsed = time.monotonic() - started
        assert elapsed < 60.0
        _report(f"synthetic vocabulary: accuracy {report.accuracy_percent:.2f}% "
                f">= 95%, 13/16 prints 81.25 ({elapsed:.1f}s)")


class TestTrainingMonotonicity:
    def test_loglik_non_decreasing_ten_iterations(self, tone_dataset):
        grouped = {}
        for label, clip in tone_dataset["train"]:
            grouped.setdefault(label, []).append(
                extract_mfcc(clip, FAST_SPEC, FAST_CONFIG))
        for label, features in sorted(grouped.items()):
            lls = [training_loglik(features,
                                   train_model(features, 5, iterations=k, label=label))
                   for k in range(0, 11)]
            for a, b in zip(lls, lls[1:]):
                assert b - a >= -1e-9, f"{label}: {a} -> {b}"
        _report("segmental training log-likelihood non-decreasing over 10 iterations")


class TestIrOracle:
    def test_indexed_search_equals_naive_scan(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            docs, pool = random_corpus(rng, max_docs=10, max_terms=30)
            index = index_documents(docs)
            query = " ".join(rng.choice(pool, size=int(rng.integers(1, 4))))
            expected = naive_tfidf_search(docs, query, top_k=100)
            assert list(search(index, query, top_k=100).entries) == expected
        _report("indexed search equals naive full-scan TF-IDF (50 corpora, exact)")


class TestFusionOracle:
    def test_combmnz_equivalence(self):
        rng = np.random.default_rng(59)
        for i in range(100):
            lists = random_ranked_lists(rng, max_lists=5, max_docs=20)
            threshold = float(rng.choice([0.0, 0.0, 0.25, 0.6]))
            judgments = {}
            if i % 4 == 0:
                for collab, ranked in lists.items():
                    for doc_id in ranked.doc_ids():
                        if rng.random() < 0.2:
                            judgments[(collab, doc_id)] = bool(rng.random() < 0.5)
            from vircis import RelevanceFilterConfig
            merged = merge_results(lists, RelevanceFilterConfig(threshold=threshold),
                                   judgments)
            assert [tuple(e) for e in merged.entries] == brute_combmnz(
                lists, threshold, judgments)
        _report("merge equals brute-force CombMNZ (100 random instances)")

    def test_split_disjoint_exhaustive_grid(self):
        from vircis import RankedList
        for n_collab in range(1, 8):
            for n_docs in range(0, 26):
                entries = tuple((f"d{i:02d}", float(50 - i)) for i in range(n_docs))
                merged = merge_results(
                    {"A": RankedList(entries=entries, query_terms=("q",))})
                split = split_results(merged, [f"c{i}" for i in range(n_collab)])
                combined = [d for docs in split.assignment.values() for d in docs]
                assert len(combined) == len(set(combined)) == n_docs
                assert set(combined) == set(merged.doc_ids())
        _report("split assignments disjoint and exhaustive (collaborators 1..7 x docs 0..25)")

    def test_replay_fixture_deterministic(self, fixture_corpus_dir, replay_script_path):
        index = index_documents(load_corpus_dir(fixture_corpus_dir))
        with open(replay_script_path) as fh:
            events = parse_script(fh.readlines())
        first = replay_events(events, index)
        second = replay_events(events, index)
        assert first.ok and second.ok
        assert first.session.merged.entries == second.session.merged.entries
        _report("scripted-session replay passes its EXPECT_TOP assertions deterministically")


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class TestEndToEnd:
    def test_synth_train_serve_http(self, tmp_path):
        """CLI synth -> train -> serve; HTTP flow matches in-process fusion."""
        started = time.monotonic()
        from vircis.cli import main

        clips = tmp_path / "clips"
        models = tmp_path / "models"
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "lowdoc.txt").write_text("low tones and rumble\n")
        (corpus / "highdoc.txt").write_text("high pitch whistles\n")
        (corpus / "mixdoc.txt").write_text("rise und fall of low high pitch\n")

        vocab_file = os.path.join(FIXTURES, "tone_vocab.txt")
        assert main(["synth", "--vocab", vocab_file, "--out", str(clips),
                     "--train", "5", "--test", "2", "--seed", "21"]) == 0
        assert main(["train", "--manifest", str(clips / "train.tsv"),
                     "--out", str(models), "--states", "4", "--iterations", "5",
                     "--no-deltas"]) == 0

        port = _free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "vircis.cli", "serve", "--host", "127.0.0.1",
             "--port", str(port), "--corpus", str(corpus), "--models", str(models),
             "--no-deltas"],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        base = f"http://127.0.0.1:{port}"
        try:
            for _ in range(100):
                try:
                    requests.get(f"{base}/sessions/warmup", timeout=1)
                    break
                except requests.ConnectionError:
                    time.sleep(0.1)
            else:
                pytest.fail("server did not come up")

            wav_path = str(clips / "low_test_00.wav")
            assert requests.post(f"{base}/sessions",
                                 json={"session_id": "team"}).status_code == 201
            for collab in ("ann", "bob"):
                requests.post(f"{base}/sessions/team/collaborators",
                              json={"collaborator_id": collab})
            with open(wav_path, "rb") as fh:
                voice = requests.post(
                    f"{base}/sessions/team/queries",
                    data={"collaborator_id": "ann"},
                    files={"audio": ("q.wav", fh.read(), "audio/wav")})
            assert voice.status_code == 200, voice.text
            transcript = voice.json()["transcript"]
            text = requests.post(f"{base}/sessions/team/queries",
                                 json={"collaborator_id": "bob",
                                       "text": "high pitch"})
            assert text.status_code == 200
            http_merged = text.json()["merged_results"]

            # in-process mirror over exactly the same artifacts
            index = index_documents(load_corpus_dir(corpus), default_stopwords())
            vocab = load_vocabulary(models)
            config = MfccConfig(include_deltas=False, include_delta_deltas=False)
            local_transcript = transcribe_clip(load_wav(wav_path), vocab,
                                               FrameSpec(), config)
            assert transcript == local_transcript
            session = create_session("team")
            session.join("ann")
            session.join("bob")
            session.submit_query("ann", local_transcript, index)
            session.submit_query("bob", "high pitch", index)
            local_merged = json.loads(json.dumps(render_merged(session.merged)))
            assert http_merged == local_merged
        finally:
            proc.terminate()
            proc.wait(timeout=10)

        elapsed = time.monotonic() - started
        assert elapsed < 90.0
        _report(f"end-to-end synth/train/serve HTTP flow, bit-exact merge ({elapsed:.1f}s)")
