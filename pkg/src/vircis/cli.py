"""Command-line front end for the whole pipeline.

Exit codes: 0 success, 2 bad input or usage, 1 failed replay assertion.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import audio, frontend, retrieval
from .errors import ConfigurationError, ParameterError, VircisError
from .recognizer import (evaluate, load_vocabulary, recognize, save_vocabulary,
                         train_vocabulary)
from .service import ServiceSettings, serve
from .session import RelevanceFilterConfig, parse_script, replay_events


def add_frontend_args(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("feature extraction")
    g.add_argument("--frame-ms", type=float, default=25.0)
    g.add_argument("--hop-ms", type=float, default=10.0)
    g.add_argument("--preemphasis", type=float, default=0.97)
    g.add_argument("--window", choices=list(frontend.WINDOW_KINDS), default="hamming")
    g.add_argument("--fft-size", type=int, default=512)
    g.add_argument("--mel-filters", type=int, default=26)
    g.add_argument("--cepstra", type=int, default=13)
    g.add_argument("--low-hz", type=float, default=0.0)
    g.add_argument("--high-hz", type=float, default=8000.0)
    g.add_argument("--energy", action="store_true", help="replace c0 with log frame energy")
    g.add_argument("--no-deltas", action="store_true")
    g.add_argument("--no-delta-deltas", action="store_true")


def frontend_from_args(args) -> tuple[frontend.FrameSpec, frontend.MfccConfig]:
    spec = frontend.FrameSpec(frame_length_ms=args.frame_ms, hop_ms=args.hop_ms,
                              preemphasis_alpha=args.preemphasis, window=args.window)
    config = frontend.MfccConfig(
        num_mel_filters=args.mel_filters, num_cepstra=args.cepstra,
        include_energy=args.energy,
        include_deltas=not args.no_deltas,
        include_delta_deltas=not (args.no_deltas or args.no_delta_deltas),
        fft_size=args.fft_size, low_freq_hz=args.low_hz, high_freq_hz=args.high_hz)
    return spec, config


def _stopwords(path: str | None) -> frozenset:
    return retrieval.load_stopwords(path) if path else retrieval.default_stopwords()


def _load_index_arg(path: str, stopwords_path: str | None) -> retrieval.InvertedIndex:
    if os.path.isdir(path):
        return retrieval.index_documents(retrieval.load_corpus_dir(path), _stopwords(stopwords_path))
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("doc_count "):
        return retrieval.load_index(path)
    return retrieval.index_documents(retrieval.load_corpus_manifest(path), _stopwords(stopwords_path))


def _clips_by_label(manifest_path: str) -> dict[str, list[audio.AudioClip]]:
    grouped: dict[str, list[audio.AudioClip]] = {}
    for label, wav_path in audio.read_manifest(manifest_path):
        grouped.setdefault(label, []).append(audio.load_wav(wav_path))
    if not grouped:
        raise ParameterError(f"manifest {manifest_path} lists no clips")
    return grouped


# --- subcommand handlers ----------------------------------------------------

def cmd_synth(args) -> int:
    words = audio.load_tone_vocab(args.vocab)
    train, test = audio.synth_dataset(
        words, args.out, train_count=args.train, test_count=args.test,
        seed=args.seed, sample_rate=args.sample_rate, amplitude=args.amplitude,
        noise_sigma=args.noise)
    print(train)
    print(test)
    return 0


def cmd_extract(args) -> int:
    spec, config = frontend_from_args(args)
    features = frontend.extract_mfcc(audio.load_wav(args.wav), spec, config)
    frontend.save_features(features, args.out)
    print(f"{args.out}: {features.num_frames} frames x {features.dim} coefficients")
    return 0


def cmd_train(args) -> int:
    spec, config = frontend_from_args(args)
    vocab = train_vocabulary(_clips_by_label(args.manifest), args.states,
                             args.iterations, args.seed, spec, config)
    for path in save_vocabulary(vocab, args.out):
        print(path)
    return 0


def cmd_recognize(args) -> int:
    spec, config = frontend_from_args(args)
    vocab = load_vocabulary(args.models)
    clip = audio.load_wav(args.wav)
    segments = audio.split_on_silence(clip, threshold=args.silence_threshold,
                                      min_silence_ms=args.min_silence_ms) or [clip]
    outcomes = [recognize(seg, vocab, spec, config) for seg in segments]
    print(" ".join(o.label for o in outcomes))
    for i, outcome in enumerate(outcomes, 1):
        print(f"# segment {i}")
        for label, score in outcome.ranked:
            print(f"{label}\t{score!r}")
    return 0


def cmd_eval(args) -> int:
    spec, config = frontend_from_args(args)
    vocab = load_vocabulary(args.models)
    testset = [(label, audio.load_wav(path)) for label, path in audio.read_manifest(args.manifest)]
    report = evaluate(testset, vocab, spec, config)
    print(report.render_table())
    print(f"{report.accuracy_percent:.2f}")
    print(report.to_json())
    return 0


def cmd_index(args) -> int:
    if bool(args.corpus) == bool(args.manifest):
        raise ParameterError("give exactly one of --corpus or --manifest")
    stop = _stopwords(args.stopwords)
    docs = (retrieval.load_corpus_dir(args.corpus) if args.corpus
            else retrieval.load_corpus_manifest(args.manifest))
    index = retrieval.index_documents(docs, stop)
    retrieval.save_index(index, args.out)
    print(f"{args.out}: {index.doc_count} docs, {len(index.postings)} terms")
    return 0


def cmd_search(args) -> int:
    index = _load_index_arg(args.index, args.stopwords)
    ranked = retrieval.search(index, args.query, args.top_k)
    for doc_id, score in ranked.entries:
        print(f"{doc_id}\t{score!r}")
    return 0


def cmd_session_replay(args) -> int:
    spec, config = frontend_from_args(args)
    index = _load_index_arg(args.index, args.stopwords)
    vocab = load_vocabulary(args.models) if args.models else None
    with open(args.script, "r", encoding="utf-8") as fh:
        events = parse_script(fh.readlines(), args.script)
    result = replay_events(
        events, index,
        filter_config=RelevanceFilterConfig(threshold=args.threshold, boost=args.boost),
        vocab=vocab, frame_spec=spec, mfcc_config=config, top_k=args.top_k)
    for entry in result.session.merged.entries:
        print(f"{entry.doc_id}\t{entry.score!r}\t{entry.contributors}")
    for failure in result.failures:
        print(f"FAIL: {failure}", file=sys.stderr)
    return 0 if result.ok else 1


def cmd_serve(args) -> int:
    if not args.corpus:
        raise ConfigurationError("--corpus (or VIRCIS_CORPUS) is required")
    spec, config = frontend_from_args(args)
    vocab = load_vocabulary(args.models) if args.models else None
    settings = ServiceSettings(
        index=_load_index_arg(args.corpus, args.stopwords), vocab=vocab,
        frame_spec=spec, mfcc_config=config,
        filter_config=RelevanceFilterConfig(threshold=args.threshold, boost=args.boost),
        top_k=args.top_k, silence_threshold=args.silence_threshold,
        min_silence_ms=args.min_silence_ms)
    serve(settings, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vircis",
                                     description="voice-driven collaborative search toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate labeled synthetic tone-word WAVs")
    p.add_argument("--vocab", required=True, help="tone vocabulary file: label freq[:ms] ...")
    p.add_argument("--out", required=True)
    p.add_argument("--train", type=int, default=10)
    p.add_argument("--test", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sample-rate", type=int, default=16000)
    p.add_argument("--amplitude", type=float, default=0.35)
    p.add_argument("--noise", type=float, default=0.005)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="WAV to feature-matrix text file")
    p.add_argument("--wav", required=True)
    p.add_argument("--out", required=True)
    add_frontend_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train word models from a label/WAV manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--states", type=int, default=5)
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    add_frontend_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="transcribe a WAV against a model directory")
    p.add_argument("--wav", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--silence-threshold", type=float, default=0.01)
    p.add_argument("--min-silence-ms", type=float, default=200.0)
    add_frontend_args(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("eval", help="accuracy of a model directory on a test manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--models", required=True)
    add_frontend_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("index", help="build and save an inverted index")
    p.add_argument("--corpus", help="directory of text documents")
    p.add_argument("--manifest", help="doc_id<TAB>title<TAB>body-path lines")
    p.add_argument("--stopwords")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="query an index (file or corpus directory)")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--stopwords")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("session", help="collaborative session tools")
    session_sub = p.add_subparsers(dest="session_command", required=True)
    p = session_sub.add_parser("replay", help="run a scripted session against an index")
    p.add_argument("--script", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--models", help="model directory for QUERY_WAV lines")
    p.add_argument("--stopwords")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--boost", type=float, default=2.0)
    p.add_argument("--top-k", type=int, default=10)
    add_frontend_args(p)
    p.set_defaults(func=cmd_session_replay)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("VIRCIS_PORT", "8000")))
    p.add_argument("--corpus", default=os.environ.get("VIRCIS_CORPUS"),
                   help="corpus directory, corpus manifest, or saved index file")
    p.add_argument("--models", default=os.environ.get("VIRCIS_MODELS"))
    p.add_argument("--stopwords")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--boost", type=float, default=2.0)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--silence-threshold", type=float, default=0.01)
    p.add_argument("--min-silence-ms", type=float, default=200.0)
    add_frontend_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VircisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
