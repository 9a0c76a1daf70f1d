"""Voice-driven collaborative search.

Spoken queries go through a cepstral front end and per-word left-to-right
HMMs decoded by best-path search; the transcript drives TF-IDF retrieval,
and a session layer merges, filters, splits, and re-ranks the collaborators'
result lists into one shared judgment.
"""

from .audio import (AudioClip, ToneWord, load_tone_vocab, load_wav,
                    read_manifest, render_tone_word, save_wav,
                    split_on_silence, synth_dataset, synth_tone, wav_bytes)
from .errors import (AudioFormatError, ConfigurationError,
                     EmptyObservationsError, IndexingError,
                     InputTooShortError, MembershipError, ModelError,
                     ParameterError, SessionConflictError,
                     SessionNotFoundError, TrainingDataError,
                     UnsupportedAudioError, VircisError)
from .estimators import HmmWordRecognizer, MfccExtractor
from .frontend import (FeatureMatrix, FrameSpec, MfccConfig, delta_features,
                       extract_mfcc, frame_signal, load_features,
                       mel_filterbank, preemphasize, power_spectrum,
                       save_features)
from .hmm import (HmmModel, Trellis, ViterbiResult, decode_emissions,
                  emission_logprob, load_model, path_logprob, save_model,
                  sequence_logprob, train_model, training_loglik, viterbi)
from .recognizer import (EvalReport, RecognitionOutcome, Vocabulary, evaluate,
                         load_vocabulary, recognize, save_vocabulary,
                         train_vocabulary)
from .retrieval import (Document, InvertedIndex, RankedList, default_stopwords,
                     index_documents, load_corpus_dir, load_corpus_manifest,
                     load_index, load_stopwords, save_index, search,
                     tokenize_filter)
from .service import ServiceSettings, create_app
from .session import (MergedEntry, MergedResult, RelevanceFilterConfig,
                      Session, SplitAssignment, create_session, join_session,
                      merge_results, parse_script, replay_events,
                      rerank_with_judgments, split_results, transcribe_clip)

__version__ = "0.1.0"
