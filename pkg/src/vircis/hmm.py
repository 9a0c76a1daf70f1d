"""Left-to-right word HMMs: diagonal-Gaussian emissions, max-path decoding,
segmental (k-means style) re-estimation.

All probabilities live in log space; the decoder's products become sums so
realistic observation lengths cannot underflow. States are numbered 1..N in
paths and backpointers, with 0 denoting the virtual start state; row/column
``i`` of the parameter arrays belongs to state ``i + 1``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import BinaryIO, Sequence, Union

import numpy as np

from .errors import (EmptyObservationsError, ModelError, ParameterError,
                     TrainingDataError)
from .frontend import FeatureMatrix

VAR_FLOOR = 1e-3
LOG_ZERO = -np.inf

Observations = Union[FeatureMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class HmmModel:
    """One word's acoustic model.

    entry_logprob[i] is the log probability of starting in state i+1,
    trans_logprob[i, j] of moving from state i+1 to j+1, and
    exit_logprob[i] of leaving to the final state from state i+1; each row
    of exp(trans) plus exp(exit) must sum to one.
    """

    label: str
    means: np.ndarray
    variances: np.ndarray
    entry_logprob: np.ndarray
    trans_logprob: np.ndarray
    exit_logprob: np.ndarray

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        variances = np.atleast_2d(np.asarray(self.variances, dtype=np.float64))
        entry = np.asarray(self.entry_logprob, dtype=np.float64)
        trans = np.asarray(self.trans_logprob, dtype=np.float64)
        exit_ = np.asarray(self.exit_logprob, dtype=np.float64)
        n, d = means.shape
        if variances.shape != (n, d):
            raise ModelError(f"variances shape {variances.shape} != means shape {(n, d)}")
        if entry.shape != (n,) or exit_.shape != (n,) or trans.shape != (n, n):
            raise ModelError("transition parameter shapes do not match the state count")
        if np.any(np.isnan(entry)) or np.any(np.isnan(trans)) or np.any(np.isnan(exit_)):
            raise ModelError("log probabilities must not be NaN")
        if not np.all(variances >= VAR_FLOOR - 1e-15):
            raise ModelError(f"variances must respect the floor {VAR_FLOOR}")
        entry_sum = np.sum(np.exp(entry))
        if abs(entry_sum - 1.0) > 1e-6:
            raise ModelError(f"entry probabilities sum to {entry_sum}, not 1")
        row_sums = np.sum(np.exp(trans), axis=1) + np.exp(exit_)
        if np.any(np.abs(row_sums - 1.0) > 1e-6):
            raise ModelError(f"transition rows + exit must sum to 1, got {row_sums}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)
        object.__setattr__(self, "entry_logprob", entry)
        object.__setattr__(self, "trans_logprob", trans)
        object.__setattr__(self, "exit_logprob", exit_)

    @property
    def num_states(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def equals(self, other: "HmmModel") -> bool:
        return (self.label == other.label
                and np.array_equal(self.means, other.means)
                and np.array_equal(self.variances, other.variances)
                and np.array_equal(self.entry_logprob, other.entry_logprob)
                and np.array_equal(self.trans_logprob, other.trans_logprob)
                and np.array_equal(self.exit_logprob, other.exit_logprob))


@dataclass(frozen=True)
class Trellis:
    """Score and backpointer matrices of one decode.

    scores has N+2 rows: row 0 is the virtual start state (never occupied),
    rows 1..N the emitting states, and the last row holds the termination
    score in its final column. backpointers[s-1, t] is the predecessor of
    state s at time t, with 0 meaning the start state in column 0.
    """

    scores: np.ndarray
    backpointers: np.ndarray
    final_score: float
    num_obs: int


@dataclass(frozen=True)
class ViterbiResult:
    state_path: tuple
    log_prob: float


def emission_logprob(model: HmmModel, state: int, observation: np.ndarray) -> float:
    """Log density of one observation under state's diagonal Gaussian.

    log b_s(o) = -1/2 * sum_d [ log(2*pi*var_d) + (o_d - mu_d)^2 / var_d ]
    """
    if not 1 <= state <= model.num_states:
        raise ModelError(f"state {state} outside 1..{model.num_states}")
    obs = np.asarray(observation, dtype=np.float64)
    if obs.shape != (model.dim,):
        raise ModelError(f"observation shape {obs.shape} != model dimension ({model.dim},)")
    mu = model.means[state - 1]
    var = model.variances[state - 1]
    return float(-0.5 * np.sum(np.log(2.0 * np.pi * var) + (obs - mu) ** 2 / var))


def _as_matrix(observations: Observations, model: HmmModel) -> np.ndarray:
    obs = observations.frames if isinstance(observations, FeatureMatrix) else np.asarray(observations, dtype=np.float64)
    if obs.ndim != 2:
        raise ModelError(f"observations must be a T x D matrix, got shape {obs.shape}")
    if obs.shape[0] == 0:
        raise EmptyObservationsError("cannot decode an empty observation sequence")
    if obs.shape[1] != model.dim:
        raise ModelError(f"observation dimension {obs.shape[1]} != model dimension {model.dim}")
    return obs


def _all_emissions(model: HmmModel, obs: np.ndarray) -> np.ndarray:
    """(T, N) matrix of log b_s(o_t)."""
    const = np.sum(np.log(2.0 * np.pi * model.variances), axis=1)  # (N,)
    diff = obs[:, None, :] - model.means[None, :, :]               # (T, N, D)
    quad = np.sum(diff * diff / model.variances[None, :, :], axis=2)
    return -0.5 * (const[None, :] + quad)


def decode_emissions(emissions: np.ndarray, entry_logprob: np.ndarray,
                     trans_logprob: np.ndarray, exit_logprob: np.ndarray
                     ) -> tuple[tuple, float, np.ndarray, np.ndarray]:
    """Max-path recursion over an explicit (T, N) matrix of log densities.

    Returns (path, final_score, scores, backpointers) with 1-based state
    numbering. Exposed separately so decoder properties can be checked
    independently of the emission family.
    """
    num_obs, n = emissions.shape
    scores = np.full((n, num_obs), LOG_ZERO)
    backpointers = np.zeros((n, num_obs), dtype=np.int64)
    scores[:, 0] = entry_logprob + emissions[0]
    for t in range(1, num_obs):
        candidates = scores[:, t - 1][:, None] + trans_logprob  # (from, to)
        best_from = np.argmax(candidates, axis=0)
        scores[:, t] = candidates[best_from, np.arange(n)] + emissions[t]
        backpointers[:, t] = best_from + 1

    termination = scores[:, num_obs - 1] + exit_logprob
    last_state = int(np.argmax(termination))
    final_score = float(termination[last_state])

    path = np.empty(num_obs, dtype=np.int64)
    path[num_obs - 1] = last_state + 1
    for t in range(num_obs - 1, 0, -1):
        path[t - 1] = backpointers[path[t] - 1, t]
    return tuple(int(s) for s in path), final_score, scores, backpointers


def viterbi(observations: Observations, model: HmmModel) -> tuple[ViterbiResult, Trellis]:
    """Best-path decode.

    Column 1 is entry[s] + b_s(o_1) with backpointer 0; each later column
    takes, per state, the best predecessor score plus transition plus the
    state's emission; termination adds the exit weights over the last
    column. Ties always resolve to the lowest state index, and the returned
    log probability is the termination score itself.
    """
    obs = _as_matrix(observations, model)
    num_obs, n = obs.shape[0], model.num_states
    emissions = _all_emissions(model, obs)
    path, final_score, scores, backpointers = decode_emissions(
        emissions, model.entry_logprob, model.trans_logprob, model.exit_logprob)

    full = np.full((n + 2, num_obs), LOG_ZERO)
    full[1:n + 1, :] = scores
    full[n + 1, num_obs - 1] = final_score
    trellis = Trellis(scores=full, backpointers=backpointers,
                      final_score=final_score, num_obs=num_obs)
    return ViterbiResult(state_path=path, log_prob=final_score), trellis


def sequence_logprob(observations: Observations, model: HmmModel) -> float:
    """Best-path log probability without materializing the path.

    Arithmetically identical to viterbi(...)[0].log_prob.
    """
    obs = _as_matrix(observations, model)
    num_obs, n = obs.shape[0], model.num_states
    emissions = _all_emissions(model, obs)
    column = model.entry_logprob + emissions[0]
    for t in range(1, num_obs):
        candidates = column[:, None] + model.trans_logprob
        best_from = np.argmax(candidates, axis=0)
        column = candidates[best_from, np.arange(n)] + emissions[t]
    termination = column + model.exit_logprob
    return float(termination[int(np.argmax(termination))])


def path_logprob(observations: Observations, model: HmmModel, path: Sequence[int]) -> float:
    """Joint log probability of one explicit state path with the observations."""
    obs = _as_matrix(observations, model)
    if len(path) != obs.shape[0]:
        raise ModelError("path length must equal the observation count")
    total = model.entry_logprob[path[0] - 1] + emission_logprob(model, path[0], obs[0])
    for t in range(1, len(path)):
        total += model.trans_logprob[path[t - 1] - 1, path[t] - 1]
        total += emission_logprob(model, path[t], obs[t])
    return float(total + model.exit_logprob[path[-1] - 1])


# ---------------------------------------------------------------------------
# Training: uniform-segmentation start, then iterative realign / re-estimate
# ---------------------------------------------------------------------------

def uniform_segmentation(num_obs: int, num_states: int) -> tuple:
    """Split 1..T into num_states contiguous chunks; state of each frame."""
    bounds = [num_obs * j // num_states for j in range(num_states + 1)]
    path = np.empty(num_obs, dtype=np.int64)
    for j in range(num_states):
        path[bounds[j]:bounds[j + 1]] = j + 1
    return tuple(int(s) for s in path)


def _estimate(sequences: list[np.ndarray], paths: list[tuple], num_states: int,
              label: str, var_floor: float) -> HmmModel:
    dim = sequences[0].shape[1]
    sums = np.zeros((num_states, dim))
    sq_sums = np.zeros((num_states, dim))
    counts = np.zeros(num_states)
    self_counts = np.zeros(num_states)
    advance_counts = np.zeros(num_states)
    for obs, path in zip(sequences, paths):
        for t, state in enumerate(path):
            i = state - 1
            sums[i] += obs[t]
            sq_sums[i] += obs[t] * obs[t]
            counts[i] += 1
            if t + 1 < len(path):
                if path[t + 1] == state:
                    self_counts[i] += 1
                elif path[t + 1] == state + 1:
                    advance_counts[i] += 1
                else:
                    raise TrainingDataError("alignment is not left-to-right")
        if path[-1] != num_states:
            raise TrainingDataError("alignment does not end in the last state")

    if np.any(counts == 0):
        raise TrainingDataError("a state received no frames during alignment")

    means = sums / counts[:, None]
    variances = np.maximum(sq_sums / counts[:, None] - means * means, var_floor)

    num_exits = float(len(sequences))
    trans = np.full((num_states, num_states), LOG_ZERO)
    exit_logp = np.full(num_states, LOG_ZERO)
    for i in range(num_states):
        out = num_exits if i == num_states - 1 else advance_counts[i]
        denom = self_counts[i] + out + 2.0  # +1 Laplace on both arcs
        trans[i, i] = math.log((self_counts[i] + 1.0) / denom)
        if i == num_states - 1:
            exit_logp[i] = math.log((out + 1.0) / denom)
        else:
            trans[i, i + 1] = math.log((out + 1.0) / denom)

    entry = np.full(num_states, LOG_ZERO)
    entry[0] = 0.0
    return HmmModel(label=label, means=means, variances=variances,
                    entry_logprob=entry, trans_logprob=trans, exit_logprob=exit_logp)


def train_model(sequences: Sequence[Observations], num_states: int,
                iterations: int = 10, seed: int = 42, *,
                label: str = "", var_floor: float = VAR_FLOOR) -> HmmModel:
    """Train one left-to-right word model by segmental re-estimation.

    Starts from a uniform time segmentation, then up to `iterations` rounds
    of: decode every sequence, re-estimate Gaussians and transition counts
    (+1 smoothing) from the new alignment. Stops early when the alignment
    is stable or when the total decode likelihood would decrease, so the
    likelihood is non-decreasing in the iteration budget. Fully
    deterministic; `seed` is reserved for randomized initializers.
    """
    del seed
    if iterations < 0:
        raise ParameterError("iterations must be >= 0")
    if num_states < 1:
        raise ParameterError("num_states must be >= 1")
    if not sequences:
        raise TrainingDataError("need at least one training sequence")
    matrices = []
    for s in sequences:
        obs = s.frames if isinstance(s, FeatureMatrix) else np.asarray(s, dtype=np.float64)
        if obs.ndim != 2 or obs.shape[0] == 0:
            raise TrainingDataError("each training sequence must be a non-empty T x D matrix")
        if obs.shape[0] < num_states:
            raise TrainingDataError(
                f"sequence of {obs.shape[0]} frames cannot traverse {num_states} states")
        matrices.append(obs)
    dims = {m.shape[1] for m in matrices}
    if len(dims) != 1:
        raise TrainingDataError(f"training sequences disagree on dimension: {sorted(dims)}")

    align = [uniform_segmentation(m.shape[0], num_states) for m in matrices]
    model = _estimate(matrices, align, num_states, label, var_floor)
    if iterations == 0:
        return model

    previous = model
    total_ll = None
    for _ in range(iterations):
        results = [viterbi(m, model) for m in matrices]
        ll = float(sum(r.log_prob for r, _ in results))
        if total_ll is not None and ll < total_ll:
            return previous  # the realigned model got worse; keep the old one
        new_align = [r.state_path for r, _ in results]
        if new_align == align:
            return model  # alignment stable, re-estimation would be a no-op
        previous, total_ll = model, ll
        model = _estimate(matrices, new_align, num_states, label, var_floor)
        align = new_align

    # Budget ended right after a re-estimate; vet the last candidate too.
    if total_ll is not None and training_loglik(matrices, model) < total_ll:
        return previous
    return model


def training_loglik(sequences: Sequence[Observations], model: HmmModel) -> float:
    """Total best-path log likelihood of a collection under one model."""
    return float(sum(sequence_logprob(s, model) for s in sequences))


# ---------------------------------------------------------------------------
# Text serialization, 17 significant digits for exact round trips
# ---------------------------------------------------------------------------

def _fmt_row(values: np.ndarray) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def save_model(model: HmmModel, target: "str | os.PathLike | BinaryIO") -> None:
    lines = [f"hmm {model.label} {model.num_states} {model.dim}",
             _fmt_row(model.entry_logprob)]
    lines.extend(_fmt_row(row) for row in model.trans_logprob)
    lines.append(_fmt_row(model.exit_logprob))
    for i in range(model.num_states):
        lines.append(_fmt_row(model.means[i]))
        lines.append(_fmt_row(model.variances[i]))
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text.encode("ascii"))  # type: ignore[union-attr]
    else:
        with open(target, "w", encoding="ascii") as fh:
            fh.write(text)


def load_model(source: "str | os.PathLike | BinaryIO") -> HmmModel:
    if hasattr(source, "read"):
        text = source.read().decode("ascii")  # type: ignore[union-attr]
    else:
        with open(source, "r", encoding="ascii") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split() if lines else []
    if len(head) != 4 or head[0] != "hmm":
        raise ParameterError("bad model header; expected 'hmm <label> N D'")
    label, n, dim = head[1], int(head[2]), int(head[3])
    expected = 1 + 1 + n + 1 + 2 * n
    if len(lines) != expected:
        raise ParameterError(f"expected {expected} lines for N={n}, found {len(lines)}")

    def row(idx: int, width: int) -> np.ndarray:
        values = np.array([float(v) for v in lines[idx].split()], dtype=np.float64)
        if values.size != width:
            raise ParameterError(f"line {idx + 1}: expected {width} values, found {values.size}")
        return values

    entry = row(1, n)
    trans = np.vstack([row(2 + i, n) for i in range(n)])
    exit_ = row(2 + n, n)
    means = np.vstack([row(3 + n + 2 * i, dim) for i in range(n)])
    variances = np.vstack([row(4 + n + 2 * i, dim) for i in range(n)])
    return HmmModel(label=label, means=means, variances=variances,
                    entry_logprob=entry, trans_logprob=trans, exit_logprob=exit_)
