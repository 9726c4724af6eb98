"""
Game engine for the parameterised unforgeability game.

A trial runs Setup, the optional selective commitment, the learning phase,
the existential or universal challenge, the optional second learning phase
(adaptive-universal only) and the guess. The challenger side checks the
mu-distinguishability condition exactly on the recorded query inputs and
then calls the primitive's verifier.

Adversaries hold one global pure state per query: the oracle acts on the
registers it knows (message/ancilla or record/message) and leaves every other
register of the submitted state alone, so private registers stay entangled
with the answers.
"""

import logging
import math
from abc import ABC
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import stats

from qunforge import qstate, verifiers
from qunforge.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    QueryBudgetError,
    TranscriptError,
)
from qunforge.oracles import (
    ANCILLA_REGISTER,
    MESSAGE_REGISTER,
    OracleInstance,
    generate_blinding,
)
from qunforge.primitives import ClassicalSetup, GameBinding, QuantumSetup
from qunforge.qstate import DensityMatrix, StateVector
from qunforge.verifiers import TestConfig

logger = logging.getLogger(__name__)

# Two-sided 95% normal quantile used for every reported confidence interval
CI_Z = float(stats.norm.ppf(0.975))


class GameMode(Enum):
    QEX = "qEx"
    QSEL = "qSel"
    QUNI = "qUni"


class Phase(Enum):
    SELECTIVE = "selective"
    LEARNING = "learning"
    CHALLENGE = "challenge"
    SECOND_LEARNING = "second-learning"
    GUESS = "guess"


class Reason(Enum):
    ACCEPTED = "accepted"
    REJECTED = "forgery-rejected"
    MU_VIOLATION = "mu-condition-violated"
    COMMITMENT_MISMATCH = "commitment-mismatch"
    ABSTAINED = "abstained"


@dataclass(frozen=True)
class ClassicalChallenge:
    message: int
    randomness: Optional[int] = None

    def to_dict(self, dump_states: bool = False) -> Dict:
        return {"message": self.message, "randomness": self.randomness}


@dataclass(frozen=True, eq=False)
class QuantumChallenge:
    state: StateVector
    randomness: Optional[int] = None

    @property
    def description(self) -> list:
        return self.state.to_description()

    def to_dict(self, dump_states: bool = False) -> Dict:
        data = {"dim": self.state.dim, "randomness": self.randomness}
        if dump_states:
            data["description"] = _interleave(self.state)
        return data


Challenge = Union[ClassicalChallenge, QuantumChallenge]


@dataclass(frozen=True)
class ClassicalForgery:
    message: int
    tag: int
    randomness: Optional[int] = None

    def to_dict(self, dump_states: bool = False) -> Dict:
        return {"message": self.message, "tag": self.tag, "randomness": self.randomness}


@dataclass(frozen=True, eq=False)
class QuantumForgery:
    """(description of psi_m, tag state, optional randomness)."""

    message_state: StateVector
    tag_state: Union[StateVector, DensityMatrix]
    randomness: Optional[int] = None

    def to_dict(self, dump_states: bool = False) -> Dict:
        data = {"dim": self.message_state.dim, "randomness": self.randomness}
        if dump_states:
            data["description"] = _interleave(self.message_state)
            if isinstance(self.tag_state, StateVector):
                data["tag_state"] = _interleave(self.tag_state)
        return data


Forgery = Union[ClassicalForgery, QuantumForgery]


def _interleave(state: StateVector) -> List[float]:
    """Amplitudes as [re0, im0, re1, im1, ...]."""
    return np.column_stack([state.amplitudes.real, state.amplitudes.imag]).reshape(-1).tolist()


def _layout_dict(state: StateVector) -> List[List[Any]]:
    return [[r.name, r.num_qubits] for r in state.layout]


@dataclass(frozen=True)
class PublicParameters:
    """What the adversary knows about the primitive: widths and register names."""

    quantum: bool
    n_in: int
    tag_bits: int
    randomness_bits: int
    ancilla_bits: int
    dim: int
    query_registers: Tuple[str, ...]
    blinded: bool = False

    @classmethod
    def of(cls, setup: Union[ClassicalSetup, QuantumSetup]) -> "PublicParameters":
        if setup.quantum:
            return cls(
                quantum=True,
                n_in=setup.message_qubits,
                tag_bits=0,
                randomness_bits=setup.randomness_bits,
                ancilla_bits=0,
                dim=setup.dim,
                query_registers=setup.query_registers,
            )
        return cls(
            quantum=False,
            n_in=setup.n_in,
            tag_bits=setup.tag_bits,
            randomness_bits=setup.randomness_bits,
            ancilla_bits=setup.ancilla_bits,
            dim=2**setup.n_in,
            query_registers=setup.query_registers,
        )

    @property
    def query_qubits(self) -> int:
        """Width of one query state on the oracle's registers."""
        if self.quantum:
            return self.n_in + self.randomness_bits
        return self.n_in + self.ancilla_bits


class GameContext:
    """The adversary's view of one trial: public parameters, answers so far, its own randomness."""

    def __init__(
        self,
        mode: Optional[GameMode],
        q: int,
        mu: float,
        public: PublicParameters,
        rng: np.random.Generator,
    ):
        self.mode = mode
        self.q = q
        self.mu = mu
        self.public = public
        self.rng = rng
        self.phase = Phase.LEARNING
        self.outputs: List[StateVector] = []
        self.challenge: Optional[Challenge] = None
        self.extra_forgeries: List[ClassicalForgery] = []
        self.notes: Dict[str, Any] = {}

    @property
    def queries_used(self) -> int:
        return len(self.outputs)

    @property
    def queries_left(self) -> int:
        return self.q - self.queries_used


class Adversary(ABC):
    """
    One trial's adversary.

    next_query returns the full state to submit (None when done); guess
    returns a forgery or None to abstain.
    """

    def select_challenge(self, ctx: GameContext) -> Challenge:
        raise NotImplementedError(f"{type(self).__name__} does not choose challenges")

    def receive_challenge(self, ctx: GameContext, challenge: Challenge) -> None:
        ctx.challenge = challenge

    def next_query(self, ctx: GameContext) -> Optional[StateVector]:
        return None

    def guess(self, ctx: GameContext) -> Optional[Forgery]:
        return None

    def private_state(self) -> Optional[StateVector]:
        return None


@dataclass(frozen=True)
class AdversaryStrategy:
    """
    Stateless factory producing a fresh Adversary per trial.

    qubits, when given, maps the public parameters to the widest state the
    adversary builds, so oversized widths fail before any trial runs.
    """

    name: str
    factory: Callable[[], Adversary]
    params: Dict[str, Any] = field(default_factory=dict)
    qubits: Optional[Callable[[PublicParameters], int]] = None

    def spawn(self) -> Adversary:
        return self.factory()

    def check_capacity(self, public: PublicParameters) -> None:
        if self.qubits is None:
            return
        needed = self.qubits(public)
        if needed > qstate.MAX_QUBITS:
            raise InvalidParameterError(
                f"{self.name} needs {needed} qubits at n={public.n_in}, "
                f"above the {qstate.MAX_QUBITS}-qubit simulator limit"
            )


@dataclass
class GameConfig:
    binding: GameBinding
    q: int
    mode: GameMode
    mu: float = 1.0
    verifier: TestConfig = field(default_factory=TestConfig)
    strong_flag: bool = False
    aua_flag: bool = False
    trials: int = 1
    seed: int = 0

    @property
    def security_param(self) -> Optional[int]:
        """lambda the binding's widths were derived from, if it was built from one."""
        return self.binding.security_param

    def __post_init__(self):
        if self.q < 0:
            raise InvalidParameterError(f"q must be >= 0, got {self.q}")
        if not 0.0 < self.mu <= 1.0:
            raise InvalidParameterError(f"mu must lie in (0, 1], got {self.mu}")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be >= 1, got {self.trials}")
        if self.aua_flag and self.mode != GameMode.QUNI:
            raise InvalidParameterError("The second learning phase is only defined for qUni")

    def to_dict(self) -> Dict:
        return {
            "primitive": self.binding.descriptor(),
            "q": self.q,
            "mode": self.mode.value,
            "mu": self.mu,
            "verifier": self.verifier.to_dict(),
            "strong_flag": self.strong_flag,
            "aua_flag": self.aua_flag,
            "trials": self.trials,
            "seed": self.seed,
        }


@dataclass(eq=False)
class QueryRecord:
    index: int
    phase: Phase
    input_state: StateVector
    output_state: StateVector
    randomness: Optional[int]
    challenge_fidelity: Optional[float] = None

    def to_dict(self, dump_states: bool = False) -> Dict:
        in_desc: Dict[str, Any] = {"layout": _layout_dict(self.input_state)}
        out_desc: Dict[str, Any] = {"layout": _layout_dict(self.output_state)}
        if dump_states:
            in_desc["amplitudes"] = _interleave(self.input_state)
            out_desc["amplitudes"] = _interleave(self.output_state)
        return {
            "index": self.index,
            "phase": self.phase.value,
            "randomness": self.randomness,
            "challenge_fidelity": self.challenge_fidelity,
            "in_desc": in_desc,
            "out_desc": out_desc,
        }


@dataclass
class MuCheck:
    passed: bool
    fidelities: List[float]
    threshold: float

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "fidelities": self.fidelities, "threshold": self.threshold}


@dataclass(eq=False)
class GameTranscript:
    trial: int
    mode: GameMode
    queries: List[QueryRecord] = field(default_factory=list)
    challenge: Optional[Challenge] = None
    guess: Optional[Forgery] = None
    mu_check: Optional[MuCheck] = None
    p_ov: float = 0.0
    forgery_fidelity: Optional[float] = None
    extra_verdicts: List[bool] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)
    private_snapshot: Optional[StateVector] = None
    verdict: Optional[int] = None
    reason: Optional[Reason] = None

    def conclude(self, verdict: int, reason: Reason) -> None:
        if self.verdict is not None:
            raise TranscriptError(f"Trial {self.trial} already has verdict {self.verdict}")
        self.verdict = verdict
        self.reason = reason

    def to_dict(self, dump_states: bool = False) -> Dict:
        data = {
            "trial": self.trial,
            "mode": self.mode.value if self.mode else None,
            "queries": [record.to_dict(dump_states) for record in self.queries],
            "challenge": self.challenge.to_dict(dump_states) if self.challenge else None,
            "guess": self.guess.to_dict(dump_states) if self.guess else None,
            "mu_check": self.mu_check.to_dict() if self.mu_check else None,
            "p_ov": self.p_ov,
            "forgery_fidelity": self.forgery_fidelity,
            "verdict": self.verdict,
            "reason": self.reason.value if self.reason else None,
            "notes": {k: self.notes[k] for k in sorted(self.notes)},
        }
        if dump_states and self.private_snapshot is not None:
            data["private_state"] = _interleave(self.private_snapshot)
        return data


def confidence_half_width(p: float, n: int) -> float:
    """Normal-approximation half-width CI_Z * sqrt(p (1 - p) / n)."""
    return CI_Z * math.sqrt(max(p * (1.0 - p), 0.0) / n)


@dataclass
class ExperimentResult:
    trials: int
    wins: int
    win_rate: float
    p_ov: float
    advantage: float
    ci95: float
    seed: int
    reasons: Dict[str, int] = field(default_factory=dict)
    metrics: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.wins <= self.trials:
            raise InvalidParameterError(f"wins={self.wins} outside [0, {self.trials}]")

    @classmethod
    def from_counts(
        cls,
        trials: int,
        wins: int,
        p_ov: float,
        seed: int,
        reasons: Optional[Dict[str, int]] = None,
        metrics: Optional[Dict[str, float]] = None,
    ) -> "ExperimentResult":
        rate = wins / trials
        return cls(
            trials=trials,
            wins=wins,
            win_rate=rate,
            p_ov=p_ov,
            advantage=rate - p_ov,
            ci95=confidence_half_width(rate, trials),
            seed=seed,
            reasons=reasons or {},
            metrics=metrics or {},
        )

    def to_dict(self) -> Dict:
        return {
            "trials": self.trials,
            "wins": self.wins,
            "win_rate": self.win_rate,
            "p_ov": self.p_ov,
            "advantage": self.advantage,
            "ci95": self.ci95,
            "seed": self.seed,
            "reasons": dict(sorted(self.reasons.items())),
            "metrics": dict(sorted(self.metrics.items())),
        }


def p_ov_classical(q: int, mu: float) -> float:
    """Overlap probability 1 - mu^q of trivial attacks in q-query classical games."""
    if q < 0:
        raise InvalidParameterError(f"q must be >= 0, got {q}")
    if not 0.0 <= mu <= 1.0:
        raise InvalidParameterError(f"mu must lie in [0, 1], got {mu}")
    return 1.0 - mu**q


def p_ov_quantum(
    max_overlap_query_out: Union[StateVector, DensityMatrix],
    true_out: Union[StateVector, DensityMatrix],
    cfg: TestConfig,
) -> float:
    """Acceptance probability of the test on the max-overlap answer against the true output."""
    return verifiers.make_test(cfg).acceptance_probability(max_overlap_query_out, true_out)


def _challenge_vector(challenge: Challenge, record: QueryRecord) -> Tuple[np.ndarray, Tuple[str, ...]]:
    if isinstance(challenge, QuantumChallenge):
        return challenge.state.amplitudes, (MESSAGE_REGISTER,)
    message_dim = record.input_state.register(MESSAGE_REGISTER).dim
    ancilla_dim = record.input_state.register(ANCILLA_REGISTER).dim
    vec = np.zeros(message_dim * ancilla_dim, dtype=np.complex128)
    vec[challenge.message * ancilla_dim] = 1.0
    return vec, (MESSAGE_REGISTER, ANCILLA_REGISTER)


def challenge_fidelity(
    challenge: Challenge, record: QueryRecord, strong_flag: bool = False
) -> float:
    """
    F(challenge, rho_in) on the query registers of one recorded query.

    Classical messages are encoded as |m, 0...0>. With strong_flag the
    per-query randomness is part of the compared state, so differing r gives 0.
    """
    if strong_flag and record.randomness != challenge.randomness:
        return 0.0
    vec, registers = _challenge_vector(challenge, record)
    return qstate.subsystem_fidelity(record.input_state, vec, registers)


def check_mu_condition(
    challenge: Challenge,
    transcript: GameTranscript,
    mu: float,
    strong_flag: bool = False,
) -> bool:
    """True iff the challenge is mu-distinguishable from every recorded query input."""
    return _mu_check(challenge, transcript.queries, mu, strong_flag).passed


def _mu_check(
    challenge: Challenge, queries: List[QueryRecord], mu: float, strong_flag: bool
) -> MuCheck:
    threshold = 1.0 - mu + qstate.TOLERANCE
    fidelities = [challenge_fidelity(challenge, record, strong_flag) for record in queries]
    return MuCheck(all(f <= threshold for f in fidelities), fidelities, threshold)


def _same_target(forgery: Forgery, challenge: Challenge) -> bool:
    if isinstance(challenge, ClassicalChallenge):
        return isinstance(forgery, ClassicalForgery) and forgery.message == challenge.message
    if not isinstance(forgery, QuantumForgery):
        return False
    if forgery.message_state.dim != challenge.state.dim:
        return False
    return qstate.fidelity(forgery.message_state, challenge.state) >= 1.0 - qstate.TOLERANCE


def _universal_challenge(setup, rng: np.random.Generator) -> Challenge:
    if setup.quantum:
        layout = [(MESSAGE_REGISTER, setup.message_qubits)]
        return QuantumChallenge(qstate.haar_random_state(setup.dim, rng, layout))
    return ClassicalChallenge(int(rng.integers(0, 2**setup.n_in)))


def _learning_phase(
    adversary: Adversary,
    ctx: GameContext,
    oracle: OracleInstance,
    transcript: GameTranscript,
    q: int,
):
    while True:
        state = adversary.next_query(ctx)
        if state is None:
            return
        if len(transcript.queries) >= q:
            raise QueryBudgetError(f"Adversary issued more than q={q} queries")
        output = oracle.apply(state)
        randomness = oracle.last_randomness if oracle.is_randomized else None
        transcript.queries.append(
            QueryRecord(len(transcript.queries), ctx.phase, state, output, randomness)
        )
        ctx.outputs.append(output)
        logger.debug(f"Trial {transcript.trial}: query {len(transcript.queries)} in {ctx.phase.value}")


def _p_ov_for_trial(cfg: GameConfig, setup, transcript: GameTranscript) -> float:
    if cfg.mode == GameMode.QUNI:
        return 0.0
    if not setup.quantum:
        return p_ov_classical(cfg.q, cfg.mu)
    if not transcript.queries or transcript.challenge is None:
        return 0.0
    best = max(transcript.queries, key=lambda record: record.challenge_fidelity or 0.0)
    randomness = best.randomness
    if transcript.guess is not None and transcript.guess.randomness is not None:
        randomness = transcript.guess.randomness
    if setup.randomness_bits and randomness is None:
        return 0.0
    answered = qstate.partial_trace(best.output_state, MESSAGE_REGISTER)
    true_out = setup.expected_output(transcript.challenge.state, randomness)
    return p_ov_quantum(answered, true_out, cfg.verifier)


def _verify_forgery(
    setup, challenge: Challenge, forgery: Forgery, cfg: GameConfig, seed: int, transcript: GameTranscript
) -> bool:
    if not setup.quantum:
        return setup.verify(forgery.message, forgery.tag, forgery.randomness)
    try:
        expected = setup.expected_output(challenge.state, forgery.randomness)
        transcript.forgery_fidelity = qstate.fidelity(forgery.tag_state, expected)
    except (DimensionMismatchError, InvalidParameterError) as e:
        logger.debug(f"Trial {transcript.trial}: no forgery fidelity ({e})")
        transcript.forgery_fidelity = None
    return setup.verify_tag(challenge.state, forgery.randomness, forgery.tag_state, cfg.verifier, seed)


def run_game(
    cfg: GameConfig, adv: AdversaryStrategy, trial_seed: int, trial: int = 0
) -> GameTranscript:
    """
    Play one trial.

    Seeds for setup, adversary, challenger and verifier are children of
    trial_seed, so a trial replays bit-exactly from its seed.
    """
    setup = cfg.binding.setup(qstate.derive_seed(trial_seed, 0))
    adversary = adv.spawn()
    ctx = GameContext(
        cfg.mode, cfg.q, cfg.mu, PublicParameters.of(setup), qstate.make_rng(qstate.derive_seed(trial_seed, 1))
    )
    challenger_rng = qstate.make_rng(qstate.derive_seed(trial_seed, 2))
    verifier_seed = qstate.derive_seed(trial_seed, 3)
    transcript = GameTranscript(trial, cfg.mode)

    if cfg.mode == GameMode.QSEL:
        ctx.phase = Phase.SELECTIVE
        transcript.challenge = adversary.select_challenge(ctx)
        ctx.challenge = transcript.challenge

    ctx.phase = Phase.LEARNING
    _learning_phase(adversary, ctx, setup.oracle, transcript, cfg.q)

    if cfg.mode == GameMode.QEX:
        ctx.phase = Phase.CHALLENGE
        transcript.challenge = adversary.select_challenge(ctx)
        ctx.challenge = transcript.challenge
    elif cfg.mode == GameMode.QUNI:
        ctx.phase = Phase.CHALLENGE
        transcript.challenge = _universal_challenge(setup, challenger_rng)
        adversary.receive_challenge(ctx, transcript.challenge)
        if cfg.aua_flag:
            ctx.phase = Phase.SECOND_LEARNING
            _learning_phase(adversary, ctx, setup.oracle, transcript, cfg.q)

    ctx.phase = Phase.GUESS
    forgery = adversary.guess(ctx)
    transcript.guess = forgery
    transcript.notes = dict(ctx.notes)
    transcript.private_snapshot = adversary.private_state()

    challenge = transcript.challenge
    if challenge is not None:
        if cfg.strong_flag and forgery is not None and forgery.randomness != challenge.randomness:
            challenge = type(challenge)(
                challenge.message if isinstance(challenge, ClassicalChallenge) else challenge.state,
                forgery.randomness,
            )
            transcript.challenge = challenge
        for record in transcript.queries:
            record.challenge_fidelity = challenge_fidelity(challenge, record, cfg.strong_flag)
    transcript.p_ov = _p_ov_for_trial(cfg, setup, transcript)

    if forgery is None:
        transcript.conclude(0, Reason.ABSTAINED)
    elif not _same_target(forgery, challenge):
        transcript.conclude(0, Reason.COMMITMENT_MISMATCH)
    else:
        if cfg.mode != GameMode.QUNI:
            transcript.mu_check = _mu_check(challenge, transcript.queries, cfg.mu, cfg.strong_flag)
        if transcript.mu_check is not None and not transcript.mu_check.passed:
            transcript.conclude(0, Reason.MU_VIOLATION)
        elif _verify_forgery(setup, challenge, forgery, cfg, verifier_seed, transcript):
            transcript.conclude(1, Reason.ACCEPTED)
        else:
            transcript.conclude(0, Reason.REJECTED)

    if not setup.quantum:
        transcript.extra_verdicts = [
            setup.verify(extra.message, extra.tag, extra.randomness) for extra in ctx.extra_forgeries
        ]
    logger.debug(f"Trial {trial}: verdict {transcript.verdict} ({transcript.reason.value})")
    return transcript


def check_capacity(cfg: GameConfig, adv: AdversaryStrategy) -> None:
    """Raise InvalidParameterError when adv cannot be simulated at cfg's widths."""
    if adv.qubits is not None:
        adv.check_capacity(PublicParameters.of(cfg.binding.setup(qstate.derive_seed(cfg.seed, 0))))


def estimate_win_rate(
    cfg: GameConfig,
    adv: AdversaryStrategy,
    trials: Optional[int] = None,
    workers: int = 1,
    collect: Optional[Callable[[GameTranscript], Dict[str, float]]] = None,
) -> ExperimentResult:
    """
    Run independent trials and aggregate wins, P_ov and collected metrics.

    Trial i uses derive_seed(cfg.seed, i), so serial and threaded runs give
    identical aggregates.
    """
    total = trials if trials is not None else cfg.trials
    if total < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {total}")
    check_capacity(cfg, adv)

    def play(index: int):
        transcript = run_game(cfg, adv, qstate.derive_seed(cfg.seed, index), index)
        metrics = collect(transcript) if collect else {}
        return transcript.verdict, transcript.p_ov, transcript.reason.value, metrics

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(play, range(total)))
    else:
        outcomes = [play(i) for i in range(total)]

    wins = sum(verdict for verdict, _, _, _ in outcomes)
    p_ov = float(np.mean([p for _, p, _, _ in outcomes]))
    reasons = Counter(reason for _, _, reason, _ in outcomes)
    sums: Dict[str, List[float]] = {}
    for _, _, _, metrics in outcomes:
        for key, value in metrics.items():
            if value is not None:
                sums.setdefault(key, []).append(float(value))
    metrics = {key: float(np.mean(values)) for key, values in sums.items()}

    result = ExperimentResult.from_counts(total, wins, p_ov, cfg.seed, dict(reasons), metrics)
    logger.info(
        f"{adv.name}: {wins}/{total} wins, P_ov={p_ov:.4f}, advantage={result.advantage:+.4f}"
    )
    return result


@dataclass
class BlindForgeOutcome:
    verdict: int
    reason: Reason
    forgery: Optional[ClassicalForgery]
    blinded: Optional[bool]
    blinding_size: int
    tag_valid: Optional[bool] = None


def run_blindforge(
    binding: GameBinding, epsilon: float, adv: AdversaryStrategy, seed: int, q: int = 1
) -> BlindForgeOutcome:
    """
    BlindForge: keygen, blinding draw, queries to the blinded oracle, forgery.

    The adversary wins iff its tag verifies and its message lies in B_eps.
    """
    setup = binding.setup(qstate.derive_seed(seed, 0))
    if setup.quantum or setup.oracle.function is None:
        raise InvalidParameterError("BlindForge needs a deterministic classical MAC binding")
    blinding = generate_blinding(epsilon, setup.n_in, qstate.derive_seed(seed, 1))
    oracle = OracleInstance.blinded(setup.oracle.function, blinding)
    public = PublicParameters(
        quantum=False,
        n_in=setup.n_in,
        tag_bits=setup.tag_bits,
        randomness_bits=0,
        ancilla_bits=oracle.output_bits,
        dim=2**setup.n_in,
        query_registers=setup.query_registers,
        blinded=True,
    )
    adversary = adv.spawn()
    ctx = GameContext(None, q, 1.0, public, qstate.make_rng(qstate.derive_seed(seed, 2)))
    transcript = GameTranscript(0, None)
    _learning_phase(adversary, ctx, oracle, transcript, q)
    ctx.phase = Phase.GUESS
    forgery = adversary.guess(ctx)
    if forgery is None:
        return BlindForgeOutcome(0, Reason.ABSTAINED, None, None, len(blinding))
    inside = forgery.message in blinding
    accepted = setup.verify(forgery.message, forgery.tag, forgery.randomness)
    verdict = int(accepted and inside)
    reason = Reason.ACCEPTED if verdict else Reason.REJECTED
    return BlindForgeOutcome(verdict, reason, forgery, inside, len(blinding), bool(accepted))
