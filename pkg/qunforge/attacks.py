"""
Concrete adversaries against the unforgeability games, the one-block quantum
emulator they rely on, and closed forms for their success probabilities.

Register conventions follow the oracles: classical queries are
[message | ancilla]; the emulator adds a one-qubit control "qe_anc" and a
held register "qe_held" carrying the consumed reference output.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from qunforge import qstate
from qunforge.errors import DimensionMismatchError, InvalidParameterError
from qunforge.games import (
    Adversary,
    AdversaryStrategy,
    ClassicalChallenge,
    ClassicalForgery,
    GameContext,
    Phase,
    PublicParameters,
    QuantumChallenge,
    QuantumForgery,
)
from qunforge.oracles import ANCILLA_REGISTER, MESSAGE_REGISTER, decode_blinded_output
from qunforge.qstate import StateVector

logger = logging.getLogger(__name__)

QE_ANCILLA = "qe_anc"
QE_HELD = "qe_held"
QE_MAIN = "qe_main"
AUA_LOCAL = "adv_local"

THM5_STRUCTURE = "thm5"
EXAMPLE1_STRUCTURE = "example1"


def classical_query(amplitudes: Dict[int, complex], n_in: int, ancilla_bits: int) -> StateVector:
    """sum_m a_m |m, 0...0> on [message | ancilla]."""
    width = 2**ancilla_bits
    vec = np.zeros(2**n_in * width, dtype=np.complex128)
    for message, amplitude in amplitudes.items():
        vec[message * width] = amplitude
    return StateVector.from_amplitudes(
        vec, [(MESSAGE_REGISTER, n_in), (ANCILLA_REGISTER, ancilla_bits)], normalize=True
    )


def _measure_query(out: StateVector, ctx: GameContext) -> Tuple[int, int]:
    value = qstate.measure_computational(out, (MESSAGE_REGISTER, ANCILLA_REGISTER), ctx.rng).value
    return divmod(value, 2**ctx.public.ancilla_bits)


def _split_output(value: int, ctx: GameContext) -> Tuple[int, Optional[int]]:
    """Ancilla value -> (tag, randomness) for tag||r answers."""
    extra = ctx.public.ancilla_bits - ctx.public.tag_bits
    if extra > 0 and not ctx.public.blinded:
        return value >> extra, value & ((1 << extra) - 1)
    return value, None


def _distinct_messages(ctx: GameContext, count: int) -> list:
    space = 2**ctx.public.n_in
    if space < count:
        raise InvalidParameterError(f"Need {count} distinct messages, message space has {space}")
    return [int(m) for m in ctx.rng.permutation(space)[:count]]


# One-block emulator ---------------------------------------------------------


def _check_dims(*states: StateVector):
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Emulator inputs have differing dimensions {sorted(dims)}")


def _stage1(state, phi1, phir, main, ancilla):
    state = qstate.apply_unitary(state, qstate.HADAMARD, ancilla)
    state = qstate.apply_reflection(state, phir, main, controls={ancilla: 1})
    state = qstate.apply_unitary(state, qstate.PAULI_Z, ancilla)
    state = qstate.apply_unitary(state, qstate.HADAMARD, ancilla)
    return qstate.apply_reflection(state, phi1, main, controls={ancilla: 1})


def _stage1_inverse(state, phi1, phir, main, ancilla):
    state = qstate.apply_reflection(state, phi1, main, controls={ancilla: 1})
    state = qstate.apply_unitary(state, qstate.HADAMARD, ancilla)
    state = qstate.apply_reflection(state, phir, main, controls={ancilla: 1})
    state = qstate.apply_unitary(state, qstate.PAULI_Z, ancilla)
    return qstate.apply_unitary(state, qstate.HADAMARD, ancilla)


def qe_stage1_state(phi1: StateVector, phir: StateVector, psi: StateVector) -> StateVector:
    """
    Stage-1 isometry of the emulator on |psi>|0>.

    H on the control, reflection about phi_r on the |1> branch with a phase
    flip, H again, then reflection about phi_1 on the |1> branch. The |0>
    branch carries the phi_r component of psi.
    """
    _check_dims(phi1, phir, psi)
    main = psi.relabel([(QE_MAIN, psi.num_qubits)])
    joint = qstate.tensor(main, qstate.basis_state(0, [(QE_ANCILLA, 1)]))
    return _stage1(joint, phi1.amplitudes, phir.amplitudes, QE_MAIN, QE_ANCILLA)


def qe_stage1_closed_form(phi1: StateVector, phir: StateVector, psi: StateVector) -> np.ndarray:
    """Stage-1 amplitudes written out term by term, layout [main | control]."""
    _check_dims(phi1, phir, psi)
    a, b, c = phi1.amplitudes, phir.amplitudes, psi.amplitudes
    on_ref = np.vdot(b, c)
    on_sample = np.vdot(a, c)
    zero = on_ref * b
    one = c - on_ref * b - 2 * on_sample * a + 2 * on_ref * np.vdot(a, b) * a
    return np.column_stack([zero, one]).reshape(-1)


def qe_stage1_success(phi1: StateVector, phir: StateVector, psi: StateVector) -> float:
    """P_s1 = <phi_r| Tr_control |chi><chi| |phi_r>^2."""
    reduced = qstate.partial_trace(qe_stage1_state(phi1, phir, psi), QE_MAIN)
    weight = float(np.vdot(phir.amplitudes, reduced.entries @ phir.amplitudes).real)
    return weight**2


@dataclass(eq=False)
class EmulationResult:
    output: StateVector
    post_select_success: bool
    success_probability: float
    global_state: StateVector
    main_registers: Tuple[str, ...]
    held_register: str

    def postselected_output(self) -> Optional[StateVector]:
        """Main and control registers conditioned on the held register landing on phi_r."""
        try:
            state, _ = qstate.project_register(
                self.global_state, self.held_register, _zero(self.global_state, self.held_register)
            )
        except InvalidParameterError:
            return None
        return state

    def fidelity(self, target: StateVector) -> float:
        """Fidelity of the post-selected main register with target (0 if success is impossible)."""
        state = self.postselected_output()
        if state is None:
            return 0.0
        return qstate.subsystem_fidelity(state, target.amplitudes, self.main_registers)

    def unconditional_fidelity(self, target: StateVector) -> float:
        return qstate.subsystem_fidelity(self.global_state, target.amplitudes, self.main_registers)


def _zero(state: StateVector, register: str) -> np.ndarray:
    vec = np.zeros(state.register(register).dim, dtype=np.complex128)
    vec[0] = 1.0
    return vec


def _swap_blocks(state: StateVector, main: Tuple[str, ...], held: str, dim: int) -> StateVector:
    def swap(block):
        rest = block.shape[1]
        return block.reshape(dim, dim, rest).transpose(1, 0, 2).reshape(dim * dim, rest)

    return StateVector(qstate.transform_block(state, main + (held,), swap), state.layout)


def qe_one_block_emulator(
    samples: Tuple[StateVector, StateVector],
    reference: Tuple[StateVector, StateVector],
    psi: StateVector,
    rng_seed: qstate.SeedLike,
) -> EmulationResult:
    """
    Emulate U|psi> from one sample pair (phi_1, U phi_1) and one reference
    pair (phi_r, U phi_r).

    The held U|phi_r> is swapped into the main register after stage 1 and
    is consumed; the inverse block uses reflections about U phi_1 and
    U phi_r; finally the held register is measured in a basis containing
    phi_r and success means that outcome.
    """
    phi1, u_phi1 = samples
    phir, u_phir = reference
    _check_dims(phi1, u_phi1, phir, u_phir, psi)

    joint = qstate.tensor(
        qstate.tensor(psi, qstate.basis_state(0, [(QE_ANCILLA, 1)])),
        u_phir.relabel([(QE_HELD, psi.num_qubits)]),
    )
    names = joint.register_names
    main, ancilla, held = names[: len(psi.layout)], names[-2], names[-1]

    state = _stage1(joint, phi1.amplitudes, phir.amplitudes, main, ancilla)
    state = _swap_blocks(state, main, held, psi.dim)
    state = _stage1_inverse(state, u_phi1.amplitudes, u_phir.amplitudes, main, ancilla)
    axis = qstate.householder_to_zero(phir.amplitudes)
    if axis is not None:
        state = qstate.apply_reflection(state, axis, held)

    success_probability = float(qstate.born_distribution(state, held)[0])
    measured = qstate.measure_computational(state, held, rng_seed)
    outcome = np.zeros(psi.dim, dtype=np.complex128)
    outcome[measured.value] = 1.0
    output, _ = qstate.project_register(measured.state, held, outcome)
    logger.debug(
        f"Emulation block: success probability {success_probability:.6f}, outcome {measured.value}"
    )
    return EmulationResult(output, measured.value == 0, success_probability, state, main, held)


# Closed forms -----------------------------------------------------------------


def thm5_stage1_root(gamma: float) -> float:
    """sqrt(P_s1) for the two-query structure: gamma^2 (1 + 4 (1 - gamma^2)^2)."""
    g2 = gamma**2
    return g2 * (1 + 4 * (1 - g2) ** 2)


def thm5_win_probability(mu: float) -> float:
    return thm5_stage1_root(math.sqrt(1 - mu))


def thm5_advantage(mu: float) -> float:
    """mu (1 - mu)(4 mu - 1): win probability minus P_ov(2, mu)."""
    return mu * (1 - mu) * (4 * mu - 1)


def example1_stage1_root(gamma: float) -> float:
    """Per-target sqrt(P_s1) with <phi_r|phi_1> = sqrt(1 - 2 gamma^2)."""
    g2 = gamma**2
    return g2 * (1 + 4 * (1 - 2 * g2) ** 2)


def example1_printed_curve(gamma: float) -> float:
    g2 = gamma**2
    return g2 * (2 - 5 * g2 + 3 * g2**2)


def example1_printed_squared_curve(gamma: float) -> float:
    return example1_stage1_root(gamma) ** 2 - (1 - (1 - gamma**2) ** 3)


def example1_derived_advantage(gamma: float) -> float:
    """Per-target emulation weight minus the three-query overlap probability."""
    return example1_stage1_root(gamma) - (1 - (1 - gamma**2) ** 3)


def trivial_overlap_win_probability(q: int, mu: float) -> float:
    return 1.0 - mu**q


# Entanglement fidelity of the challenge ------------------------------------------


def _entangle_first_qubit(psi: StateVector) -> StateVector:
    challenge = psi.relabel([(MESSAGE_REGISTER, psi.num_qubits)])
    joint = qstate.tensor(challenge, qstate.basis_state(0, [(AUA_LOCAL, 1)]))
    return qstate.apply_cnot(joint, (MESSAGE_REGISTER, 0), (AUA_LOCAL, 0))


def reduced_challenge_fidelity(psi: StateVector) -> float:
    """F(psi, Tr_local CNOT(psi (x) |0>)) by explicit partial trace."""
    reduced = qstate.partial_trace(_entangle_first_qubit(psi), MESSAGE_REGISTER)
    return qstate.fidelity(psi.relabel([(MESSAGE_REGISTER, psi.num_qubits)]), reduced)


def _half_weights(psi: StateVector) -> Tuple[np.ndarray, float, float]:
    weights = np.abs(psi.amplitudes) ** 2
    half = psi.dim // 2
    return weights, float(weights[:half].sum()), float(weights[half:].sum())


def reduced_challenge_fidelity_closed_form(psi: StateVector) -> float:
    """(sum of |a_i|^2 over the low half)^2 + (same over the high half)^2."""
    _, low, high = _half_weights(psi)
    return low**2 + high**2


def printed_reduced_challenge_fidelity(psi: StateVector) -> float:
    """sum |a_i|^4 + sum_{i < D/2 <= j} 2 |a_i a_j|^2, the published expression."""
    weights, low, high = _half_weights(psi)
    return float(np.sum(weights**2)) + 2 * low * high


# Adversaries ----------------------------------------------------------------


class SuperpositionMeasureAdversary(Adversary):
    """One uniform-superposition query, then measure and forge what collapsed."""

    def __init__(self):
        self.sent = False
        self.forgery: Optional[ClassicalForgery] = None

    def next_query(self, ctx):
        if self.sent:
            return None
        self.sent = True
        n = ctx.public.n_in
        amplitude = 1 / math.sqrt(2**n)
        return classical_query({m: amplitude for m in range(2**n)}, n, ctx.public.ancilla_bits)

    def select_challenge(self, ctx):
        message, value = _measure_query(ctx.outputs[-1], ctx)
        tag, randomness = _split_output(value, ctx)
        self.forgery = ClassicalForgery(message, tag, randomness)
        ctx.notes["measured_message"] = message
        return ClassicalChallenge(message)

    def guess(self, ctx):
        return self.forgery


class TrivialOverlapAdversary(Adversary):
    """q queries sqrt(mu)|m'> + sqrt(1-mu)|m*>; wins if any measurement lands on m*."""

    def __init__(self, q: Optional[int] = None, mu: Optional[float] = None):
        self.q = q
        self.mu = mu
        self.target: Optional[int] = None
        self.helper: Optional[int] = None
        self.issued = 0
        self.measured = 0
        self.hit: Optional[int] = None

    def select_challenge(self, ctx):
        self.target, self.helper = _distinct_messages(ctx, 2)
        return ClassicalChallenge(self.target)

    def _harvest(self, ctx):
        while self.measured < len(ctx.outputs):
            message, value = _measure_query(ctx.outputs[self.measured], ctx)
            self.measured += 1
            if message == self.target and self.hit is None:
                self.hit = value

    def next_query(self, ctx):
        if self.target is None:
            raise InvalidParameterError("The trivial-overlap adversary plays the selective game")
        self._harvest(ctx)
        limit = self.q if self.q is not None else ctx.q
        if self.issued >= limit:
            return None
        self.issued += 1
        mu = self.mu if self.mu is not None else ctx.mu
        return classical_query(
            {self.helper: math.sqrt(mu), self.target: math.sqrt(1 - mu)},
            ctx.public.n_in,
            ctx.public.ancilla_bits,
        )

    def guess(self, ctx):
        self._harvest(ctx)
        ctx.notes["collapsed_on_target"] = self.hit is not None
        if self.hit is None:
            return None
        tag, randomness = _split_output(self.hit, ctx)
        return ClassicalForgery(self.target, tag, randomness)


@dataclass(frozen=True)
class QEAttackParams:
    """
    Query structure for the emulation attack.

    thm5: phi_1 = |m'>, phi_r = sqrt(1 - g^2)|m'> + g|m>.
    example1: phi_1 = |m1>, phi_r = d|m1> + g|m2> + g|m3>, d = sqrt(1 - 2 g^2).
    gamma None means gamma = sqrt(1 - mu) once bound to a game.
    """

    gamma: Optional[float] = None
    structure: str = THM5_STRUCTURE
    m: Optional[int] = None
    m_prime: Optional[int] = None

    def __post_init__(self):
        if self.structure not in (THM5_STRUCTURE, EXAMPLE1_STRUCTURE):
            raise InvalidParameterError(f"Unknown query structure '{self.structure}'")
        if self.gamma is not None:
            limit = 1.0 if self.structure == THM5_STRUCTURE else 1 / math.sqrt(2)
            lower_ok = self.gamma >= 0 if self.structure == THM5_STRUCTURE else self.gamma > 0
            if not lower_ok or self.gamma > limit + qstate.TOLERANCE:
                raise InvalidParameterError(
                    f"gamma={self.gamma} outside the range of the {self.structure} structure"
                )

    def bound_gamma(self, mu: float) -> float:
        """gamma for a game with parameter mu; must not exceed sqrt(1 - mu)."""
        gamma_max = math.sqrt(1 - mu)
        if self.gamma is None:
            return gamma_max
        if self.gamma > gamma_max + qstate.TOLERANCE:
            raise InvalidParameterError(f"gamma={self.gamma} exceeds sqrt(1 - mu)={gamma_max}")
        return self.gamma


class QSelEmulationAdversary(Adversary):
    """Commit m, query phi_1 and phi_r, emulate the oracle on |m, 0>, measure, forge."""

    def __init__(self, params: QEAttackParams):
        self.params = params
        self.queries: list = []
        self.target: Optional[int] = None
        self.psi: Optional[StateVector] = None

    def select_challenge(self, ctx):
        gamma = self.params.bound_gamma(ctx.mu)
        ctx.notes["mu_in_effective_range"] = 0.25 < ctx.mu < 1.0
        if self.params.m is not None and self.params.m_prime is not None:
            self.target, helper = self.params.m, self.params.m_prime
        else:
            self.target, helper = _distinct_messages(ctx, 2)
        n, width = ctx.public.n_in, ctx.public.ancilla_bits
        self.queries = [
            classical_query({helper: 1.0}, n, width),
            classical_query({helper: math.sqrt(1 - gamma**2), self.target: gamma}, n, width),
        ]
        self.psi = classical_query({self.target: 1.0}, n, width)
        return ClassicalChallenge(self.target)

    def next_query(self, ctx):
        if ctx.queries_used >= len(self.queries):
            return None
        return self.queries[ctx.queries_used]

    def guess(self, ctx):
        result = qe_one_block_emulator(
            (self.queries[0], ctx.outputs[0]), (self.queries[1], ctx.outputs[1]), self.psi, ctx.rng
        )
        ctx.notes["post_select_success"] = result.post_select_success
        message, value = _measure_query(result.output, ctx)
        if message != self.target:
            return None
        tag, randomness = _split_output(value, ctx)
        return ClassicalForgery(self.target, tag, randomness)


class DoubleEmulationAdversary(Adversary):
    """Three queries (phi_1 and two copies of phi_r) feeding two emulations, for m2 and m3."""

    def __init__(self, gamma: float):
        QEAttackParams(gamma=gamma, structure=EXAMPLE1_STRUCTURE)
        self.gamma = gamma
        self.queries: list = []

    def select_challenge(self, ctx):
        self.m1, self.m2, self.m3 = _distinct_messages(ctx, 3)
        n, width = ctx.public.n_in, ctx.public.ancilla_bits
        delta = math.sqrt(max(1 - 2 * self.gamma**2, 0.0))
        phir = classical_query({self.m1: delta, self.m2: self.gamma, self.m3: self.gamma}, n, width)
        self.queries = [classical_query({self.m1: 1.0}, n, width), phir, phir]
        self.targets = {
            self.m2: classical_query({self.m2: 1.0}, n, width),
            self.m3: classical_query({self.m3: 1.0}, n, width),
        }
        return ClassicalChallenge(self.m2)

    def next_query(self, ctx):
        if ctx.queries_used >= len(self.queries):
            return None
        return self.queries[ctx.queries_used]

    def _emulate(self, ctx, message: int, copy: int, label: str) -> Optional[ClassicalForgery]:
        result = qe_one_block_emulator(
            (self.queries[0], ctx.outputs[0]),
            (self.queries[copy], ctx.outputs[copy]),
            self.targets[message],
            ctx.rng,
        )
        ctx.notes[f"post_select_success_{label}"] = result.post_select_success
        measured, value = _measure_query(result.output, ctx)
        if measured != message:
            return None
        tag, randomness = _split_output(value, ctx)
        return ClassicalForgery(message, tag, randomness)

    def guess(self, ctx):
        first = self._emulate(ctx, self.m2, 1, "first")
        second = self._emulate(ctx, self.m3, 2, "second")
        ctx.notes["second_abstained"] = second is None
        if second is not None:
            ctx.extra_forgeries.append(second)
        return first


class EntanglementAdversary(Adversary):
    """
    Adaptive-universal attack: entangle the challenge's first qubit with a
    local qubit, query the oracle on the challenge part, measure the local
    qubit in the +/- basis.

    "post-selected" abstains on the - branch; "literal" applies Z to the
    first output qubit there.
    """

    VARIANTS = ("post-selected", "literal")

    def __init__(self, variant: str = "post-selected"):
        if variant not in self.VARIANTS:
            raise InvalidParameterError(f"Unknown variant '{variant}', expected one of {self.VARIANTS}")
        self.variant = variant
        self.challenge: Optional[StateVector] = None
        self.local: Optional[StateVector] = None
        self.sent = False

    def receive_challenge(self, ctx, challenge):
        super().receive_challenge(ctx, challenge)
        if not isinstance(challenge, QuantumChallenge):
            raise InvalidParameterError("The entanglement attack needs a quantum challenge")
        self.challenge = challenge.state

    def next_query(self, ctx):
        if ctx.phase != Phase.SECOND_LEARNING or self.sent:
            return None
        self.sent = True
        return _entangle_first_qubit(self.challenge)

    def guess(self, ctx):
        if not self.sent:
            return None
        result = qstate.measure_pm_basis(ctx.outputs[-1], AUA_LOCAL, ctx.rng)
        plus = result.outcome == "+"
        ctx.notes["plus_branch"] = plus
        sign = 1.0 if plus else -1.0
        local = np.array([1.0, sign], dtype=np.complex128) / math.sqrt(2)
        self.local = StateVector.from_amplitudes(local, [(AUA_LOCAL, 1)])
        residual, _ = qstate.project_register(result.state, AUA_LOCAL, local)
        if not plus:
            if self.variant == "post-selected":
                return None
            residual = qstate.apply_single_qubit_gate(residual, qstate.PAULI_Z, MESSAGE_REGISTER, 0)
        return QuantumForgery(self.challenge, residual)

    def private_state(self) -> Optional[StateVector]:
        """The local qubit after its +/- measurement."""
        return self.local


class RandomGuessAdversary(Adversary):
    """No queries; random message (unless given a challenge) and random tag."""

    def select_challenge(self, ctx):
        return ClassicalChallenge(int(ctx.rng.integers(0, 2**ctx.public.n_in)))

    def guess(self, ctx):
        tag = int(ctx.rng.integers(0, 2**ctx.public.tag_bits))
        randomness = None
        if ctx.public.randomness_bits:
            randomness = int(ctx.rng.integers(0, 2**ctx.public.randomness_bits))
        return ClassicalForgery(ctx.challenge.message, tag, randomness)


class QueryReplayAdversary(Adversary):
    """Query |m, 0> classically and replay the answer as the forgery for m."""

    def __init__(self, message: Optional[int] = None):
        self.message = message
        self.sent = False

    def _message(self, ctx) -> int:
        if self.message is None:
            self.message = int(ctx.rng.integers(0, 2**ctx.public.n_in))
        return self.message

    def select_challenge(self, ctx):
        return ClassicalChallenge(self._message(ctx))

    def next_query(self, ctx):
        if self.sent:
            return None
        self.sent = True
        return classical_query({self._message(ctx): 1.0}, ctx.public.n_in, ctx.public.ancilla_bits)

    def guess(self, ctx):
        if not ctx.outputs:
            return None
        _, value = _measure_query(ctx.outputs[0], ctx)
        if ctx.public.blinded:
            tag = decode_blinded_output(value, ctx.public.tag_bits)
            ctx.notes["answered_bottom"] = tag is None
            if tag is None:
                tag = int(ctx.rng.integers(0, 2**ctx.public.tag_bits))
            return ClassicalForgery(self.message, tag)
        tag, randomness = _split_output(value, ctx)
        return ClassicalForgery(self.message, tag, randomness)


# Strategy factories -----------------------------------------------------------


def emulation_qubits(public: PublicParameters) -> int:
    """Main register, one ancilla and the held reference output."""
    return 2 * public.query_qubits + 1


def superposition_measure_attack() -> AdversaryStrategy:
    return AdversaryStrategy("thm4-superposition", SuperpositionMeasureAdversary)


def trivial_overlap_attack(q: Optional[int] = None, mu: Optional[float] = None) -> AdversaryStrategy:
    return AdversaryStrategy(
        "trivial-overlap", lambda: TrivialOverlapAdversary(q, mu), {"q": q, "mu": mu}
    )


def qsel_qea_attack(params: Optional[QEAttackParams] = None) -> AdversaryStrategy:
    params = params or QEAttackParams()
    if params.structure != THM5_STRUCTURE:
        raise InvalidParameterError("qsel_qea_attack uses the two-query structure")
    return AdversaryStrategy(
        "thm5-qea",
        lambda: QSelEmulationAdversary(params),
        {"gamma": params.gamma},
        qubits=emulation_qubits,
    )


def example1_double_emulation(gamma: float) -> AdversaryStrategy:
    QEAttackParams(gamma=gamma, structure=EXAMPLE1_STRUCTURE)
    return AdversaryStrategy(
        "example1-double-qea",
        lambda: DoubleEmulationAdversary(gamma),
        {"gamma": gamma},
        qubits=emulation_qubits,
    )


def aua_entanglement_attack(variant: str = "post-selected") -> AdversaryStrategy:
    EntanglementAdversary(variant)
    return AdversaryStrategy(
        "aua-entangle",
        lambda: EntanglementAdversary(variant),
        {"variant": variant},
        qubits=lambda public: public.query_qubits + 1,
    )


def random_guess_attack() -> AdversaryStrategy:
    return AdversaryStrategy("random-guess", RandomGuessAdversary)


def query_replay_attack(message: Optional[int] = None) -> AdversaryStrategy:
    return AdversaryStrategy(
        "query-replay", lambda: QueryReplayAdversary(message), {"message": message}
    )


def _qea_from_params(gamma: Optional[float] = None, m: Optional[int] = None, m_prime: Optional[int] = None):
    return qsel_qea_attack(QEAttackParams(gamma=gamma, m=m, m_prime=m_prime))


ATTACKS: Dict[str, Callable[..., AdversaryStrategy]] = {
    "thm4-superposition": superposition_measure_attack,
    "thm5-qea": _qea_from_params,
    "example1-double-qea": example1_double_emulation,
    "aua-entangle": aua_entanglement_attack,
    "trivial-overlap": trivial_overlap_attack,
    "random-guess": random_guess_attack,
    "query-replay": query_replay_attack,
}


def build_attack(attack_id: str, **params) -> AdversaryStrategy:
    """Strategy registered under attack_id, built with the manifest's attack parameters."""
    if attack_id not in ATTACKS:
        raise InvalidParameterError(f"Unknown attack '{attack_id}'; known: {sorted(ATTACKS)}")
    return ATTACKS[attack_id](**params)


def attack_ids() -> Sequence[str]:
    return sorted(ATTACKS)
