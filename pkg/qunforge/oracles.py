"""
Quantum oracles: standard (XOR) access to classical functions, minimal unitary
access, randomized unitary access and the blinded oracle.

Query registers are addressed by name. Standard oracles act on
[message | ancilla]; the randomized unitary oracle acts on [record | message].
Any other register in the query state is left untouched, so adversaries can
keep private registers entangled with their queries.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from qunforge import qstate
from qunforge.errors import DimensionMismatchError, InvalidParameterError, OracleError
from qunforge.qstate import StateVector, UnitaryMatrix

logger = logging.getLogger(__name__)

MESSAGE_REGISTER = "message"
ANCILLA_REGISTER = "ancilla"
RECORD_REGISTER = "record"


@dataclass(frozen=True, eq=False)
class ClassicalFunctionTable:
    """f: {0,1}^n -> {0,1}^m stored as 2^n integers."""

    n_in: int
    m_out: int
    table: np.ndarray

    def __post_init__(self):
        if self.n_in < 1 or self.m_out < 1:
            raise InvalidParameterError(
                f"Function widths must be positive, got n={self.n_in}, m={self.m_out}"
            )
        values = np.array(self.table, dtype=np.int64).reshape(-1)
        if values.size != 2**self.n_in:
            raise InvalidParameterError(
                f"Table has {values.size} entries, expected 2^{self.n_in}"
            )
        if values.min() < 0 or values.max() >= 2**self.m_out:
            raise InvalidParameterError(f"Table entries must fit in {self.m_out} bits")
        values.setflags(write=False)
        object.__setattr__(self, "table", values)

    def __call__(self, x: int) -> int:
        if not 0 <= x < self.table.size:
            raise DimensionMismatchError(f"Input {x} outside {self.n_in}-bit domain")
        return int(self.table[x])

    @classmethod
    def random(cls, n_in: int, m_out: int, seed: qstate.SeedLike) -> "ClassicalFunctionTable":
        rng = qstate.make_rng(seed)
        return cls(n_in, m_out, rng.integers(0, 2**m_out, size=2**n_in))

    @classmethod
    def constant(cls, n_in: int, m_out: int, value: int = 0) -> "ClassicalFunctionTable":
        return cls(n_in, m_out, np.full(2**n_in, value, dtype=np.int64))

    @classmethod
    def from_hex(cls, text: str, n_in: int, m_out: int) -> "ClassicalFunctionTable":
        """Parse the table format: line k holds f(k) in hex; '#' starts a comment."""
        values = []
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(int(line, 16))
            except ValueError:
                raise InvalidParameterError(f"Line {line_number}: '{line}' is not hex")
        return cls(n_in, m_out, values)

    def to_hex(self) -> str:
        digits = math.ceil(self.m_out / 4)
        return "".join(f"{int(v):0{digits}x}\n" for v in self.table)

    @classmethod
    def load(cls, path: Union[str, Path], n_in: int, m_out: int) -> "ClassicalFunctionTable":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_hex(f.read(), n_in, m_out)

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_hex())


@dataclass(frozen=True)
class BlindingSet:
    """The blinded region B_eps of the message space."""

    epsilon: float
    n: int
    seed: int
    members: frozenset

    def __contains__(self, message: int) -> bool:
        return message in self.members

    def __len__(self) -> int:
        return len(self.members)

    def mask(self) -> np.ndarray:
        flags = np.zeros(2**self.n, dtype=bool)
        flags[list(self.members)] = True
        return flags

    def regenerate(self) -> "BlindingSet":
        return generate_blinding(self.epsilon, self.n, self.seed)


def generate_blinding(epsilon: float, n: int, seed: int) -> BlindingSet:
    """Each message joins B_eps independently with probability epsilon."""
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidParameterError(f"epsilon must lie in [0, 1], got {epsilon}")
    if n < 1:
        raise InvalidParameterError(f"Message width must be positive, got {n}")
    rng = qstate.make_rng(seed)
    flags = rng.random(2**n) < epsilon
    return BlindingSet(epsilon, n, seed, frozenset(np.flatnonzero(flags).tolist()))


class OracleKind(Enum):
    STANDARD_DETERMINISTIC = "standard-deterministic"
    STANDARD_RANDOMIZED = "standard-randomized"
    MINIMAL_UNITARY = "minimal-unitary"
    RANDOMIZED_UNITARY = "randomized-unitary"
    BLINDED = "blinded"


KeyedFunction = Callable[[int], ClassicalFunctionTable]
UnitaryFamily = Callable[[int], UnitaryMatrix]


class OracleInstance:
    """
    One oracle with its binding, internal randomness source and query counter.

    Randomized kinds draw a fresh r for every query from a counter-mode
    generator keyed by the oracle seed; r lives only in randomness_log and
    never in the returned state (except where the oracle records it in the
    ancilla on purpose).
    """

    def __init__(
        self,
        kind: OracleKind,
        seed: int = 0,
        function: Optional[ClassicalFunctionTable] = None,
        keyed_function: Optional[KeyedFunction] = None,
        unitary: Optional[UnitaryMatrix] = None,
        unitary_family: Optional[UnitaryFamily] = None,
        randomness_bits: int = 0,
        blinding: Optional[BlindingSet] = None,
        n_in: Optional[int] = None,
        m_out: Optional[int] = None,
        return_randomness: bool = True,
    ):
        self.kind = kind
        self.seed = seed
        self.function = function
        self.keyed_function = keyed_function
        self.unitary = unitary
        self.unitary_family = unitary_family
        self.randomness_bits = randomness_bits
        self.blinding = blinding
        self.return_randomness = return_randomness
        self.n_in = n_in if n_in is not None else (function.n_in if function else None)
        self.m_out = m_out if m_out is not None else (function.m_out if function else None)
        self.query_counter = 0
        self.randomness_log: List[int] = []
        self._validate()

    def _validate(self):
        required = {
            OracleKind.STANDARD_DETERMINISTIC: self.function,
            OracleKind.STANDARD_RANDOMIZED: self.keyed_function,
            OracleKind.MINIMAL_UNITARY: self.unitary,
            OracleKind.RANDOMIZED_UNITARY: self.unitary_family,
            OracleKind.BLINDED: self.blinding,
        }
        if required[self.kind] is None:
            raise OracleError(f"Oracle of kind {self.kind.value} is missing its binding")
        if self.kind == OracleKind.BLINDED and self.function is None:
            raise OracleError("Blinded oracle needs the underlying function")
        if self.kind in (OracleKind.STANDARD_RANDOMIZED, OracleKind.RANDOMIZED_UNITARY):
            if self.randomness_bits < 1:
                raise InvalidParameterError("Randomized oracles need at least one randomness bit")
        if self.kind == OracleKind.STANDARD_RANDOMIZED and (self.n_in is None or self.m_out is None):
            raise OracleError("Randomized standard oracle needs n_in and m_out")

    @classmethod
    def standard(cls, function: ClassicalFunctionTable) -> "OracleInstance":
        return cls(OracleKind.STANDARD_DETERMINISTIC, function=function)

    @classmethod
    def randomized_standard(
        cls,
        keyed_function: KeyedFunction,
        n_in: int,
        m_out: int,
        randomness_bits: int,
        seed: int,
        return_randomness: bool = True,
    ) -> "OracleInstance":
        return cls(
            OracleKind.STANDARD_RANDOMIZED,
            seed=seed,
            keyed_function=keyed_function,
            randomness_bits=randomness_bits,
            n_in=n_in,
            m_out=m_out,
            return_randomness=return_randomness,
        )

    @classmethod
    def minimal(cls, unitary: UnitaryMatrix) -> "OracleInstance":
        return cls(OracleKind.MINIMAL_UNITARY, unitary=unitary)

    @classmethod
    def randomized_unitary(
        cls, unitary_family: UnitaryFamily, randomness_bits: int, seed: int
    ) -> "OracleInstance":
        return cls(
            OracleKind.RANDOMIZED_UNITARY,
            seed=seed,
            unitary_family=unitary_family,
            randomness_bits=randomness_bits,
        )

    @classmethod
    def blinded(cls, function: ClassicalFunctionTable, blinding: BlindingSet) -> "OracleInstance":
        if blinding.n != function.n_in:
            raise DimensionMismatchError("Blinding set and function disagree on message width")
        return cls(OracleKind.BLINDED, function=function, blinding=blinding)

    @property
    def is_randomized(self) -> bool:
        return self.kind in (OracleKind.STANDARD_RANDOMIZED, OracleKind.RANDOMIZED_UNITARY)

    @property
    def output_bits(self) -> Optional[int]:
        """Width of the value XORed into the ancilla."""
        if self.kind == OracleKind.STANDARD_DETERMINISTIC:
            return self.m_out
        if self.kind == OracleKind.STANDARD_RANDOMIZED:
            return self.m_out + (self.randomness_bits if self.return_randomness else 0)
        if self.kind == OracleKind.BLINDED:
            return self.m_out + 1
        return None

    def draw_randomness(self) -> int:
        """r for the current query, fixed by (seed, query_counter)."""
        rng = np.random.default_rng(qstate.derive_seed(self.seed, self.query_counter))
        return int(rng.integers(0, 2**self.randomness_bits))

    def _record(self, r: Optional[int]):
        self.query_counter += 1
        if r is not None:
            self.randomness_log.append(r)

    def apply(self, q: StateVector) -> StateVector:
        """Dispatch one query to the operation matching this oracle's kind."""
        if self.kind in (OracleKind.STANDARD_DETERMINISTIC, OracleKind.STANDARD_RANDOMIZED):
            return standard_oracle_apply(self, q)
        if self.kind == OracleKind.MINIMAL_UNITARY:
            return minimal_oracle_apply(self, q)
        if self.kind == OracleKind.RANDOMIZED_UNITARY:
            return randomized_unitary_oracle_apply(self, q)
        return blinded_oracle_apply(self, q)

    @property
    def last_randomness(self) -> Optional[int]:
        return self.randomness_log[-1] if self.randomness_log else None


def _xor_into_ancilla(
    q: StateVector, outputs: np.ndarray, output_bits: int, message: str, ancilla: str
) -> StateVector:
    msg_reg = q.register(message)
    anc_reg = q.register(ancilla)
    if anc_reg.num_qubits < output_bits:
        raise OracleError(
            f"Ancilla of {anc_reg.num_qubits} qubits is too narrow for {output_bits} output bits"
        )
    if msg_reg.dim != outputs.size:
        raise DimensionMismatchError(
            f"Message register of dim {msg_reg.dim} does not match a {outputs.size}-entry table"
        )
    rows = np.arange(msg_reg.dim)[:, None]
    sources = np.arange(anc_reg.dim)[None, :] ^ outputs[:, None]

    def xor(block):
        cube = block.reshape(msg_reg.dim, anc_reg.dim, -1)
        return cube[rows, sources].reshape(block.shape)

    return StateVector(qstate.transform_block(q, (message, ancilla), xor), q.layout)


def standard_oracle_apply(
    o: OracleInstance,
    q: StateVector,
    message: str = MESSAGE_REGISTER,
    ancilla: str = ANCILLA_REGISTER,
) -> StateVector:
    """|m, y> -> |m, y XOR out(m)>, out(m) = f(m) or f(m; r)||r with one r per query."""
    if o.kind == OracleKind.STANDARD_DETERMINISTIC:
        result = _xor_into_ancilla(q, o.function.table, o.output_bits, message, ancilla)
        o._record(None)
        return result
    if o.kind != OracleKind.STANDARD_RANDOMIZED:
        raise OracleError(f"Standard oracle cannot serve kind {o.kind.value}")
    r = o.draw_randomness()
    table = o.keyed_function(r)
    outputs = table.table
    if o.return_randomness:
        outputs = (outputs << o.randomness_bits) | r
    result = _xor_into_ancilla(q, outputs, o.output_bits, message, ancilla)
    o._record(r)
    logger.debug(f"Randomized standard query {o.query_counter} drew r={r}")
    return result


def minimal_oracle_apply(
    o: OracleInstance, q: StateVector, target: Union[str, Sequence[str]] = MESSAGE_REGISTER
) -> StateVector:
    """U_E acting directly on the message register."""
    if o.kind != OracleKind.MINIMAL_UNITARY:
        raise OracleError(f"Minimal oracle cannot serve kind {o.kind.value}")
    result = qstate.apply_unitary(q, o.unitary, target)
    o._record(None)
    return result


def randomized_unitary_oracle_apply(
    o: OracleInstance,
    q: StateVector,
    record: str = RECORD_REGISTER,
    message: str = MESSAGE_REGISTER,
) -> StateVector:
    """|a> (x) |psi> -> |a XOR r> (x) U(r)|psi> for a fresh r."""
    if o.kind != OracleKind.RANDOMIZED_UNITARY:
        raise OracleError(f"Randomized unitary oracle cannot serve kind {o.kind.value}")
    if record not in q.register_names:
        raise OracleError(f"Query state has no '{record}' register for the randomness record")
    record_reg = q.register(record)
    if record_reg.num_qubits != o.randomness_bits:
        raise OracleError(
            f"Record register has {record_reg.num_qubits} qubits, oracle uses {o.randomness_bits}"
        )
    r = o.draw_randomness()
    sources = np.arange(record_reg.dim) ^ r
    recorded = StateVector(
        qstate.transform_block(q, record, lambda block: block[sources]), q.layout
    )
    result = qstate.apply_unitary(recorded, o.unitary_family(r), message)
    o._record(r)
    logger.debug(f"Randomized unitary query {o.query_counter} drew r={r}")
    return result


def blinded_oracle_apply(
    o: OracleInstance,
    q: StateVector,
    message: str = MESSAGE_REGISTER,
    ancilla: str = ANCILLA_REGISTER,
) -> StateVector:
    """
    Standard oracle that answers the blinded region with the bottom symbol.

    Outputs are m+1 bits wide: the leading flag bit is 1 for bottom (payload
    0^m) and 0 for a real value f(m).
    """
    if o.kind != OracleKind.BLINDED:
        raise OracleError(f"Blinded oracle cannot serve kind {o.kind.value}")
    bottom = 1 << o.m_out
    outputs = np.where(o.blinding.mask(), bottom, o.function.table)
    result = _xor_into_ancilla(q, outputs, o.output_bits, message, ancilla)
    o._record(None)
    return result


def decode_blinded_output(value: int, m_out: int) -> Optional[int]:
    """Inverse of the bottom encoding: None for bottom, else the payload."""
    if value >> m_out:
        return None
    return value


@dataclass(frozen=True, eq=False)
class ControlledGateFamily:
    """
    Keyed unitary family realized as a circuit: randomness bit j switches gate j.

    U(r) = G_{l-1}^{r_{l-1}} ... G_1^{r_1} G_0^{r_0}, bit 0 being the least
    significant bit of r.
    """

    gates: Tuple[UnitaryMatrix, ...]

    @classmethod
    def sample(
        cls, message_qubits: int = 2, randomness_bits: int = 3, seed: qstate.SeedLike = 0
    ) -> "ControlledGateFamily":
        """Gate j < message_qubits is a Haar single-qubit gate on qubit j; later gates act on all qubits."""
        rng = qstate.make_rng(seed)
        gates = []
        for j in range(randomness_bits):
            if j < message_qubits:
                local = qstate.haar_random_unitary(2, rng).entries
                before = np.eye(2**j)
                after = np.eye(2 ** (message_qubits - j - 1))
                gates.append(UnitaryMatrix(np.kron(np.kron(before, local), after)))
            else:
                gates.append(qstate.haar_random_unitary(2**message_qubits, rng))
        return cls(tuple(gates))

    @property
    def randomness_bits(self) -> int:
        return len(self.gates)

    @property
    def dim(self) -> int:
        return self.gates[0].dim

    def unitary(self, r: int) -> UnitaryMatrix:
        if not 0 <= r < 2**self.randomness_bits:
            raise DimensionMismatchError(f"r={r} outside {self.randomness_bits}-bit range")
        total = np.eye(self.dim, dtype=np.complex128)
        for j, gate in enumerate(self.gates):
            if (r >> j) & 1:
                total = gate.entries @ total
        return UnitaryMatrix(total)

    def circuit(self) -> UnitaryMatrix:
        """Full unitary on [record | message] built from one controlled gate per bit."""
        records = 2**self.randomness_bits
        identity = np.eye(self.dim, dtype=np.complex128)
        total = np.eye(records * self.dim, dtype=np.complex128)
        for j, gate in enumerate(self.gates):
            bit = (np.arange(records) >> j) & 1
            off = np.diag((bit == 0).astype(np.complex128))
            on = np.diag((bit == 1).astype(np.complex128))
            controlled = np.kron(off, identity) + np.kron(on, gate.entries)
            total = controlled @ total
        return UnitaryMatrix(total)

    def circuit_deviation(self) -> float:
        """Largest entry gap between each r-block of circuit() and unitary(r)."""
        full = self.circuit().entries
        worst = 0.0
        for r in range(2**self.randomness_bits):
            block = full[r * self.dim:(r + 1) * self.dim, r * self.dim:(r + 1) * self.dim]
            worst = max(worst, float(np.max(np.abs(block - self.unitary(r).entries))))
        return worst
