"""
Desk-scale primitives: keyed function and unitary families standing in for
qPRFs and PRUs, the deterministic MAC, both randomized constructions, the game
bindings that wrap them, and the collision probes.
"""

import functools
import logging
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from qunforge import qstate, verifiers
from qunforge.errors import DimensionMismatchError, InvalidParameterError, ManifestError
from qunforge.oracles import (
    ANCILLA_REGISTER,
    MESSAGE_REGISTER,
    RECORD_REGISTER,
    ClassicalFunctionTable,
    ControlledGateFamily,
    OracleInstance,
)
from qunforge.qstate import DensityMatrix, StateVector, UnitaryMatrix
from qunforge.verifiers import TestConfig

logger = logging.getLogger(__name__)

DEFAULT_KEY_BITS = 16
TABLE_CACHE_SIZE = 256


def _check_width(value: Optional[int], bits: int, label: str):
    if value is None or not 0 <= int(value) < 2**bits:
        raise DimensionMismatchError(f"{label}={value} does not fit in {bits} bits")


class FunctionFamilyKind(Enum):
    SEEDED_TABLE = "seeded-table"
    CONSTANT = "constant"


class KeyedFunctionFamily:
    """
    k -> F_k as a lazily built table per key.

    Tables are derived from (seed, key) so the same key always yields the same
    function. The most recently used TABLE_CACHE_SIZE tables are kept.
    """

    def __init__(
        self,
        key_bits: int,
        n_in: int,
        m_out: int,
        seed: int = 0,
        kind: FunctionFamilyKind = FunctionFamilyKind.SEEDED_TABLE,
    ):
        if min(key_bits, n_in, m_out) < 1:
            raise InvalidParameterError(
                f"Family widths must be positive: key={key_bits}, n={n_in}, m={m_out}"
            )
        self.key_bits = key_bits
        self.n_in = n_in
        self.m_out = m_out
        self.seed = seed
        self.kind = kind
        self._tables = functools.lru_cache(maxsize=TABLE_CACHE_SIZE)(self._build)

    def __call__(self, key: int) -> ClassicalFunctionTable:
        _check_width(key, self.key_bits, "key")
        return self._tables(int(key))

    @property
    def cached_tables(self) -> int:
        return self._tables.cache_info().currsize

    def _build(self, key: int) -> ClassicalFunctionTable:
        if self.kind == FunctionFamilyKind.CONSTANT:
            return ClassicalFunctionTable.constant(self.n_in, self.m_out, 0)
        return ClassicalFunctionTable.random(
            self.n_in, self.m_out, qstate.derive_seed(self.seed, key)
        )

    def evaluate(self, key: int, x: int) -> int:
        return self(key)(x)

    def descriptor(self) -> Dict:
        return {
            "kind": self.kind.value,
            "n": self.n_in,
            "m": self.m_out,
            "l": self.key_bits,
            "seed": self.seed,
        }


class DeterministicMAC:
    """Tag = F_k(m); no randomness."""

    def __init__(self, family: KeyedFunctionFamily):
        self.family = family

    randomness_bits = 0

    @property
    def tag_bits(self) -> int:
        return self.family.m_out

    def keygen(self, seed: qstate.SeedLike) -> int:
        return int(qstate.make_rng(seed).integers(0, 2**self.family.key_bits))

    def evaluate(self, key: int, message: int) -> int:
        _check_width(message, self.family.n_in, "message")
        return self.family.evaluate(key, message)

    def verify(self, key: int, message: int, tag: int, randomness: Optional[int] = None) -> bool:
        _check_width(message, self.family.n_in, "message")
        _check_width(tag, self.family.m_out, "tag")
        return self.family.evaluate(key, message) == int(tag)

    def oracle(self, key: int) -> OracleInstance:
        return OracleInstance.standard(self.family(key))


class RandMAC:
    """
    Randomized MAC: tag = F(k XOR r, m) || r with fresh r and l = key_bits.

    The oracle binding draws one r per query and uses it for every branch of
    a superposed query.
    """

    def __init__(self, family: KeyedFunctionFamily):
        self.family = family

    @property
    def randomness_bits(self) -> int:
        return self.family.key_bits

    @property
    def tag_bits(self) -> int:
        return self.family.m_out

    @property
    def output_bits(self) -> int:
        return self.family.m_out + self.randomness_bits

    def keygen(self, seed: qstate.SeedLike) -> int:
        return construction1_keygen(self.family, seed)

    def evaluate(self, key: int, message: int, rng: qstate.SeedLike) -> Tuple[int, int]:
        return construction1_eval(self.family, key, message, rng)

    def verify(self, key: int, message: int, tag: int, randomness: Optional[int]) -> bool:
        return construction1_verify(self.family, key, message, tag, randomness)

    def oracle(self, key: int, seed: int, return_randomness: bool = True) -> OracleInstance:
        family = self.family
        return OracleInstance.randomized_standard(
            lambda r: family(key ^ r),
            n_in=family.n_in,
            m_out=family.m_out,
            randomness_bits=self.randomness_bits,
            seed=seed,
            return_randomness=return_randomness,
        )


def construction1_keygen(family: KeyedFunctionFamily, seed: qstate.SeedLike) -> int:
    """Key drawn uniformly from {0,1}^l."""
    return int(qstate.make_rng(seed).integers(0, 2**family.key_bits))


def construction1_eval(
    family: KeyedFunctionFamily, k: int, m: int, rng: qstate.SeedLike
) -> Tuple[int, int]:
    _check_width(k, family.key_bits, "key")
    _check_width(m, family.n_in, "message")
    r = int(qstate.make_rng(rng).integers(0, 2**family.key_bits))
    return family.evaluate(k ^ r, m), r


def construction1_verify(
    family: KeyedFunctionFamily, k: int, m: int, t: int, r: Optional[int]
) -> bool:
    _check_width(k, family.key_bits, "key")
    _check_width(m, family.n_in, "message")
    _check_width(t, family.m_out, "tag")
    _check_width(r, family.key_bits, "randomness")
    return family.evaluate(k ^ r, m) == int(t)


class UnitaryFamilyKind(Enum):
    HAAR = "haar"
    CONTROLLED_GATES = "controlled-gates"


class KeyedUnitaryFamily:
    """r -> U_r of dimension dim, memoized; Haar draws or the controlled-gate circuit."""

    def __init__(
        self,
        index_bits: int,
        dim: int,
        seed: int = 0,
        kind: UnitaryFamilyKind = UnitaryFamilyKind.HAAR,
    ):
        if index_bits < 1:
            raise InvalidParameterError(f"index_bits must be positive, got {index_bits}")
        if dim < 2 or dim & (dim - 1):
            raise InvalidParameterError(f"Unitary dimension must be a power of two, got {dim}")
        self.index_bits = index_bits
        self.dim = dim
        self.seed = seed
        self.kind = kind
        self._circuit = None
        if kind == UnitaryFamilyKind.CONTROLLED_GATES:
            self._circuit = ControlledGateFamily.sample(
                message_qubits=dim.bit_length() - 1, randomness_bits=index_bits, seed=seed
            )
        self._unitaries: Dict[int, UnitaryMatrix] = {}
        self._lock = threading.Lock()

    def __call__(self, r: int) -> UnitaryMatrix:
        _check_width(r, self.index_bits, "index")
        unitary = self._unitaries.get(r)
        if unitary is None:
            with self._lock:
                unitary = self._unitaries.get(r)
                if unitary is None:
                    if self._circuit is not None:
                        unitary = self._circuit.unitary(r)
                    else:
                        unitary = qstate.haar_random_unitary(
                            self.dim, qstate.derive_seed(self.seed, r)
                        )
                    self._unitaries[r] = unitary
        return unitary

    def descriptor(self) -> Dict:
        return {"kind": self.kind.value, "dim": self.dim, "l": self.index_bits, "seed": self.seed}


@dataclass
class RandQuantumPrimitive:
    """Randomized quantum primitive: U(r)|psi> for fresh r, checked by a state test."""

    family: KeyedUnitaryFamily
    verifier: TestConfig = field(default_factory=TestConfig)
    delta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise InvalidParameterError(f"delta must lie in [0, 1], got {self.delta}")

    @property
    def dim(self) -> int:
        return self.family.dim

    @property
    def randomness_bits(self) -> int:
        return self.family.index_bits

    @property
    def secure_mu_threshold(self) -> float:
        """Games with mu at or above 1 - delta^2 are covered by the security statement."""
        return 1.0 - self.delta**2


def construction2_oracle(prim: RandQuantumPrimitive, seed: int = 0) -> OracleInstance:
    return OracleInstance.randomized_unitary(prim.family, prim.randomness_bits, seed)


def construction2_verify(
    prim: RandQuantumPrimitive,
    m_desc: Union[StateVector, Sequence],
    r: Optional[int],
    tag_state: Union[StateVector, DensityMatrix],
    rng_seed: qstate.SeedLike = None,
) -> bool:
    """
    Prepare U(r)|psi_m> from the description and test it against the tag.

    Tags whose fidelity reaches the accept floor pass outright; all others go
    through the configured test.
    """
    psi = m_desc if isinstance(m_desc, StateVector) else StateVector.from_description(m_desc)
    if psi.dim != prim.dim:
        raise DimensionMismatchError(
            f"Challenge description has dim {psi.dim}, primitive expects {prim.dim}"
        )
    _check_width(r, prim.randomness_bits, "randomness")
    expected = prim.family(r).apply_to(psi)
    if qstate.fidelity(tag_state, expected) >= prim.verifier.accept_floor:
        return True
    return verifiers.make_test(prim.verifier).run(tag_state, expected, rng_seed)


# Game bindings --------------------------------------------------------------


@dataclass
class ClassicalSetup:
    """One trial's secret key, oracle and verifier for a classical primitive."""

    key: int
    oracle: OracleInstance
    mac: verifiers.ClassicalPrimitive
    n_in: int
    tag_bits: int
    randomness_bits: int

    quantum = False
    query_registers = (MESSAGE_REGISTER, ANCILLA_REGISTER)

    @property
    def ancilla_bits(self) -> int:
        return self.oracle.output_bits

    def verify(self, message: int, tag: int, randomness: Optional[int]) -> bool:
        return verifiers.classical_verify(self.key, message, tag, randomness, self.mac)


@dataclass
class QuantumSetup:
    """One trial's oracle and reference unitaries for a quantum primitive."""

    oracle: OracleInstance
    dim: int
    randomness_bits: int
    unitary_for: Callable[[Optional[int]], UnitaryMatrix]
    verify_tag: Callable[[StateVector, Optional[int], object, TestConfig, int], bool]

    quantum = True

    @property
    def message_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def query_registers(self) -> Tuple[str, ...]:
        if self.randomness_bits:
            return (RECORD_REGISTER, MESSAGE_REGISTER)
        return (MESSAGE_REGISTER,)

    def expected_output(self, psi: StateVector, randomness: Optional[int] = None) -> StateVector:
        return self.unitary_for(randomness).apply_to(psi)


class GameBinding(ABC):
    """Builds a fresh per-trial setup (keygen plus oracle) from a seed."""

    primitive = "binding"
    quantum = False
    security_param: Optional[int] = None

    @abstractmethod
    def setup(self, seed: int):
        ...

    @abstractmethod
    def _descriptor(self) -> Dict:
        ...

    def descriptor(self) -> Dict:
        desc = self._descriptor()
        if self.security_param is not None:
            desc["security_param"] = self.security_param
        return desc


class DeterministicMACBinding(GameBinding):
    primitive = "deterministic-mac"

    def __init__(self, family: KeyedFunctionFamily):
        self.family = family
        self.mac = DeterministicMAC(family)

    def setup(self, seed: int) -> ClassicalSetup:
        key = self.mac.keygen(qstate.derive_seed(seed, 0))
        return ClassicalSetup(key, self.mac.oracle(key), self.mac, self.family.n_in, self.family.m_out, 0)

    def _descriptor(self) -> Dict:
        return {"primitive": self.primitive, **self.family.descriptor()}


class Construction1Binding(GameBinding):
    primitive = "construction1"

    def __init__(self, family: KeyedFunctionFamily, return_randomness: bool = True):
        self.family = family
        self.mac = RandMAC(family)
        self.return_randomness = return_randomness

    def setup(self, seed: int) -> ClassicalSetup:
        key = self.mac.keygen(qstate.derive_seed(seed, 0))
        oracle = self.mac.oracle(key, qstate.derive_seed(seed, 1), self.return_randomness)
        return ClassicalSetup(
            key, oracle, self.mac, self.family.n_in, self.family.m_out, self.mac.randomness_bits
        )

    def _descriptor(self) -> Dict:
        return {"primitive": self.primitive, **self.family.descriptor()}


class HaarUnitaryBinding(GameBinding):
    """Deterministic quantum primitive: one Haar U_E per trial behind a minimal oracle."""

    primitive = "haar-unitary"
    quantum = True

    def __init__(self, dim: int):
        if dim < 2 or dim & (dim - 1):
            raise InvalidParameterError(f"Unitary dimension must be a power of two, got {dim}")
        self.dim = dim

    def setup(self, seed: int) -> QuantumSetup:
        unitary = qstate.haar_random_unitary(self.dim, qstate.derive_seed(seed, 0))

        def verify_tag(psi, randomness, tag_state, cfg, rng_seed):
            expected = unitary.apply_to(psi)
            return verifiers.make_test(cfg).run(tag_state, expected, rng_seed)

        return QuantumSetup(OracleInstance.minimal(unitary), self.dim, 0, lambda r: unitary, verify_tag)

    def _descriptor(self) -> Dict:
        return {"primitive": self.primitive, "dim": self.dim}


class Construction2Binding(GameBinding):
    """Randomized quantum primitive with a fresh family key per trial."""

    primitive = "construction2"
    quantum = True

    def __init__(
        self,
        index_bits: int,
        dim: int,
        family_kind: UnitaryFamilyKind = UnitaryFamilyKind.HAAR,
        verifier: Optional[TestConfig] = None,
        delta: float = 0.0,
    ):
        self.index_bits = index_bits
        self.dim = dim
        self.family_kind = family_kind
        self.verifier = verifier or TestConfig()
        self.delta = delta

    def build_primitive(self, seed: int) -> RandQuantumPrimitive:
        family = KeyedUnitaryFamily(self.index_bits, self.dim, seed, self.family_kind)
        return RandQuantumPrimitive(family, self.verifier, self.delta)

    def setup(self, seed: int) -> QuantumSetup:
        prim = self.build_primitive(qstate.derive_seed(seed, 0))

        def unitary_for(randomness):
            if randomness is None:
                raise InvalidParameterError("Construction 2 needs the randomness to fix U(r)")
            return prim.family(randomness)

        def verify_tag(psi, randomness, tag_state, cfg, rng_seed):
            if randomness is None or not 0 <= randomness < 2**prim.randomness_bits:
                return False
            return construction2_verify(prim, psi, randomness, tag_state, rng_seed)

        oracle = construction2_oracle(prim, qstate.derive_seed(seed, 1))
        return QuantumSetup(oracle, self.dim, self.index_bits, unitary_for, verify_tag)

    def _descriptor(self) -> Dict:
        return {
            "primitive": self.primitive,
            "kind": self.family_kind.value,
            "dim": self.dim,
            "l": self.index_bits,
            "delta": self.delta,
            "verifier": self.verifier.to_dict(),
        }


def widths_for_security_param(security_param: int) -> Dict[str, int]:
    """Widths at security parameter lambda: n = m = l = lambda and dim = 2^lambda."""
    if security_param < 1:
        raise InvalidParameterError(f"security_param must be >= 1, got {security_param}")
    return {"n": security_param, "m": security_param, "l": security_param, "dim": 2**security_param}


def _build_binding(kind: Optional[str], desc: Dict) -> Optional[GameBinding]:
    if kind in (DeterministicMACBinding.primitive, Construction1Binding.primitive):
        family = KeyedFunctionFamily(
            key_bits=int(desc.get("l", DEFAULT_KEY_BITS)),
            n_in=int(desc["n"]),
            m_out=int(desc["m"]),
            seed=int(desc.get("seed", 0)),
            kind=FunctionFamilyKind(desc.get("kind", FunctionFamilyKind.SEEDED_TABLE.value)),
        )
        if kind == DeterministicMACBinding.primitive:
            return DeterministicMACBinding(family)
        return Construction1Binding(family, bool(desc.get("return_randomness", True)))
    if kind == HaarUnitaryBinding.primitive:
        return HaarUnitaryBinding(int(desc["dim"]))
    if kind == Construction2Binding.primitive:
        return Construction2Binding(
            index_bits=int(desc["l"]),
            dim=int(desc["dim"]),
            family_kind=UnitaryFamilyKind(desc.get("kind", UnitaryFamilyKind.HAAR.value)),
            verifier=TestConfig.from_dict(desc.get("verifier", {})),
            delta=float(desc.get("delta", 0.0)),
        )
    return None


def binding_from_descriptor(desc: Dict) -> GameBinding:
    """
    Build a game binding from its JSON descriptor.

    A security_param fills in every width the descriptor leaves out.
    """
    kind = desc.get("primitive")
    security_param = desc.get("security_param")
    try:
        fields = dict(desc)
        if security_param is not None:
            security_param = int(security_param)
            fields = {**widths_for_security_param(security_param), **desc}
        binding = _build_binding(kind, fields)
    except (KeyError, ValueError) as e:
        raise ManifestError(f"Invalid primitive descriptor {desc}: {e}")
    if binding is None:
        raise ManifestError(f"Unknown primitive kind: {kind}")
    binding.security_param = security_param
    return binding


# Collision probes -----------------------------------------------------------


@dataclass
class CollisionReport:
    trials: int
    n_in: int
    m_out: int
    per_x_rate: float
    any_collision_rate: float
    mean_collision_fraction: float
    max_collision_count: int
    expected_rate: float
    sigma: float
    flagged: bool

    def to_dict(self) -> Dict:
        return asdict(self)


def _per_x_sigma(m_out: int, samples: int) -> float:
    p = 2.0**-m_out
    return math.sqrt(p * (1 - p) / samples)


def inter_function_independence_probe(
    family: KeyedFunctionFamily, trials: int, seed: qstate.SeedLike
) -> CollisionReport:
    """
    Scan every x for random distinct key pairs (k, k') and count F(k, x) = F(k', x).

    The family is flagged when its per-x collision rate exceeds the
    random-function rate 2^-m by more than three standard deviations.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    rng = qstate.make_rng(seed)
    keys = 2**family.key_bits
    counts = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        k = int(rng.integers(0, keys))
        other = int(rng.integers(0, keys - 1))
        if other >= k:
            other += 1
        counts[i] = int(np.count_nonzero(family(k).table == family(other).table))
    domain = 2**family.n_in
    per_x = float(counts.sum() / (trials * domain))
    expected = 2.0**-family.m_out
    sigma = _per_x_sigma(family.m_out, trials * domain)
    report = CollisionReport(
        trials=trials,
        n_in=family.n_in,
        m_out=family.m_out,
        per_x_rate=per_x,
        any_collision_rate=float(np.mean(counts > 0)),
        mean_collision_fraction=float(np.mean(counts / domain)),
        max_collision_count=int(counts.max()),
        expected_rate=expected,
        sigma=sigma,
        flagged=per_x > expected + 3 * sigma,
    )
    if report.flagged:
        logger.warning(
            f"Family {family.kind.value} collides on {per_x:.4f} of inputs, expected {expected:.4f}"
        )
    return report


def random_function_collision_rate(
    n: int, m: int, trials: int, seed: int, second_seed: Optional[int] = None
) -> float:
    """Empirical Pr[f(x) = g(x)] for independent uniformly random tables f, g."""
    if min(n, m, trials) < 1:
        raise InvalidParameterError(f"n, m and trials must be positive, got {n}, {m}, {trials}")
    f = qstate.make_rng(seed).integers(0, 2**m, size=(trials, 2**n))
    other = second_seed if second_seed is not None else qstate.derive_seed(seed, 1)
    g = qstate.make_rng(other).integers(0, 2**m, size=(trials, 2**n))
    return float(np.mean(f == g))


def random_function_collision_sigma(n: int, m: int, trials: int) -> float:
    """Standard deviation of the per-x rate over trials * 2^n comparisons."""
    return _per_x_sigma(m, trials * 2**n)
