"""
Verification oracles: classical tag checks and quantum state-equality tests.

A quantum test accepts a pair of states with some probability f(kappa1,
kappa2, F). IdealFidelityTest accepts with probability exactly F and is the
verifier the game engine uses by default; SwapTest runs the SWAP-test
circuit kappa times and accepts only if every round passes.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Protocol, Sequence, Union

import numpy as np

from qunforge import qstate
from qunforge.errors import DimensionMismatchError, InvalidParameterError
from qunforge.qstate import DensityMatrix, StateVector

logger = logging.getLogger(__name__)

# Fidelity at or above which Construction 2 accepts a tag outright
CONSTRUCTION2_ACCEPT_FLOOR = 1 - 1e-6
# Largest |f - F| tolerated at the biggest kappa of a contract grid
LIMIT_TOLERANCE = 1e-6

SWAP_ANCILLA = "swap_anc"

StateLike = Union[StateVector, DensityMatrix]


class TestKind(Enum):
    IDEAL_FIDELITY = "ideal-fidelity"
    SWAP_TEST = "swap-test"


@dataclass(frozen=True)
class TestConfig:
    kind: TestKind = TestKind.IDEAL_FIDELITY
    kappa1: int = 1
    kappa2: int = 1
    accept_floor: float = CONSTRUCTION2_ACCEPT_FLOOR
    seed: int = 0

    def __post_init__(self):
        if self.kappa1 < 1 or self.kappa2 < 1:
            raise InvalidParameterError(
                f"Copy counts must be >= 1, got kappa1={self.kappa1}, kappa2={self.kappa2}"
            )
        if not 0.0 <= self.accept_floor <= 1.0:
            raise InvalidParameterError(f"accept_floor must lie in [0, 1], got {self.accept_floor}")

    @property
    def rounds(self) -> int:
        """Number of pairwise comparisons the copies allow."""
        return min(self.kappa1, self.kappa2)

    @classmethod
    def from_dict(cls, data: Dict) -> "TestConfig":
        return cls(
            kind=TestKind(data.get("kind", TestKind.IDEAL_FIDELITY.value)),
            kappa1=int(data.get("kappa1", 1)),
            kappa2=int(data.get("kappa2", 1)),
            accept_floor=float(data.get("accept_floor", CONSTRUCTION2_ACCEPT_FLOOR)),
            seed=int(data.get("seed", 0)),
        )

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data


class ClassicalPrimitive(Protocol):
    def verify(self, key: int, message: int, tag: int, randomness: Optional[int]) -> bool:
        ...


def classical_verify(
    k: int, m: int, t: int, r: Optional[int], prim: ClassicalPrimitive
) -> bool:
    """Ver(k, m, t, r): recompute the evaluation and compare with t."""
    return bool(prim.verify(k, m, t, r))


def ideal_fidelity_test(
    rho: StateLike, sigma: StateLike, cfg: TestConfig, rng_seed: qstate.SeedLike
) -> bool:
    """Accept with probability exactly F(rho, sigma), whatever the copy counts."""
    return bool(qstate.make_rng(rng_seed).random() < qstate.fidelity(rho, sigma))


def swap_test_circuit(psi: StateVector, phi: StateVector) -> StateVector:
    """State before measurement: H on the ancilla, controlled-SWAP, H again."""
    if psi.dim != phi.dim:
        raise DimensionMismatchError(f"SWAP test needs equal dimensions, got {psi.dim} and {phi.dim}")
    n = psi.num_qubits
    ancilla = qstate.basis_state(0, [(SWAP_ANCILLA, 1)])
    joint = qstate.tensor(
        ancilla,
        qstate.tensor(psi.relabel([("left", n)]), phi.relabel([("right", n)])),
    )
    joint = qstate.apply_unitary(joint, qstate.HADAMARD, SWAP_ANCILLA)
    joint = qstate.swap_registers(joint, "left", "right", controls={SWAP_ANCILLA: 1})
    return qstate.apply_unitary(joint, qstate.HADAMARD, SWAP_ANCILLA)


def swap_test_acceptance_probability(psi: StateVector, phi: StateVector) -> float:
    """Born weight of ancilla outcome 0 in the simulated circuit."""
    return float(qstate.born_distribution(swap_test_circuit(psi, phi), SWAP_ANCILLA)[0])


def swap_acceptance_probability(r1: StateLike, r2: StateLike) -> float:
    """Closed form (1 + Tr(r1 r2)) / 2, valid for mixed inputs too."""
    if r1.dim != r2.dim:
        raise DimensionMismatchError(f"Dimensions differ: {r1.dim} vs {r2.dim}")
    a = r1.density().entries if isinstance(r1, StateVector) else r1.entries
    b = r2.density().entries if isinstance(r2, StateVector) else r2.entries
    overlap = float(np.real(np.trace(a @ b)))
    return (1.0 + min(max(overlap, 0.0), 1.0)) / 2.0


@dataclass(frozen=True)
class SwapTestResult:
    accept: bool
    pass_count: int
    rounds: int


def swap_test(
    psi: StateVector, phi: StateVector, kappa: int, rng_seed: qstate.SeedLike
) -> SwapTestResult:
    """Run kappa SWAP-test rounds on fresh copies; accept iff all rounds pass."""
    if kappa < 1:
        raise InvalidParameterError(f"kappa must be >= 1, got {kappa}")
    rng = qstate.make_rng(rng_seed)
    circuit = swap_test_circuit(psi, phi)
    passes = 0
    for _ in range(kappa):
        if qstate.measure_computational(circuit, SWAP_ANCILLA, rng).value == 0:
            passes += 1
    return SwapTestResult(passes == kappa, passes, kappa)


def sample_swap_tests(
    psi: StateVector, phi: StateVector, kappa: int, trials: int, rng_seed: qstate.SeedLike
) -> np.ndarray:
    """Accept flags of many independent kappa-round SWAP tests, vectorised over trials."""
    p_pass = swap_test_acceptance_probability(psi, phi)
    rng = qstate.make_rng(rng_seed)
    return np.all(rng.random((trials, kappa)) < p_pass, axis=1)


class QuantumTest(ABC):
    """A state-equality test f(kappa1, kappa2, F)."""

    name = "test"

    def __init__(self, cfg: TestConfig):
        self.cfg = cfg

    @abstractmethod
    def acceptance_probability(self, rho: StateLike, sigma: StateLike) -> float:
        ...

    def run(self, rho: StateLike, sigma: StateLike, rng_seed: qstate.SeedLike) -> bool:
        return bool(qstate.make_rng(rng_seed).random() < self.acceptance_probability(rho, sigma))


class IdealFidelityTest(QuantumTest):
    name = TestKind.IDEAL_FIDELITY.value

    def acceptance_probability(self, rho: StateLike, sigma: StateLike) -> float:
        return qstate.fidelity(rho, sigma)

    def run(self, rho: StateLike, sigma: StateLike, rng_seed: qstate.SeedLike) -> bool:
        return ideal_fidelity_test(rho, sigma, self.cfg, rng_seed)


class SwapTest(QuantumTest):
    name = TestKind.SWAP_TEST.value

    def acceptance_probability(self, rho: StateLike, sigma: StateLike) -> float:
        if isinstance(rho, StateVector) and isinstance(sigma, StateVector):
            single = swap_test_acceptance_probability(rho, sigma)
        else:
            single = swap_acceptance_probability(rho, sigma)
        return single**self.cfg.rounds

    def run(self, rho: StateLike, sigma: StateLike, rng_seed: qstate.SeedLike) -> bool:
        if isinstance(rho, StateVector) and isinstance(sigma, StateVector):
            return swap_test(rho, sigma, self.cfg.rounds, rng_seed).accept
        return super().run(rho, sigma, rng_seed)


def make_test(cfg: TestConfig) -> QuantumTest:
    if cfg.kind == TestKind.SWAP_TEST:
        return SwapTest(cfg)
    return IdealFidelityTest(cfg)


def fidelity_pair(value: float) -> tuple:
    """Two qubit states |0> and sqrt(F)|0> + sqrt(1-F)|1> at fidelity F."""
    if not 0.0 <= value <= 1.0:
        raise InvalidParameterError(f"Fidelity must lie in [0, 1], got {value}")
    zero = qstate.basis_state(0, [("q", 1)])
    other = StateVector.from_amplitudes([math.sqrt(value), math.sqrt(1.0 - value)], [("q", 1)])
    return zero, other


@dataclass
class ContractReport:
    test: str
    rows: List[Dict[str, float]] = field(default_factory=list)
    errors: Dict[int, float] = field(default_factory=dict)
    monotone: bool = True
    violations: List[str] = field(default_factory=list)

    @property
    def satisfies_limits(self) -> bool:
        return not self.violations

    def acceptance(self, kappa: int, fidelity_value: float) -> float:
        for row in self.rows:
            if row["kappa"] == kappa and abs(row["fidelity"] - fidelity_value) < 1e-12:
                return row["acceptance"]
        raise KeyError(f"No grid point at kappa={kappa}, F={fidelity_value}")


def test_contract_check(
    test_kind: TestKind, fidelity_grid: Sequence[float], kappa_grid: Sequence[int]
) -> ContractReport:
    """
    Evaluate f(kappa, kappa, F) on a grid and check the three limit conditions.

    Limits checked: f = 1 at F = 1 for every kappa; f tends to F at the largest
    kappa; f at F = 0 defines Err(kappa).
    """
    kappas = sorted(set(int(k) for k in kappa_grid))
    if not kappas:
        raise InvalidParameterError("Contract check needs at least one kappa")
    if min(kappas) < 1:
        raise InvalidParameterError(f"kappa must be >= 1, got {kappas[0]}")
    report = ContractReport(test_kind.value)
    grid = sorted(set(float(f) for f in fidelity_grid) | {0.0, 1.0})
    for kappa in kappas:
        test = make_test(TestConfig(kind=test_kind, kappa1=kappa, kappa2=kappa))
        previous = -1.0
        for value in grid:
            psi, phi = fidelity_pair(value)
            accept = test.acceptance_probability(psi, phi)
            report.rows.append({"kappa": kappa, "fidelity": value, "acceptance": accept})
            if accept < previous - qstate.TOLERANCE:
                report.monotone = False
            previous = accept
        report.errors[kappa] = report.acceptance(kappa, 0.0)
        if abs(report.acceptance(kappa, 1.0) - 1.0) > qstate.TOLERANCE:
            report.violations.append(f"f(kappa={kappa}, F=1) != 1")

    largest = kappas[-1]
    gap = max(abs(report.acceptance(largest, value) - value) for value in grid)
    if gap > LIMIT_TOLERANCE:
        report.violations.append(
            f"f(kappa={largest}, F) differs from F by up to {gap:.6f}"
        )
    if not report.monotone:
        report.violations.append("f is not monotone in F")
    logger.info(
        f"Contract check for {test_kind.value}: {len(report.violations)} violation(s), "
        f"Err={report.errors}"
    )
    return report
