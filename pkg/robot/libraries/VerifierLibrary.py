# VerifierLibrary.py
import sys
from pathlib import Path

import numpy as np
from robot.api.deco import keyword

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from qunforge import qstate, verifiers  # noqa: E402
from qunforge.primitives import DeterministicMAC, KeyedFunctionFamily  # noqa: E402
from qunforge.qstate import DensityMatrix  # noqa: E402
from qunforge.verifiers import TestConfig, TestKind  # noqa: E402


class VerifierLibrary:
    """
    Keywords for tag verification and the quantum state-equality tests
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.last_result = None
        self.last_contract = None

    @keyword
    def swap_circuit_acceptance(self, fidelity_value: float) -> float:
        """Born weight of the SWAP-test ancilla outcome 0 for a pair at fidelity F"""
        psi, phi = verifiers.fidelity_pair(fidelity_value)
        return verifiers.swap_test_acceptance_probability(psi, phi)

    @keyword
    def swap_closed_form_acceptance(self, fidelity_value: float) -> float:
        psi, phi = verifiers.fidelity_pair(fidelity_value)
        return verifiers.swap_acceptance_probability(psi.density(), phi)

    @keyword
    def sampled_swap_acceptance(self, fidelity_value: float, kappa: int, trials: int, seed: int) -> float:
        psi, phi = verifiers.fidelity_pair(fidelity_value)
        accepted = verifiers.sample_swap_tests(psi, phi, kappa, trials, seed)
        self.last_result = {"accepted": int(accepted.sum()), "trials": trials}
        return float(np.mean(accepted))

    @keyword
    def swap_test_rounds_passed(self, fidelity_value: float, kappa: int, seed: int) -> int:
        psi, phi = verifiers.fidelity_pair(fidelity_value)
        result = verifiers.swap_test(psi, phi, kappa, seed)
        self.last_result = {"accept": result.accept, "pass_count": result.pass_count}
        return result.pass_count

    @keyword
    def test_acceptance_probability(self, kind: str, kappa: int, fidelity_value: float) -> float:
        """f(kappa, kappa, F) of the configured test"""
        test = verifiers.make_test(TestConfig(kind=TestKind(kind), kappa1=kappa, kappa2=kappa))
        psi, phi = verifiers.fidelity_pair(fidelity_value)
        return test.acceptance_probability(psi, phi)

    @keyword
    def ideal_test_acceptance_rate(self, fidelity_value: float, trials: int, seed: int) -> float:
        psi, phi = verifiers.fidelity_pair(fidelity_value)
        rng = qstate.make_rng(seed)
        cfg = TestConfig()
        return float(np.mean([verifiers.ideal_fidelity_test(psi, phi, cfg, rng) for _ in range(trials)]))

    @keyword
    def mixed_swap_acceptance(self, qubits: int) -> float:
        """Closed-form SWAP acceptance of two maximally mixed states: (1 + 1/D) / 2"""
        mixed = DensityMatrix.maximally_mixed([("q", qubits)])
        return verifiers.swap_acceptance_probability(mixed, mixed)

    @keyword
    def run_contract_check(self, kind: str):
        report = verifiers.test_contract_check(
            TestKind(kind), [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0], [1, 2, 4, 8]
        )
        self.last_contract = report
        self.last_result = {
            "test": report.test,
            "errors": dict(report.errors),
            "monotone": report.monotone,
            "violations": list(report.violations),
        }
        return report.satisfies_limits

    @keyword
    def contract_check_with_kappas(self, kind: str, *kappas: int) -> bool:
        report = verifiers.test_contract_check(TestKind(kind), [0.0, 0.5, 1.0], [int(k) for k in kappas])
        self.last_contract = report
        return report.satisfies_limits

    @keyword
    def contract_error_at(self, kappa: int) -> float:
        """Err(kappa) of the last contract check"""
        if self.last_contract is None:
            raise AssertionError("No contract check has been performed yet")
        return self.last_contract.errors[kappa]

    @keyword
    def contract_is_monotone(self) -> bool:
        if self.last_contract is None:
            raise AssertionError("No contract check has been performed yet")
        return self.last_contract.monotone

    @keyword
    def create_test_config(self, kappa1: int, kappa2: int, kind: str = "ideal-fidelity"):
        return TestConfig(kind=TestKind(kind), kappa1=kappa1, kappa2=kappa2)

    @keyword
    def test_config_rounds(self, kappa1: int, kappa2: int) -> int:
        return TestConfig(kappa1=kappa1, kappa2=kappa2).rounds

    @keyword
    def honest_mac_tag_verifies(self, n: int, m: int, seed: int, message: int) -> bool:
        mac = DeterministicMAC(KeyedFunctionFamily(8, n, m, seed))
        key = mac.keygen(seed)
        return verifiers.classical_verify(key, message, mac.evaluate(key, message), None, mac)

    @keyword
    def altered_mac_tag_verifies(self, n: int, m: int, seed: int, message: int) -> bool:
        """Verification of the honest tag with its lowest bit flipped"""
        mac = DeterministicMAC(KeyedFunctionFamily(8, n, m, seed))
        key = mac.keygen(seed)
        return verifiers.classical_verify(key, message, mac.evaluate(key, message) ^ 1, None, mac)
