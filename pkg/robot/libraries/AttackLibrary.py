# AttackLibrary.py
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np
from robot.api.deco import keyword

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from qunforge import attacks, qstate  # noqa: E402
from qunforge.experiments import example1_structure, thm5_structure  # noqa: E402
from qunforge.games import p_ov_classical  # noqa: E402
from qunforge.qstate import StateVector  # noqa: E402


class AttackLibrary:
    """
    Keywords for the emulator, the closed forms and the attack registry
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.last_result = None

    @keyword
    def stage1_circuit_matches_closed_form(self, dim: int, seed: int) -> float:
        """Largest amplitude gap between the stage-1 circuit and its term-by-term form"""
        phi1, phir, psi = (qstate.haar_random_state(dim, qstate.derive_seed(seed, j)) for j in range(3))
        circuit = attacks.qe_stage1_state(phi1, phir, psi).amplitudes
        closed = attacks.qe_stage1_closed_form(phi1, phir, psi)
        return float(np.max(np.abs(circuit - closed)))

    @keyword
    def thm5_root_gap(self, gamma: float) -> float:
        """|sqrt(P_s1) of the two-query structure - gamma^2 (1 + 4 (1 - gamma^2)^2)|"""
        circuit = math.sqrt(attacks.qe_stage1_success(*thm5_structure(gamma)))
        return abs(circuit - attacks.thm5_stage1_root(gamma))

    @keyword
    def example1_root_gap(self, gamma: float) -> float:
        circuit = math.sqrt(attacks.qe_stage1_success(*example1_structure(gamma)))
        return abs(circuit - attacks.example1_stage1_root(gamma))

    @keyword
    def emulation_slack(self, dim: int, seed: int) -> float:
        """Post-selected emulator fidelity minus sqrt(P_s1) on one random instance"""
        phi1, phir, psi = (qstate.haar_random_state(dim, qstate.derive_seed(seed, j)) for j in range(3))
        unitary = qstate.haar_random_unitary(dim, qstate.derive_seed(seed, 3))
        result = attacks.qe_one_block_emulator(
            (phi1, unitary.apply_to(phi1)), (phir, unitary.apply_to(phir)), psi, qstate.derive_seed(seed, 4)
        )
        root = math.sqrt(attacks.qe_stage1_success(phi1, phir, psi))
        fidelity = result.fidelity(unitary.apply_to(psi))
        self.last_result = {"fidelity": fidelity, "root": root, "success": result.success_probability}
        return fidelity - root

    @keyword
    def exact_emulation_fidelity(self, seed: int) -> float:
        """Unconditional emulator fidelity on the two-query structure at gamma = 1/sqrt(2)"""
        phi1, phir, psi = thm5_structure(1 / math.sqrt(2))
        unitary = qstate.haar_random_unitary(psi.dim, seed)
        result = attacks.qe_one_block_emulator(
            (phi1, unitary.apply_to(phi1)), (phir, unitary.apply_to(phir)), psi, seed
        )
        return result.unconditional_fidelity(unitary.apply_to(psi))

    @keyword
    def emulator_rejects_mismatched_dimensions(self):
        small = qstate.haar_random_state(2, 1)
        large = qstate.haar_random_state(4, 2)
        return attacks.qe_one_block_emulator((small, small), (small, small), large, 0)

    @keyword
    def thm5_advantage_identity_gap(self, mu: float) -> float:
        """|win(mu) - P_ov(2, mu) - mu (1 - mu)(4 mu - 1)|"""
        return abs(
            attacks.thm5_win_probability(mu) - p_ov_classical(2, mu) - attacks.thm5_advantage(mu)
        )

    @keyword
    def closed_form_value(self, name: str, argument: float) -> float:
        functions = {
            "thm5_stage1_root": attacks.thm5_stage1_root,
            "thm5_win_probability": attacks.thm5_win_probability,
            "thm5_advantage": attacks.thm5_advantage,
            "example1_stage1_root": attacks.example1_stage1_root,
            "example1_printed_curve": attacks.example1_printed_curve,
            "example1_printed_squared_curve": attacks.example1_printed_squared_curve,
            "example1_derived_advantage": attacks.example1_derived_advantage,
        }
        return float(functions[name](argument))

    @keyword
    def trivial_overlap_win(self, q: int, mu: float) -> float:
        return attacks.trivial_overlap_win_probability(q, mu)

    @keyword
    def reduced_fidelity_gap(self, dim: int, seed: int) -> float:
        """|explicit partial trace - closed form| for a Haar challenge"""
        psi = qstate.haar_random_state(dim, seed)
        return abs(
            attacks.reduced_challenge_fidelity(psi) - attacks.reduced_challenge_fidelity_closed_form(psi)
        )

    @keyword
    def uniform_reduced_fidelities(self, dim: int):
        """Explicit and published reduced fidelity on the uniform state"""
        uniform = StateVector.from_amplitudes(np.ones(dim), normalize=True)
        self.last_result = {
            "explicit": attacks.reduced_challenge_fidelity(uniform),
            "printed": attacks.printed_reduced_challenge_fidelity(uniform),
        }
        return self.last_result

    @keyword
    def registered_attacks(self):
        return list(attacks.attack_ids())

    @keyword
    def build_registered_attack(self, attack_id: str):
        strategy = attacks.build_attack(attack_id)
        self.last_result = {"name": strategy.name, "params": dict(strategy.params)}
        return strategy.name

    @keyword
    def bound_gamma_for(self, mu: float, gamma: Optional[float] = None) -> float:
        """gamma an emulation adversary uses in a game with parameter mu"""
        return attacks.QEAttackParams(gamma=gamma).bound_gamma(mu)
