# QStateLibrary.py
import sys
from pathlib import Path

import numpy as np
from robot.api.deco import keyword
from scipy import stats

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from qunforge import qstate  # noqa: E402
from qunforge.qstate import DensityMatrix, StateVector  # noqa: E402
from qunforge.verifiers import fidelity_pair  # noqa: E402


class QStateLibrary:
    """
    Keywords over the statevector kernel: construction, fidelity, partial
    trace, measurement and Haar sampling
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.last_result = None

    @keyword
    def create_state_from_amplitudes(self, *amplitudes: float):
        """Build a state from real amplitudes without normalizing them"""
        state = StateVector.from_amplitudes([float(a) for a in amplitudes])
        self.last_result = {"dim": state.dim, "qubits": state.num_qubits}
        return state

    @keyword
    def create_basis_state(self, index: int, qubits: int):
        return qstate.basis_state(index, [("q", qubits)])

    @keyword
    def pure_pair_fidelity(self, value: float) -> float:
        """Fidelity of |0> with sqrt(F)|0> + sqrt(1-F)|1>"""
        psi, phi = fidelity_pair(value)
        result = qstate.fidelity(psi, phi)
        self.last_result = {"fidelity": result}
        return result

    @keyword
    def fidelity_with_maximally_mixed(self, qubits: int) -> float:
        psi = qstate.haar_random_state(2**qubits, 11, [("q", qubits)])
        return qstate.fidelity(psi, DensityMatrix.maximally_mixed([("q", qubits)]))

    @keyword
    def mixed_pair_fidelity(self, qubits: int, seed: int) -> float:
        """Uhlmann fidelity of a mixed state with itself, computed through the eigh path"""
        joint = qstate.haar_random_state(2 ** (2 * qubits), seed, [("a", qubits), ("b", qubits)])
        rho = qstate.partial_trace(joint, "a")
        return qstate.fidelity(rho, rho)

    @keyword
    def mixed_against_pure_fidelity_gap(self, qubits: int, seed: int) -> float:
        """|Uhlmann(rho, |psi><psi|) - <psi|rho|psi>| for a random rho and psi"""
        joint = qstate.haar_random_state(2 ** (2 * qubits), seed, [("a", qubits), ("b", qubits)])
        rho = qstate.partial_trace(joint, "a")
        psi = qstate.haar_random_state(2**qubits, seed + 1, [("a", qubits)])
        shortcut = qstate.fidelity(psi, rho)
        general = qstate.fidelity(psi.density(), rho)
        return abs(shortcut - general)

    @keyword
    def bell_state_reduced_purity(self) -> float:
        bell = StateVector.from_amplitudes([1, 0, 0, 1], [("a", 1), ("b", 1)], normalize=True)
        rho = qstate.partial_trace(bell, "b").entries
        return float(np.real(np.trace(rho @ rho)))

    @keyword
    def partial_trace_of_product_recovers_factor(self, seed: int) -> float:
        """Largest entry gap between Tr_b(|a><a| x |b><b|) and |a><a|"""
        a = qstate.haar_random_state(4, seed, [("a", 2)])
        b = qstate.haar_random_state(2, seed + 1, [("b", 1)])
        reduced = qstate.partial_trace(qstate.tensor(a, b), "a").entries
        return float(np.max(np.abs(reduced - a.density().entries)))

    @keyword
    def born_distribution_total(self, dim: int, seed: int) -> float:
        state = qstate.haar_random_state(dim, seed)
        return float(qstate.born_distribution(state, qstate.DEFAULT_REGISTER).sum())

    @keyword
    def measure_uniform_state(self, qubits: int, seed: int) -> str:
        state = StateVector.from_amplitudes(np.ones(2**qubits), [("q", qubits)], normalize=True)
        result = qstate.measure_computational(state, "q", seed)
        self.last_result = {"outcome": result.outcome, "probability": result.probability}
        return result.outcome

    @keyword
    def measurement_uniformity_p_value(self, qubits: int, shots: int, seed: int) -> float:
        """Chi-square p-value of measurement counts on the uniform superposition"""
        dim = 2**qubits
        state = StateVector.from_amplitudes(np.ones(dim), [("q", qubits)], normalize=True)
        rng = qstate.make_rng(seed)
        counts = np.zeros(dim, dtype=np.int64)
        for _ in range(shots):
            counts[qstate.measure_computational(state, "q", rng).value] += 1
        p_value = float(stats.chisquare(counts).pvalue)
        self.last_result = {"counts": counts.tolist(), "p_value": p_value}
        return p_value

    @keyword
    def collapsed_state_matches_outcome(self, seed: int) -> bool:
        """Measuring one register of a Haar state leaves that register in the observed basis state"""
        state = qstate.haar_random_state(8, seed, [("a", 1), ("b", 2)])
        result = qstate.measure_computational(state, "b", seed)
        weights = qstate.born_distribution(result.state, "b")
        return bool(abs(weights[result.value] - 1.0) < qstate.TOLERANCE)

    @keyword
    def measure_plus_state_in_pm_basis(self, seed: int) -> str:
        plus = StateVector.from_amplitudes([1, 1], [("q", 1)], normalize=True)
        result = qstate.measure_pm_basis(plus, "q", seed)
        self.last_result = {"outcome": result.outcome, "probability": result.probability}
        return result.outcome

    @keyword
    def swap_basis_registers(self, first: int, second: int) -> int:
        """Index of |first>|second> after swapping two 2-qubit registers"""
        state = qstate.register_basis_state({"a": first, "b": second}, [("a", 2), ("b", 2)])
        swapped = qstate.swap_registers(state, "a", "b")
        return int(np.argmax(np.abs(swapped.amplitudes)))

    @keyword
    def cnot_output_index(self, control: int, target: int) -> int:
        state = qstate.register_basis_state({"c": control, "t": target}, [("c", 1), ("t", 1)])
        out = qstate.apply_cnot(state, ("c", 0), ("t", 0))
        return int(np.argmax(np.abs(out.amplitudes)))

    @keyword
    def reflection_flips_axis(self, seed: int) -> float:
        """<phi|R_phi|phi>, which is -1 for the reflection I - 2|phi><phi|"""
        phi = qstate.haar_random_state(4, seed)
        reflected = qstate.apply_reflection(phi, phi, qstate.DEFAULT_REGISTER)
        return float(np.real(phi.inner(reflected)))

    @keyword
    def householder_maps_to_zero(self, seed: int) -> float:
        """|<0|H_v|phi>| for the Householder axis of a random phi"""
        phi = qstate.haar_random_state(8, seed)
        axis = qstate.householder_to_zero(phi)
        mapped = qstate.apply_reflection(phi, axis, qstate.DEFAULT_REGISTER)
        return float(abs(mapped.amplitudes[0]))

    @keyword
    def haar_unitary_deviation(self, dim: int, seed: int) -> float:
        """max |U^dagger U - I| for a sampled Haar unitary"""
        u = qstate.haar_random_unitary(dim, seed).entries
        return float(np.max(np.abs(u.conj().T @ u - np.eye(dim))))

    @keyword
    def haar_states_are_reproducible(self, dim: int, seed: int) -> bool:
        first = qstate.haar_random_state(dim, seed)
        second = qstate.haar_random_state(dim, seed)
        return bool(np.array_equal(first.amplitudes, second.amplitudes))

    @keyword
    def derived_seeds_differ(self, master: int) -> bool:
        seeds = {qstate.derive_seed(master, i) for i in range(100)}
        return len(seeds) == 100

    @keyword
    def states_are_mu_distinguishable(self, fidelity_value: float, mu: float) -> bool:
        psi, phi = fidelity_pair(fidelity_value)
        return qstate.mu_distinguishable(psi, phi, mu)

    @keyword
    def create_state_of_qubits(self, qubits: int):
        return qstate.basis_state(0, [("q", qubits)])
