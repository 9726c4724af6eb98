# PrimitiveLibrary.py
import json
import sys
from pathlib import Path

import numpy as np
from robot.api.deco import keyword

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from qunforge import qstate  # noqa: E402
from qunforge.primitives import (  # noqa: E402
    FunctionFamilyKind,
    KeyedFunctionFamily,
    KeyedUnitaryFamily,
    RandMAC,
    RandQuantumPrimitive,
    UnitaryFamilyKind,
    binding_from_descriptor,
    construction1_eval,
    construction1_keygen,
    construction1_verify,
    construction2_oracle,
    construction2_verify,
    inter_function_independence_probe,
    random_function_collision_rate,
    random_function_collision_sigma,
)
from qunforge.oracles import MESSAGE_REGISTER, RECORD_REGISTER  # noqa: E402


class PrimitiveLibrary:
    """
    Keywords for the keyed families, both randomized constructions, game
    bindings and the collision probes
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.last_result = None

    @keyword
    def construction1_round_trip(self, n: int, m: int, key_bits: int, seed: int, messages: int = 8) -> bool:
        """Every honestly evaluated (tag, r) verifies"""
        family = KeyedFunctionFamily(key_bits, n, m, seed)
        key = construction1_keygen(family, seed)
        rng = qstate.make_rng(seed)
        for message in range(min(messages, 2**n)):
            tag, r = construction1_eval(family, key, message, rng)
            if not construction1_verify(family, key, message, tag, r):
                return False
        return True

    @keyword
    def construction1_rejects_altered_tag(self, n: int, m: int, key_bits: int, seed: int) -> bool:
        family = KeyedFunctionFamily(key_bits, n, m, seed)
        key = construction1_keygen(family, seed)
        tag, r = construction1_eval(family, key, 0, seed)
        return construction1_verify(family, key, 0, tag ^ 1, r)

    @keyword
    def construction1_verify_without_randomness(self, seed: int):
        family = KeyedFunctionFamily(3, 2, 2, seed)
        return construction1_verify(family, 0, 0, 0, None)

    @keyword
    def randomized_mac_output_bits(self, m: int, key_bits: int) -> int:
        return RandMAC(KeyedFunctionFamily(key_bits, 2, m, 0)).output_bits

    @keyword
    def family_tables_are_stable(self, key_bits: int, n: int, m: int, seed: int) -> bool:
        """The same key always yields the same table, also across family instances"""
        first = KeyedFunctionFamily(key_bits, n, m, seed)
        second = KeyedFunctionFamily(key_bits, n, m, seed)
        key = 2**key_bits - 1
        return bool(np.array_equal(first(key).table, second(key).table) and first(key) is first(key))

    @keyword
    def unitary_family_members_differ(self, index_bits: int, dim: int, seed: int, kind: str = "haar") -> bool:
        family = KeyedUnitaryFamily(index_bits, dim, seed, UnitaryFamilyKind(kind))
        first, second = family(0), family(1)
        self.last_result = {"descriptor": family.descriptor()}
        return bool(np.max(np.abs(first.entries - second.entries)) > 1e-6 and family(1) is second)

    @keyword
    def construction2_honest_tag_verifies(self, index_bits: int, dim: int, seed: int) -> bool:
        """Query the oracle on |0>_record |psi> and verify the answer against its recorded r"""
        prim = RandQuantumPrimitive(KeyedUnitaryFamily(index_bits, dim, seed))
        oracle = construction2_oracle(prim, seed)
        qubits = dim.bit_length() - 1
        psi = qstate.haar_random_state(dim, seed, [(MESSAGE_REGISTER, qubits)])
        query = qstate.tensor(qstate.basis_state(0, [(RECORD_REGISTER, index_bits)]), psi)
        answered = oracle.apply(query)
        r = oracle.last_randomness
        tag_state, _ = qstate.project_register(
            answered, RECORD_REGISTER, np.eye(2**index_bits, dtype=np.complex128)[r]
        )
        return construction2_verify(prim, psi, r, tag_state, seed)

    @keyword
    def construction2_orthogonal_tag_rate(self, dim: int, trials: int, seed: int) -> float:
        """Acceptance rate of a tag orthogonal to U(r)|psi> under the ideal test"""
        prim = RandQuantumPrimitive(KeyedUnitaryFamily(2, dim, seed))
        qubits = dim.bit_length() - 1
        psi = qstate.basis_state(0, [("q", qubits)])
        expected = prim.family(1).apply_to(psi).amplitudes
        other = qstate.haar_random_state(dim, seed + 1).amplitudes
        other = other - np.vdot(expected, other) * expected
        tag = qstate.StateVector.from_amplitudes(other, [("q", qubits)], normalize=True)
        rng = qstate.make_rng(seed)
        return float(np.mean([construction2_verify(prim, psi, 1, tag, rng) for _ in range(trials)]))

    @keyword
    def secure_mu_threshold(self, delta: float) -> float:
        prim = RandQuantumPrimitive(KeyedUnitaryFamily(1, 2, 0), delta=delta)
        return prim.secure_mu_threshold

    @keyword
    def binding_descriptor_round_trip(self, descriptor: str) -> bool:
        """descriptor -> binding -> descriptor keeps every given field"""
        desc = json.loads(descriptor)
        rebuilt = binding_from_descriptor(desc).descriptor()
        self.last_result = {"descriptor": rebuilt}
        return all(rebuilt.get(k) == v for k, v in desc.items() if k not in ("verifier",))

    @keyword
    def build_binding(self, descriptor: str):
        return binding_from_descriptor(json.loads(descriptor))

    @keyword
    def binding_descriptor(self, descriptor: str) -> dict:
        """Descriptor of the binding built from descriptor, widths filled in"""
        return binding_from_descriptor(json.loads(descriptor)).descriptor()

    @keyword
    def cached_table_count(self, key_bits: int, n: int, m: int, seed: int, keys: int) -> int:
        """Tables held by one family after evaluating the first `keys` keys"""
        family = KeyedFunctionFamily(key_bits, n, m, seed)
        for key in range(keys):
            family(key)
        return family.cached_tables

    @keyword
    def table_survives_eviction(self, key_bits: int, n: int, m: int, seed: int, keys: int) -> bool:
        """Key 0 maps to the same table before and after `keys` other keys push it out"""
        family = KeyedFunctionFamily(key_bits, n, m, seed)
        before = family(0).table.copy()
        for key in range(1, keys + 1):
            family(key)
        return bool(np.array_equal(before, family(0).table))

    @keyword
    def binding_setup_is_reproducible(self, descriptor: str, seed: int) -> bool:
        """Two setups from one seed hold the same key (classical) or unitary (quantum)"""
        binding = binding_from_descriptor(json.loads(descriptor))
        first, second = binding.setup(seed), binding.setup(seed)
        if binding.quantum:
            return bool(np.array_equal(first.unitary_for(0).entries, second.unitary_for(0).entries))
        return first.key == second.key

    @keyword
    def random_function_collision_deviation(self, n: int, m: int, trials: int, seed: int) -> float:
        """|empirical rate - 2^-m| in units of sigma"""
        rate = random_function_collision_rate(n, m, trials, seed)
        sigma = random_function_collision_sigma(n, m, trials)
        self.last_result = {"rate": rate, "sigma": sigma}
        return abs(rate - 2.0**-m) / sigma

    @keyword
    def probe_family(self, kind: str, n: int, m: int, trials: int, seed: int):
        family = KeyedFunctionFamily(16, n, m, seed, FunctionFamilyKind(kind))
        report = inter_function_independence_probe(family, trials, seed)
        self.last_result = report.to_dict()
        return self.last_result
