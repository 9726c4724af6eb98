# OracleLibrary.py
import sys
from pathlib import Path

import numpy as np
from robot.api.deco import keyword
from scipy import stats

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from qunforge import qstate  # noqa: E402
from qunforge.attacks import classical_query  # noqa: E402
from qunforge.oracles import (  # noqa: E402
    ANCILLA_REGISTER,
    MESSAGE_REGISTER,
    RECORD_REGISTER,
    ClassicalFunctionTable,
    ControlledGateFamily,
    OracleInstance,
    decode_blinded_output,
    generate_blinding,
)
from qunforge.primitives import KeyedFunctionFamily, KeyedUnitaryFamily, RandMAC  # noqa: E402


def _basis_entries(state):
    """(message, ancilla) pairs carrying non-zero amplitude."""
    width = state.register(ANCILLA_REGISTER).dim
    return [divmod(int(i), width) for i in np.flatnonzero(np.abs(state.amplitudes) > 1e-12)]


class OracleLibrary:
    """
    Keywords for the oracle bindings: XOR answers, per-query randomness,
    minimal and randomized unitary access, blinding and function tables
    """

    ROBOT_LIBRARY_SCOPE = "GLOBAL"

    def __init__(self):
        self.last_result = None

    @keyword
    def deterministic_oracle_answers_classical_query(self, n: int, m: int, seed: int, message: int) -> bool:
        """Query |message, 0> and check the ancilla holds f(message)"""
        table = ClassicalFunctionTable.random(n, m, seed)
        oracle = OracleInstance.standard(table)
        answered = oracle.apply(classical_query({message: 1.0}, n, m))
        entries = _basis_entries(answered)
        self.last_result = {"entries": entries, "expected": table(message)}
        return entries == [(message, table(message))]

    @keyword
    def superposition_query_is_consistent(self, n: int, m: int, seed: int) -> bool:
        """Every branch of a uniform superposition query carries its own f(m)"""
        table = ClassicalFunctionTable.random(n, m, seed)
        oracle = OracleInstance.standard(table)
        query = classical_query({x: 1.0 for x in range(2**n)}, n, m)
        entries = _basis_entries(oracle.apply(query))
        return len(entries) == 2**n and all(y == table(x) for x, y in entries)

    @keyword
    def oracle_is_an_involution(self, n: int, m: int, seed: int) -> float:
        """Largest amplitude gap after applying the XOR oracle twice to a random query"""
        table = ClassicalFunctionTable.random(n, m, seed)
        oracle = OracleInstance.standard(table)
        query = qstate.haar_random_state(
            2 ** (n + m), seed, [(MESSAGE_REGISTER, n), (ANCILLA_REGISTER, m)]
        )
        twice = oracle.apply(oracle.apply(query))
        return float(np.max(np.abs(twice.amplitudes - query.amplitudes)))

    @keyword
    def randomized_query_shares_randomness(self, n: int, m: int, key_bits: int, seed: int) -> bool:
        """All branches of one randomized query use the same r, reported as tag||r"""
        family = KeyedFunctionFamily(key_bits, n, m, seed)
        mac = RandMAC(family)
        key = mac.keygen(seed)
        oracle = mac.oracle(key, seed)
        query = classical_query({x: 1.0 for x in range(2**n)}, n, oracle.output_bits)
        entries = _basis_entries(oracle.apply(query))
        r = oracle.last_randomness
        mask = (1 << key_bits) - 1
        self.last_result = {"r": r, "entries": entries}
        return all(
            (y & mask) == r and (y >> key_bits) == family.evaluate(key ^ r, x) for x, y in entries
        )

    @keyword
    def randomness_without_echo_leaves_only_tags(self, n: int, m: int, key_bits: int, seed: int) -> bool:
        family = KeyedFunctionFamily(key_bits, n, m, seed)
        mac = RandMAC(family)
        key = mac.keygen(seed)
        oracle = mac.oracle(key, seed, return_randomness=False)
        entries = _basis_entries(oracle.apply(classical_query({0: 1.0}, n, oracle.output_bits)))
        return oracle.output_bits == m and entries == [(0, family.evaluate(key ^ oracle.last_randomness, 0))]

    @keyword
    def randomness_log_for_seed(self, seed: int, queries: int):
        """Randomness drawn by a fresh randomized oracle over several queries"""
        family = KeyedFunctionFamily(4, 2, 2, 0)
        oracle = RandMAC(family).oracle(3, seed)
        for _ in range(queries):
            oracle.apply(classical_query({0: 1.0}, 2, oracle.output_bits))
        self.last_result = {"query_counter": oracle.query_counter}
        return list(oracle.randomness_log)

    @keyword
    def randomness_uniformity_p_value(self, randomness_bits: int, queries: int, seed: int) -> float:
        """Chi-square p-value of the per-query randomness counts"""
        family = KeyedFunctionFamily(randomness_bits, 1, 1, 0)
        oracle = RandMAC(family).oracle(0, seed)
        draws = []
        for _ in range(queries):
            draws.append(oracle.draw_randomness())
            oracle.query_counter += 1
        counts = np.bincount(draws, minlength=2**randomness_bits)
        return float(stats.chisquare(counts).pvalue)

    @keyword
    def query_with_narrow_ancilla(self, n: int, m: int):
        oracle = OracleInstance.standard(ClassicalFunctionTable.random(n, m, 0))
        return oracle.apply(classical_query({0: 1.0}, n, m - 1))

    @keyword
    def minimal_oracle_deviation(self, dim: int, seed: int) -> float:
        """Gap between the minimal oracle's answer and U|psi>"""
        unitary = qstate.haar_random_unitary(dim, seed)
        psi = qstate.haar_random_state(dim, seed + 1, [(MESSAGE_REGISTER, dim.bit_length() - 1)])
        answered = OracleInstance.minimal(unitary).apply(psi)
        return float(np.max(np.abs(answered.amplitudes - unitary.apply_to(psi).amplitudes)))

    @keyword
    def randomized_unitary_query_records_randomness(self, index_bits: int, seed: int) -> bool:
        """|0>_record |psi> becomes |r> U(r)|psi> with r from the oracle's log"""
        family = KeyedUnitaryFamily(index_bits, 4, seed)
        oracle = OracleInstance.randomized_unitary(family, index_bits, seed)
        psi = qstate.haar_random_state(4, seed, [(MESSAGE_REGISTER, 2)])
        query = qstate.tensor(qstate.basis_state(0, [(RECORD_REGISTER, index_bits)]), psi)
        answered = oracle.apply(query)
        r = oracle.last_randomness
        expected = qstate.tensor(
            qstate.basis_state(r, [(RECORD_REGISTER, index_bits)]), family(r).apply_to(psi)
        )
        return qstate.fidelity(answered, expected) > 1 - 1e-9

    @keyword
    def randomized_unitary_query_without_record(self, seed: int):
        family = KeyedUnitaryFamily(2, 4, seed)
        oracle = OracleInstance.randomized_unitary(family, 2, seed)
        return oracle.apply(qstate.haar_random_state(4, seed, [(MESSAGE_REGISTER, 2)]))

    @keyword
    def blinded_oracle_answers(self, n: int, m: int, epsilon: float, seed: int):
        """Decoded classical answers of the blinded oracle: None inside the blinded region"""
        table = ClassicalFunctionTable.random(n, m, seed)
        blinding = generate_blinding(epsilon, n, seed)
        oracle = OracleInstance.blinded(table, blinding)
        answers = {}
        for x in range(2**n):
            entries = _basis_entries(oracle.apply(classical_query({x: 1.0}, n, oracle.output_bits)))
            answers[x] = decode_blinded_output(entries[0][1], m)
        self.last_result = {"members": sorted(blinding.members), "answers": answers}
        return all(
            answers[x] is None if x in blinding else answers[x] == table(x) for x in range(2**n)
        )

    @keyword
    def blinding_fraction(self, n: int, epsilon: float, seed: int) -> float:
        blinding = generate_blinding(epsilon, n, seed)
        return len(blinding) / 2**n

    @keyword
    def blinding_regenerates_identically(self, n: int, epsilon: float, seed: int) -> bool:
        blinding = generate_blinding(epsilon, n, seed)
        return blinding.regenerate().members == blinding.members

    @keyword
    def parse_function_table(self, text: str, n: int, m: int):
        table = ClassicalFunctionTable.from_hex(text.replace("\\n", "\n"), n, m)
        self.last_result = {"table": [int(v) for v in table.table]}
        return self.last_result["table"]

    @keyword
    def function_table_survives_file(self, n: int, m: int, seed: int, directory: str) -> bool:
        table = ClassicalFunctionTable.random(n, m, seed)
        path = Path(directory) / f"table_{n}_{m}_{seed}.hex"
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
        return bool(np.array_equal(ClassicalFunctionTable.load(path, n, m).table, table.table))

    @keyword
    def controlled_gate_circuit_deviation(self, message_qubits: int, randomness_bits: int, seed: int) -> float:
        family = ControlledGateFamily.sample(message_qubits, randomness_bits, seed)
        return family.circuit_deviation()
