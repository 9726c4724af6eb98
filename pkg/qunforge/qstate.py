"""
Exact quantum states and operators over named qubit registers.

Every state carries a register layout: an ordered tuple of named registers.
Amplitude indices are big-endian over that layout, so the first register
holds the most significant bits, and inside a register qubit 0 is the most
significant bit. All values are immutable once constructed; every operation
returns a new object.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from qunforge.errors import DimensionMismatchError, InvalidParameterError

logger = logging.getLogger(__name__)

# Absolute tolerance for every exact-algebra check
TOLERANCE = 1e-9
# Widest state the dense simulator accepts
MAX_QUBITS = 14

DEFAULT_REGISTER = "q"

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
for _gate in (HADAMARD, PAULI_X, PAULI_Z):
    _gate.setflags(write=False)

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]


@dataclass(frozen=True)
class Register:
    """A named block of qubits inside a state."""

    name: str
    num_qubits: int

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InvalidParameterError(
                f"Register '{self.name}' needs at least one qubit, got {self.num_qubits}"
            )

    @property
    def dim(self) -> int:
        return 2**self.num_qubits


Layout = Tuple[Register, ...]
LayoutLike = Union[Layout, Sequence[Union[Register, Tuple[str, int]]]]
Targets = Union[str, Sequence[str]]


def make_layout(layout: LayoutLike) -> Layout:
    """Normalize a layout given as Register objects or (name, qubits) pairs."""
    registers = []
    for item in layout:
        registers.append(item if isinstance(item, Register) else Register(*item))
    names = [r.name for r in registers]
    if len(set(names)) != len(names):
        raise DimensionMismatchError(f"Duplicate register names in layout: {names}")
    if not registers:
        raise DimensionMismatchError("A layout needs at least one register")
    return tuple(registers)


def layout_qubits(layout: Layout) -> int:
    return sum(r.num_qubits for r in layout)


def _qubits_for_dim(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise DimensionMismatchError(f"Dimension {dim} is not a power of two >= 2")
    return dim.bit_length() - 1


def default_layout(dim: int, name: str = DEFAULT_REGISTER) -> Layout:
    return (Register(name, _qubits_for_dim(dim)),)


def _merge_layouts(a: Layout, b: Layout) -> Layout:
    taken = {r.name for r in a}
    merged = list(a)
    for reg in b:
        name = reg.name
        suffix = 1
        while name in taken:
            name = f"{reg.name}_{suffix}"
            suffix += 1
        taken.add(name)
        merged.append(Register(name, reg.num_qubits))
    return tuple(merged)


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(master: int, *path: int) -> int:
    """Child seed fixed by the master seed and an index path (trial, query, ...)."""
    sequence = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(p) for p in path))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _as_names(targets: Targets) -> Tuple[str, ...]:
    if isinstance(targets, str):
        return (targets,)
    return tuple(targets)


def _axes(layout: Layout, names: Iterable[str]) -> list:
    index = {r.name: i for i, r in enumerate(layout)}
    axes = []
    for name in names:
        if name not in index:
            raise DimensionMismatchError(
                f"Unknown register '{name}'; layout has {[r.name for r in layout]}"
            )
        axes.append(index[name])
    if len(set(axes)) != len(axes):
        raise DimensionMismatchError(f"Register listed twice: {list(names)}")
    return axes


def _qubit_axis(layout: Layout, register: str, qubit: int) -> int:
    offset = 0
    for reg in layout:
        if reg.name == register:
            if not 0 <= qubit < reg.num_qubits:
                raise DimensionMismatchError(
                    f"Qubit {qubit} outside register '{register}' of width {reg.num_qubits}"
                )
            return offset + qubit
        offset += reg.num_qubits
    raise DimensionMismatchError(f"Unknown register '{register}'")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state; amplitudes are a read-only complex128 vector."""

    amplitudes: np.ndarray
    layout: Layout

    def __post_init__(self):
        layout = make_layout(self.layout)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = layout_qubits(layout)
        if n > MAX_QUBITS:
            raise DimensionMismatchError(
                f"State of {n} qubits exceeds the {MAX_QUBITS}-qubit simulator limit"
            )
        if amps.size != 2**n:
            raise DimensionMismatchError(
                f"{amps.size} amplitudes do not fit a {n}-qubit layout"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > TOLERANCE:
            raise DimensionMismatchError(f"State is not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "layout", layout)

    @classmethod
    def from_amplitudes(
        cls,
        amplitudes: Sequence[complex],
        layout: Optional[LayoutLike] = None,
        normalize: bool = False,
    ) -> "StateVector":
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm < TOLERANCE:
                raise DimensionMismatchError("Cannot normalize the zero vector")
            amps = amps / norm
        return cls(amps, layout if layout is not None else default_layout(amps.size))

    @classmethod
    def from_description(
        cls, description: Sequence, layout: Optional[LayoutLike] = None
    ) -> "StateVector":
        """Build a state from a list of [re, im] pairs (or plain numbers)."""
        try:
            amps = [
                complex(item[0], item[1]) if isinstance(item, (list, tuple)) else complex(item)
                for item in description
            ]
        except (TypeError, ValueError, IndexError) as e:
            raise DimensionMismatchError(f"Malformed state description: {e}")
        return cls.from_amplitudes(amps, layout)

    def to_description(self) -> list:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @property
    def num_qubits(self) -> int:
        return layout_qubits(self.layout)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def register_names(self) -> Tuple[str, ...]:
        return tuple(r.name for r in self.layout)

    def register(self, name: str) -> Register:
        return self.layout[_axes(self.layout, [name])[0]]

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Dimensions differ: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def relabel(self, layout: LayoutLike) -> "StateVector":
        return StateVector(self.amplitudes, layout)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)


def basis_state(index: int, layout: LayoutLike) -> StateVector:
    layout = make_layout(layout)
    dim = 2 ** layout_qubits(layout)
    if not 0 <= index < dim:
        raise DimensionMismatchError(f"Basis index {index} outside dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, layout)


def register_basis_state(values: Dict[str, int], layout: LayoutLike) -> StateVector:
    """Computational basis state given one integer value per register."""
    layout = make_layout(layout)
    index = 0
    for reg in layout:
        value = values.get(reg.name, 0)
        if not 0 <= value < reg.dim:
            raise DimensionMismatchError(
                f"Value {value} does not fit register '{reg.name}' ({reg.num_qubits} qubits)"
            )
        index = index * reg.dim + value
    return basis_state(index, layout)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state: Hermitian, unit trace, positive semidefinite."""

    entries: np.ndarray
    layout: Layout

    def __post_init__(self):
        layout = make_layout(self.layout)
        rho = np.array(self.entries, dtype=np.complex128)
        dim = 2 ** layout_qubits(layout)
        if rho.shape != (dim, dim):
            raise DimensionMismatchError(f"Matrix of shape {rho.shape} does not fit dimension {dim}")
        if np.max(np.abs(rho - rho.conj().T)) > TOLERANCE:
            raise DimensionMismatchError("Density matrix is not Hermitian")
        trace = np.trace(rho)
        if abs(trace - 1.0) > TOLERANCE:
            raise DimensionMismatchError(f"Density matrix trace is {trace}, expected 1")
        if linalg.eigvalsh(rho).min() < -TOLERANCE:
            raise DimensionMismatchError("Density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "layout", layout)

    @classmethod
    def maximally_mixed(cls, layout: LayoutLike) -> "DensityMatrix":
        layout = make_layout(layout)
        dim = 2 ** layout_qubits(layout)
        return cls(np.eye(dim, dtype=np.complex128) / dim, layout)

    @property
    def num_qubits(self) -> int:
        return layout_qubits(self.layout)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Unitary operator; U^dagger U = I within TOLERANCE."""

    entries: np.ndarray

    def __post_init__(self):
        u = np.array(self.entries, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatchError(f"Unitary must be square, got shape {u.shape}")
        deviation = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if deviation > TOLERANCE:
            raise DimensionMismatchError(f"Matrix is not unitary (deviation {deviation:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "entries", u)

    @classmethod
    def identity(cls, dim: int) -> "UnitaryMatrix":
        return cls(np.eye(dim, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries @ other.entries)

    def apply_to(self, state: StateVector) -> StateVector:
        """Act on the whole state."""
        if state.dim != self.dim:
            raise DimensionMismatchError(f"Unitary of dim {self.dim} on state of dim {state.dim}")
        return StateVector(self.entries @ state.amplitudes, state.layout)


StateLike = Union[StateVector, DensityMatrix]


def transform_block(
    s: StateVector,
    targets: Targets,
    fn: Callable[[np.ndarray], np.ndarray],
    controls: Optional[Dict[str, int]] = None,
) -> np.ndarray:
    """
    Apply fn to the (target_dim, rest) block of s selected by the control values.

    Targets are combined big-endian in the order given. Returns raw amplitudes
    in the original layout.
    """
    names = _as_names(targets)
    controls = controls or {}
    dims = [r.dim for r in s.layout]
    tgt_axes = _axes(s.layout, names)
    ctrl_axes = _axes(s.layout, controls.keys())
    if set(tgt_axes) & set(ctrl_axes):
        raise DimensionMismatchError("A register cannot be both target and control")
    rest_axes = [a for a in range(len(dims)) if a not in tgt_axes and a not in ctrl_axes]
    perm = ctrl_axes + tgt_axes + rest_axes

    ctrl_dims = tuple(dims[a] for a in ctrl_axes)
    target_dim = int(np.prod([dims[a] for a in tgt_axes]))
    rest_dim = int(np.prod([dims[a] for a in rest_axes])) if rest_axes else 1

    work = s.amplitudes.reshape(dims).transpose(perm).copy(order="C")
    work = work.reshape(ctrl_dims + (target_dim, rest_dim))
    index = []
    for name, value in controls.items():
        reg = s.register(name)
        if not 0 <= value < reg.dim:
            raise DimensionMismatchError(f"Control value {value} outside register '{name}'")
        index.append(value)
    index = tuple(index)
    work[index] = fn(work[index])

    permuted_dims = [dims[a] for a in perm]
    return work.reshape(permuted_dims).transpose(np.argsort(perm)).reshape(-1)


def _as_matrix(u: Union[UnitaryMatrix, np.ndarray]) -> np.ndarray:
    return u.entries if isinstance(u, UnitaryMatrix) else np.asarray(u, dtype=np.complex128)


def _as_vector(phi: Union[StateVector, np.ndarray, Sequence[complex]]) -> np.ndarray:
    if isinstance(phi, StateVector):
        return phi.amplitudes
    vec = np.asarray(phi, dtype=np.complex128).reshape(-1)
    if abs(np.linalg.norm(vec) - 1.0) > TOLERANCE:
        raise DimensionMismatchError("Vector is not normalized")
    return vec


def _target_dim(s: StateVector, targets: Targets) -> int:
    return int(np.prod([s.register(name).dim for name in _as_names(targets)]))


def _target_block(s: StateVector, targets: Targets) -> np.ndarray:
    """Amplitudes reshaped to (target_dim, rest_dim), rest in layout order."""
    dims = [r.dim for r in s.layout]
    axes = _axes(s.layout, _as_names(targets))
    rest = [a for a in range(len(dims)) if a not in axes]
    return s.amplitudes.reshape(dims).transpose(axes + rest).reshape(_target_dim(s, targets), -1)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """a (x) b; duplicate register names in b get a numeric suffix."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes), _merge_layouts(a.layout, b.layout))


def apply_unitary(
    s: StateVector,
    u: Union[UnitaryMatrix, np.ndarray],
    target: Targets,
    controls: Optional[Dict[str, int]] = None,
) -> StateVector:
    """(I (x) u (x) I)|s>, optionally only on the branch where controls hold."""
    matrix = _as_matrix(u)
    dim = _target_dim(s, target)
    if matrix.shape != (dim, dim):
        raise DimensionMismatchError(
            f"Operator of shape {matrix.shape} does not match target dimension {dim}"
        )
    return StateVector(transform_block(s, target, lambda block: matrix @ block, controls), s.layout)


def apply_reflection(
    s: StateVector,
    phi: Union[StateVector, np.ndarray],
    target: Targets,
    controls: Optional[Dict[str, int]] = None,
) -> StateVector:
    """Apply I - 2|phi><phi| to the target registers as a rank-one update."""
    vec = _as_vector(phi)
    if vec.size != _target_dim(s, target):
        raise DimensionMismatchError(
            f"Reflection axis of dim {vec.size} does not match target dimension"
        )

    def reflect(block):
        return block - 2.0 * np.outer(vec, vec.conj() @ block)

    return StateVector(transform_block(s, target, reflect, controls), s.layout)


def swap_registers(
    s: StateVector, first: str, second: str, controls: Optional[Dict[str, int]] = None
) -> StateVector:
    d1, d2 = s.register(first).dim, s.register(second).dim
    if d1 != d2:
        raise DimensionMismatchError(f"Cannot swap registers of dims {d1} and {d2}")

    def swap(block):
        rest = block.shape[1]
        return block.reshape(d1, d1, rest).transpose(1, 0, 2).reshape(d1 * d1, rest)

    return StateVector(transform_block(s, (first, second), swap, controls), s.layout)


def apply_single_qubit_gate(
    s: StateVector, gate: np.ndarray, register: str, qubit: int = 0
) -> StateVector:
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise DimensionMismatchError(f"Single-qubit gate must be 2x2, got {gate.shape}")
    axis = _qubit_axis(s.layout, register, qubit)
    t = s.amplitudes.reshape((2,) * s.num_qubits)
    out = np.moveaxis(np.tensordot(gate, t, axes=([1], [axis])), 0, axis)
    return StateVector(out.reshape(-1), s.layout)


def apply_cnot(
    s: StateVector, control: Tuple[str, int], target: Tuple[str, int]
) -> StateVector:
    """Flip the target qubit where the control qubit is 1; qubits given as (register, index)."""
    c_axis = _qubit_axis(s.layout, *control)
    t_axis = _qubit_axis(s.layout, *target)
    if c_axis == t_axis:
        raise DimensionMismatchError("Control and target must be different qubits")
    t = s.amplitudes.reshape((2,) * s.num_qubits).copy()
    branch = [slice(None)] * s.num_qubits
    branch[c_axis] = 1
    branch = tuple(branch)
    flip_axis = t_axis if t_axis < c_axis else t_axis - 1
    t[branch] = np.flip(t[branch], axis=flip_axis).copy()
    return StateVector(t.reshape(-1), s.layout)


def born_distribution(s: StateVector, target: Targets) -> np.ndarray:
    """Exact outcome probabilities of a computational-basis measurement of target."""
    return np.sum(np.abs(_target_block(s, target)) ** 2, axis=1)


@dataclass(frozen=True)
class MeasurementResult:
    outcome: str
    value: int
    state: StateVector
    probability: float


def _format_outcome(value: int, width: int) -> str:
    return format(value, f"0{width}b")


def measure_computational(s: StateVector, target: Targets, rng_seed: SeedLike) -> MeasurementResult:
    """
    Measure target registers in the computational basis.

    The outcome bitstring is big-endian over the target registers; the
    returned probability is the exact pre-measurement Born weight.
    """
    rng = make_rng(rng_seed)
    probs = born_distribution(s, target)
    value = int(rng.choice(probs.size, p=probs / probs.sum()))
    probability = float(probs[value])

    def collapse(block):
        out = np.zeros_like(block)
        out[value] = block[value]
        return out

    amps = transform_block(s, target, collapse) / math.sqrt(probability)
    width = _qubits_for_dim(probs.size)
    return MeasurementResult(_format_outcome(value, width), value, StateVector(amps, s.layout), probability)


@dataclass(frozen=True)
class PMMeasurementResult:
    outcome: str
    state: StateVector
    probability: float


def measure_pm_basis(s: StateVector, target: str, rng_seed: SeedLike) -> PMMeasurementResult:
    """Measure a one-qubit register in the {|+>, |->} basis; outcome is '+' or '-'."""
    if s.register(target).num_qubits != 1:
        raise DimensionMismatchError(f"Register '{target}' is not a single qubit")
    rotated = apply_unitary(s, HADAMARD, target)
    result = measure_computational(rotated, target, rng_seed)
    collapsed = apply_unitary(result.state, HADAMARD, target)
    return PMMeasurementResult("+" if result.value == 0 else "-", collapsed, result.probability)


def project_register(
    s: StateVector, register: Targets, phi: Union[StateVector, np.ndarray]
) -> Tuple[StateVector, float]:
    """
    Condition on the target registers being in |phi> and drop them.

    Returns the normalized remaining state and the probability of that branch.
    """
    names = _as_names(register)
    vec = _as_vector(phi)
    if vec.size != _target_dim(s, names):
        raise DimensionMismatchError("Projection vector does not match register dimension")
    remaining = tuple(r for r in s.layout if r.name not in names)
    if not remaining:
        raise DimensionMismatchError("Cannot project out every register")
    amps = vec.conj() @ _target_block(s, names)
    probability = float(np.vdot(amps, amps).real)
    if probability < TOLERANCE**2:
        raise InvalidParameterError("Projection onto a branch of zero probability")
    return StateVector(amps / math.sqrt(probability), remaining), probability


def subsystem_fidelity(
    s: StateVector, phi: Union[StateVector, np.ndarray], target: Targets
) -> float:
    """F(rho_target, |phi>) = <phi|Tr_rest(|s><s|)|phi> without forming rho."""
    names = _as_names(target)
    vec = _as_vector(phi)
    if vec.size != _target_dim(s, names):
        raise DimensionMismatchError("State does not match the target registers")
    amps = vec.conj() @ _target_block(s, names)
    return float(min(max(np.vdot(amps, amps).real, 0.0), 1.0))


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    w, v = linalg.eigh(matrix)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(r1: StateLike, r2: StateLike) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(r1) r2 sqrt(r1)))^2.

    Pure inputs take the |<psi|phi>|^2 and <psi|rho|psi> shortcuts.
    """
    if r1.dim != r2.dim:
        raise DimensionMismatchError(f"Fidelity of states with dims {r1.dim} and {r2.dim}")
    if isinstance(r1, StateVector) and isinstance(r2, StateVector):
        value = abs(np.vdot(r1.amplitudes, r2.amplitudes)) ** 2
    elif isinstance(r1, StateVector) or isinstance(r2, StateVector):
        psi, rho = (r1, r2) if isinstance(r1, StateVector) else (r2, r1)
        value = np.vdot(psi.amplitudes, rho.entries @ psi.amplitudes).real
    else:
        root = _psd_sqrt(r1.entries)
        inner = root @ r2.entries @ root
        eigenvalues = linalg.eigvalsh((inner + inner.conj().T) / 2)
        value = np.sum(np.sqrt(np.clip(eigenvalues, 0.0, None))) ** 2
    return float(min(max(value, 0.0), 1.0))


def partial_trace(r: StateLike, keep: Targets) -> DensityMatrix:
    """Reduced state on the kept registers, in their original layout order."""
    names = _as_names(keep)
    keep_axes = sorted(_axes(r.layout, names))
    kept_layout = tuple(r.layout[a] for a in keep_axes)
    dims = [reg.dim for reg in r.layout]
    traced = [a for a in range(len(dims)) if a not in keep_axes]
    keep_dim = int(np.prod([dims[a] for a in keep_axes]))

    if isinstance(r, StateVector):
        block = r.amplitudes.reshape(dims).transpose(keep_axes + traced).reshape(keep_dim, -1)
        rho = block @ block.conj().T
    else:
        n = len(dims)
        rows = list(range(n))
        cols = [a if a in traced else n + a for a in range(n)]
        out = keep_axes + [n + a for a in keep_axes]
        rho = np.einsum(r.entries.reshape(dims + dims), rows + cols, out).reshape(keep_dim, keep_dim)
    return DensityMatrix((rho + rho.conj().T) / 2, kept_layout)


def reflection_about(phi: Union[StateVector, np.ndarray]) -> UnitaryMatrix:
    """I - 2|phi><phi|."""
    vec = _as_vector(phi)
    return UnitaryMatrix(np.eye(vec.size, dtype=np.complex128) - 2.0 * np.outer(vec, vec.conj()))


def householder_to_zero(phi: Union[StateVector, np.ndarray]) -> Optional[np.ndarray]:
    """
    Unit axis v such that reflecting about v maps |phi> to a phase times |0>.

    Returns None when |phi> is already proportional to |0>.
    """
    vec = _as_vector(phi)
    phase = vec[0] / abs(vec[0]) if abs(vec[0]) > TOLERANCE else 1.0
    axis = vec - phase * np.eye(vec.size, 1, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(axis)
    if norm < TOLERANCE:
        return None
    return axis / norm


def haar_random_unitary(dim: int, rng_seed: SeedLike) -> UnitaryMatrix:
    """Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal phases removed."""
    if dim < 2:
        raise InvalidParameterError(f"Haar unitary needs dim >= 2, got {dim}")
    rng = make_rng(rng_seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return UnitaryMatrix(q * (diag / np.abs(diag)))


def haar_random_state(
    dim: int, rng_seed: SeedLike, layout: Optional[LayoutLike] = None
) -> StateVector:
    if dim < 2:
        raise InvalidParameterError(f"Haar state needs dim >= 2, got {dim}")
    rng = make_rng(rng_seed)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.from_amplitudes(vec, layout or default_layout(dim), normalize=True)


def mu_distinguishable(r1: StateLike, r2: StateLike, mu: float) -> bool:
    """True iff F(r1, r2) <= 1 - mu (with TOLERANCE slack)."""
    if not 0.0 <= mu <= 1.0:
        raise InvalidParameterError(f"mu must lie in [0, 1], got {mu}")
    return fidelity(r1, r2) <= 1.0 - mu + TOLERANCE
