"""Unitary measurement models: broadcast, fine-graining, redundancy, bleaching.

Everything here is a pure unitary map on an explicit joint state vector; no
step ever leaves the pure-state representation, and each evolution map is
checked against the unitarity tolerance when constructed.

* ``premeasure`` broadcasts a system basis onto environment registers with a
  generalized controlled shift (or a controlled rotation when imperfect
  records with a declared overlap are wanted), producing branching states
  whose pointer basis states are fixed points.
* ``born_from_envariance`` realizes probability extraction for rational
  squared amplitudes: the environment register is fine-grained against an
  equal-size record register so that every fine branch carries amplitude
  1/sqrt(M), at which point every branch transposition is envariant and the
  outcome weights are exact branch counts.
* ``darwinism_curve`` / ``redundancy`` quantify how many environment
  fragments independently carry the system's classical information.
* ``bleach`` / ``recover`` implement information hiding into a d^2 ancilla:
  the system marginal becomes input-independent while the input stays
  recoverable by operations on the ancilla alone plus one fixed swap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .envariance import JointPairState, undo_on_n
from .linalg import (
    DensityMatrix,
    DimensionMismatchError,
    Operator,
    StateVector,
    basis_state,
    entropy,
    partial_trace,
    tensor,
)
from .tolerances import DEFAULT_TOL, DIM_BUDGET, Tolerances


class BudgetError(ValueError):
    """The requested joint space exceeds the dense-vector dimension budget."""


# ---------------------------------------------------------------------------
# Gate plumbing (dense two-site gates applied by tensor reshaping)
# ---------------------------------------------------------------------------

def _apply_gate(amps: np.ndarray, dims: Sequence[int], gate: np.ndarray,
                axes: Sequence[int]) -> np.ndarray:
    """Apply a dense gate to the given axes of a flattened state."""
    n = len(dims)
    axes = list(axes)
    rest = [i for i in range(n) if i not in axes]
    block = math.prod(dims[i] for i in axes)
    moved = np.transpose(amps.reshape(dims), axes + rest).reshape(block, -1)
    moved = gate @ moved
    back = moved.reshape([dims[i] for i in axes] + [dims[i] for i in rest])
    inverse = np.argsort(axes + rest)
    return np.transpose(back, inverse).reshape(-1)


def _require_unitary(matrix: np.ndarray, what: str,
                     tol: Tolerances = DEFAULT_TOL) -> Operator:
    op = Operator(matrix)
    if not op.is_unitary(tol):
        raise ValueError(f"{what} failed the unitarity check "
                         f"(defect {op.unitarity_defect():.3e})")
    return op


def controlled_shift_gate(dim: int) -> Operator:
    """|k, j> -> |k, j+k mod dim>; the perfect-record broadcast gate."""
    gate = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in range(dim):
        for j in range(dim):
            gate[k * dim + (j + k) % dim, k * dim + j] = 1.0
    return _require_unitary(gate, "controlled shift")


def controlled_rotation_gate(angle: float) -> Operator:
    """Qubit gate writing records |0> and cos(angle)|0> + sin(angle)|1>.

    At angle pi/2 this is the perfect-record controlled flip; smaller angles
    leave the two records with overlap cos(angle).
    """
    rotation = np.array([[math.cos(angle), -math.sin(angle)],
                         [math.sin(angle), math.cos(angle)]], dtype=complex)
    gate = np.zeros((4, 4), dtype=complex)
    gate[:2, :2] = np.eye(2)
    gate[2:, 2:] = rotation
    return _require_unitary(gate, "controlled rotation")


def fourier_matrix(dim: int) -> Operator:
    j = np.arange(dim)
    omega = np.exp(2j * np.pi / dim)
    return _require_unitary(omega ** np.outer(j, j) / math.sqrt(dim),
                            "Fourier matrix")


# ---------------------------------------------------------------------------
# Premeasurement broadcast
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchingState:
    """System-plus-environment state after a broadcast premeasurement.

    ``branch_labels`` pairs each populated system basis index with its
    amplitude; ``record_overlap`` is the inner product between any two
    distinct per-factor environment records (0 for perfect records).
    """

    joint: StateVector
    branch_labels: tuple[tuple[int, complex], ...]
    record_overlap: float
    system_dim: int
    n_env: int


def premeasure(system: StateVector, n_env: int,
               record_angle: Optional[float] = None,
               tol: Tolerances = DEFAULT_TOL) -> BranchingState:
    """Broadcast the system basis onto ``n_env`` fresh environment registers.

    The perfect-record map sends |k>|0...0> to |k>|k...k> via one controlled
    shift per register.  Passing ``record_angle`` (qubit systems only) writes
    partially distinguishable records with pairwise overlap cos(angle)
    instead.  Pointer basis inputs are fixed points up to the records they
    imprint, and the reduced system state loses exactly its off-diagonal
    terms in the pointer basis.
    """
    d_s = system.dim
    if d_s < 2:
        raise DimensionMismatchError("system dimension must be at least 2")
    if n_env < 1:
        raise DimensionMismatchError("need at least one environment register")
    if d_s ** (n_env + 1) > DIM_BUDGET:
        raise BudgetError(
            f"joint dimension {d_s}^{n_env + 1} exceeds the budget {DIM_BUDGET}"
        )
    if record_angle is None:
        gate = controlled_shift_gate(d_s)
        overlap = 0.0
    else:
        if d_s != 2:
            raise DimensionMismatchError(
                "imperfect records are implemented for qubit systems only"
            )
        gate = controlled_rotation_gate(record_angle)
        overlap = math.cos(record_angle)
    joint = tensor(system, *(basis_state(d_s, 0) for _ in range(n_env)))
    amps = joint.amplitudes
    for register in range(1, n_env + 1):
        amps = _apply_gate(amps, joint.factor_dims, gate.entries, [0, register])
    labels = tuple(
        (k, complex(a)) for k, a in enumerate(system.amplitudes)
        if abs(a) > 1e-14
    )
    return BranchingState(
        joint=StateVector(amps, joint.factor_dims),
        branch_labels=labels,
        record_overlap=overlap,
        system_dim=d_s,
        n_env=n_env,
    )


# ---------------------------------------------------------------------------
# Born weights by fine-graining
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalWeights:
    """Positive integer branch multiplicities; their sum is the denominator."""

    m: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.m)
        if not values or any(v < 1 for v in values):
            raise ValueError(f"weights must be positive integers, got {self.m}")
        object.__setattr__(self, "m", values)

    @property
    def total(self) -> int:
        return sum(self.m)

    def blocks(self) -> list[range]:
        """Consecutive index blocks of sizes m_k partitioning range(total)."""
        out, start = [], 0
        for size in self.m:
            out.append(range(start, start + size))
            start += size
        return out


def weights_from_probabilities(probabilities: Sequence[float],
                               max_denominator: int = 64
                               ) -> tuple[RationalWeights, float]:
    """Approximate a probability vector by rational weights.

    Returns the weights plus the worst-case approximation error
    max_k |p_k - m_k / M|; irrational inputs are never silently truncated --
    the caller sees exactly how much was given up.
    """
    approx = [Fraction(float(p)).limit_denominator(max_denominator)
              for p in probabilities]
    denominator = math.lcm(*(f.denominator for f in approx))
    scaled = [int(f * denominator) for f in approx]
    # force exact normalization onto the largest entry
    drift = denominator - sum(scaled)
    scaled[int(np.argmax(scaled))] += drift
    if any(v < 1 for v in scaled):
        raise ValueError(
            f"max_denominator={max_denominator} too coarse for {probabilities}"
        )
    weights = RationalWeights(tuple(scaled))
    error = max(abs(float(p) - mk / weights.total)
                for p, mk in zip(probabilities, weights.m))
    return weights, error


@dataclass(frozen=True)
class BornOutcome:
    """Result of the fine-graining construction.

    ``coarse`` is the pre-fine-graining state on system (x) environment;
    ``fine`` adds the record register, carrying all ``total`` branches at
    amplitude 1/sqrt(M).  ``probabilities`` are exact rationals m_k / M and
    equal the squared Schmidt coefficients of ``coarse``.
    """

    weights: RationalWeights
    probabilities: tuple[Fraction, ...]
    coarse: StateVector
    fine: StateVector
    fine_grain_unitary: Operator
    transpositions_checked: int
    transposition_residual_max: float


def born_from_envariance(weights: RationalWeights,
                         tol: Tolerances = DEFAULT_TOL) -> BornOutcome:
    """Extract outcome probabilities for rational weights by fine-graining.

    Builds |Psi> = sum_k sqrt(m_k/M) |s_k>|e_k>, where |e_k> is the equal
    superposition over block k of an M-dimensional environment register, then
    copies the fine index onto an M-dimensional record register:
    |e_k>|0> maps to the equal superposition over the m_k doubled states of
    block k.  All M fine-grained amplitudes come out at 1/sqrt(M), and every
    transposition of fine branches is envariant -- it is undone on the
    complementary side -- which is verified here via :func:`undo_on_n` for
    every pair.  The returned probabilities are the exact branch counts.
    """
    k_outcomes = len(weights.m)
    m_total = weights.total
    if k_outcomes * m_total * m_total > DIM_BUDGET:
        raise BudgetError(
            f"fine-grained dimension {k_outcomes}*{m_total}^2 exceeds {DIM_BUDGET}"
        )
    blocks = weights.blocks()

    coarse = np.zeros((k_outcomes, m_total), dtype=complex)
    for k, block in enumerate(blocks):
        coarse[k, list(block)] = 1.0 / math.sqrt(m_total)
    coarse_state = StateVector(coarse.reshape(-1), (k_outcomes, m_total))

    fine_grain = controlled_shift_gate(m_total)
    start = tensor(coarse_state, basis_state(m_total, 0))
    fine_amps = _apply_gate(start.amplitudes, start.factor_dims,
                            fine_grain.entries, [1, 2])
    fine_state = StateVector(fine_amps, (k_outcomes, m_total, m_total))

    populated = np.abs(fine_state.amplitudes) > tol.rank_cutoff
    if int(populated.sum()) != m_total:
        raise RuntimeError(
            f"expected {m_total} fine branches, found {int(populated.sum())}"
        )
    flat = np.abs(fine_state.amplitudes[populated]) - 1.0 / math.sqrt(m_total)
    if float(np.max(np.abs(flat))) > tol.born_amplitude:
        raise RuntimeError("fine-grained amplitudes are not flat")

    # every transposition of fine branches must be undoable on the other side
    env_first = fine_state.reordered([1, 0, 2])
    pair = JointPairState(
        StateVector(env_first.amplitudes, (m_total, k_outcomes * m_total)),
        (m_total, k_outcomes * m_total),
    )
    worst = 0.0
    checked = 0
    for i, j in combinations(range(m_total), 2):
        swap = np.eye(m_total, dtype=complex)
        swap[[i, j], [i, j]] = 0.0
        swap[i, j] = swap[j, i] = 1.0
        witness = undo_on_n(pair, Operator(swap), tol)
        worst = max(worst, witness.residual)
        checked += 1
    if worst > tol.witness:
        raise RuntimeError(
            f"a branch transposition failed envariance (residual {worst:.3e})"
        )

    probabilities = tuple(Fraction(mk, m_total) for mk in weights.m)
    squared = np.sort(np.linalg.svd(coarse, compute_uv=False) ** 2)[::-1]
    expected = np.sort([float(p) for p in probabilities])[::-1]
    if float(np.max(np.abs(squared - expected))) > tol.born_amplitude:
        raise RuntimeError("probabilities disagree with the squared spectrum")

    return BornOutcome(
        weights=weights,
        probabilities=probabilities,
        coarse=coarse_state,
        fine=fine_state,
        fine_grain_unitary=fine_grain,
        transpositions_checked=checked,
        transposition_residual_max=worst,
    )


# ---------------------------------------------------------------------------
# Mutual-information curves and redundancy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    fragment_size: int
    mean_information: float
    samples: int


@dataclass(frozen=True)
class MutualInformationCurve:
    """Mean I(S:F) against fragment size, for one branching state."""

    points: tuple[CurvePoint, ...]
    system_entropy: float
    n_env: int

    def __post_init__(self):
        cap = 2.0 * self.system_entropy + 1e-9
        for point in self.points:
            if not (-1e-9 <= point.mean_information <= cap):
                raise ValueError(
                    f"I(S:F) = {point.mean_information} outside [0, 2 H_S] "
                    f"at fragment size {point.fragment_size}"
                )

    def mean_at(self, fragment_size: int) -> float:
        for point in self.points:
            if point.fragment_size == fragment_size:
                return point.mean_information
        raise KeyError(f"no point at fragment size {fragment_size}")

    def to_csv(self) -> str:
        lines = ["f,mean_I_bits,samples,H_S"]
        for point in self.points:
            lines.append(f"{point.fragment_size},{point.mean_information!r},"
                         f"{point.samples},{self.system_entropy!r}")
        return "\n".join(lines) + "\n"


DEFAULT_FRAGMENT_SAMPLES = 2000


def _marginal_entropy(joint: StateVector, keep: list[int]) -> float:
    """Entropy of a marginal of a pure joint state.

    Both sides of a pure-state cut share a spectrum, so the reduced density
    matrix is always built on the smaller side of the bipartition.
    """
    dims = joint.factor_dims
    d_keep = math.prod(dims[i] for i in keep)
    if d_keep * d_keep <= joint.dim:
        return entropy(partial_trace(joint, keep=keep))
    complement = [i for i in range(len(dims)) if i not in keep]
    if not complement:
        return global_entropy(joint)
    return entropy(partial_trace(joint, keep=complement))


def darwinism_curve(state: BranchingState,
                    samples_per_size: int = DEFAULT_FRAGMENT_SAMPLES,
                    seed: int = 0) -> MutualInformationCurve:
    """Mean mutual information I(S:F) for every fragment size f = 0..N.

    Fragments of a given size are enumerated exhaustively when there are at
    most ``samples_per_size`` of them; otherwise that many are sampled
    uniformly without replacement, with a per-size seed derived from
    (seed, f) so results are independent of evaluation order.
    """
    n = state.n_env
    env_total = math.prod(state.joint.factor_dims[1:])
    if env_total > 2 ** 12:
        raise BudgetError(
            f"environment dimension {env_total} exceeds the 2^12 budget"
        )
    if samples_per_size < 1:
        raise ValueError("samples_per_size must be positive")
    joint = state.joint
    h_system = _marginal_entropy(joint, [0])
    points = [CurvePoint(0, 0.0, 1)]
    for size in range(1, n + 1):
        everything = list(combinations(range(1, n + 1), size))
        if len(everything) <= samples_per_size:
            fragments = everything
        else:
            rng = np.random.default_rng((seed, size))
            chosen = rng.choice(len(everything), size=samples_per_size,
                                replace=False)
            fragments = [everything[i] for i in sorted(chosen)]
        total = 0.0
        for fragment in fragments:
            h_frag = _marginal_entropy(joint, list(fragment))
            h_joint = _marginal_entropy(joint, [0, *fragment])
            total += h_system + h_frag - h_joint
        points.append(CurvePoint(size, total / len(fragments), len(fragments)))
    return MutualInformationCurve(tuple(points), h_system, n)


def redundancy(curve: MutualInformationCurve, delta: float) -> float:
    """R_delta = N / f_delta, the number of independently informative fragments.

    f_delta is the smallest fragment size whose mean information reaches
    (1 - delta) of the system entropy.  Returns 0 when the system carries no
    information at all or when no fragment size qualifies.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if curve.system_entropy <= 1e-12:
        return 0.0
    threshold = (1.0 - delta) * curve.system_entropy
    for point in curve.points:
        if point.fragment_size >= 1 and point.mean_information >= threshold:
            return curve.n_env / point.fragment_size
    return 0.0


# ---------------------------------------------------------------------------
# Information hiding (bleach) and ancilla-local recovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BleachResult:
    """Bleached joint state on system (x) d^2 ancilla, plus the fixed marginal.

    ``unitary`` is the dense bleaching map, materialized only when the joint
    dimension is small enough to build it outright.
    """

    joint: StateVector
    sigma_system: DensityMatrix
    unitary: Optional[Operator]


_DENSE_UNITARY_LIMIT = 4096


def _controlled_phase(d: int) -> np.ndarray:
    """Diagonal gate omega^{s b} over the index pair (s, b)."""
    omega = np.exp(2j * np.pi / d)
    exponents = np.multiply.outer(np.arange(d), np.arange(d)).reshape(-1)
    return np.diag(omega ** exponents)


def _swap_control(gate: np.ndarray, d: int) -> np.ndarray:
    """Reindex a two-site gate so its roles are (target, control)."""
    return gate.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d)


def _bleach_apply(amps: np.ndarray, d: int, fourier: np.ndarray,
                  shift_by_control: np.ndarray, phase: np.ndarray) -> np.ndarray:
    dims = (d, d, d)
    amps = _apply_gate(amps, dims, fourier, [1])
    amps = _apply_gate(amps, dims, fourier, [2])
    amps = _apply_gate(amps, dims, shift_by_control, [0, 1])
    return _apply_gate(amps, dims, phase, [0, 2])


def bleach(psi: StateVector, tol: Tolerances = DEFAULT_TOL) -> BleachResult:
    """Hide ``psi`` in a d^2-dimensional ancilla, leaving the system blank.

    The ancilla (two fresh d-dimensional registers) is Fourier-spread and
    coherently applies every shift-and-phase displacement to the system.
    Averaging over the full displacement family makes the reduced system state
    exactly I/d for every input; the input itself is carried entirely by the
    correlations with the ancilla, from which :func:`recover` extracts it.
    """
    d = psi.dim
    if d < 2:
        raise DimensionMismatchError("bleaching needs dimension at least 2")
    if d ** 3 > DIM_BUDGET:
        raise BudgetError(f"joint dimension {d}^3 exceeds the budget {DIM_BUDGET}")
    fourier = fourier_matrix(d).entries
    # the broadcast gate shifts its first index by its second; here the
    # system is the target and the first ancilla register the control
    shift_by_control = _swap_control(controlled_shift_gate(d).entries, d)
    phase = _require_unitary(_controlled_phase(d), "controlled phase").entries

    amps = tensor(psi, basis_state(d, 0), basis_state(d, 0)).amplitudes
    amps = _bleach_apply(amps, d, fourier, shift_by_control, phase)
    joint = StateVector(amps, (d, d, d))

    unitary = None
    if d ** 3 <= _DENSE_UNITARY_LIMIT:
        columns = np.eye(d ** 3, dtype=complex)
        dense = np.column_stack([
            _bleach_apply(columns[:, i], d, fourier, shift_by_control, phase)
            for i in range(d ** 3)
        ])
        unitary = _require_unitary(dense, "bleach map", tol)

    return BleachResult(
        joint=joint,
        sigma_system=partial_trace(joint, keep=[0]),
        unitary=unitary,
    )


def recover(joint: StateVector, tol: Tolerances = DEFAULT_TOL) -> StateVector:
    """Undo a bleach by acting on the ancilla alone, then one fixed swap.

    The ancilla-local step inverts the Fourier spread on the second register
    and applies a subtract-and-relabel permutation, after which the hidden
    state sits in the first ancilla register; the fixed swap returns it to
    the system slot, whose marginal is then read out as the top eigenvector.
    """
    dims = joint.factor_dims
    if len(dims) != 3 or len(set(dims)) != 1:
        raise DimensionMismatchError(
            f"expected a (d, d, d) bleached joint, got factors {dims}"
        )
    d = dims[0]
    fourier = fourier_matrix(d)
    amps = _apply_gate(joint.amplitudes, dims, fourier.dagger.entries, [2])
    relabel = np.zeros((d * d, d * d), dtype=complex)
    for u in range(d):
        for v in range(d):
            relabel[((v - u) % d) * d + v, u * d + v] = 1.0
    relabel_gate = _require_unitary(relabel, "ancilla relabeling")
    amps = _apply_gate(amps, dims, relabel_gate.entries, [1, 2])
    swapped = StateVector(amps, dims).reordered([1, 0, 2])
    reduced = partial_trace(swapped, keep=[0])
    eigenvalues, eigenvectors = np.linalg.eigh(reduced.entries)
    if eigenvalues[-1] < 1.0 - 1e-6:
        raise ValueError(
            f"system marginal is not pure after recovery "
            f"(top eigenvalue {eigenvalues[-1]:.6f}); was this state bleached?"
        )
    return StateVector(eigenvectors[:, -1])


# ---------------------------------------------------------------------------
# Global-purity bookkeeping
# ---------------------------------------------------------------------------

def global_entropy(state: StateVector) -> float:
    """Entropy of the full joint state; 0 certifies pure unitary evolution."""
    if state.dim <= 1024:
        return entropy(state.to_density())
    purity = float(np.linalg.norm(state.amplitudes) ** 2)
    return float(-purity * math.log2(purity)) if purity < 1.0 else 0.0
