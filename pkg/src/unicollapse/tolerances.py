"""Central numerical tolerances and size budgets.

Every comparison threshold used by the package lives in one frozen record so
that tests can tighten or relax them in a single place instead of scattering
magic numbers through the code.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12            # unit-norm check on state construction
    unitary: float = 1e-10         # max-norm bound on U^dag U - I
    schmidt: float = 1e-10         # reconstruction residual, basis orthonormality
    density: float = 1e-10         # hermiticity, trace-one, eigenvalue floor
    spectrum: float = 1e-9         # Schmidt-spectrum comparison / degeneracy grouping
    witness: float = 1e-9          # residual bound for an accepted witness
    rank_cutoff: float = 1e-12     # singular values at or below this count as zero
    entropy_floor: float = 1e-14   # eigenvalues at or below this contribute no entropy
    born_amplitude: float = 1e-12  # flatness bound on fine-grained amplitudes
    bleach: float = 1e-10          # trace-distance bound for bleached outputs


DEFAULT_TOL = Tolerances()

# Dense-vector dimension budget: operations refuse to build joint spaces
# larger than this.
DIM_BUDGET = 2 ** 14
