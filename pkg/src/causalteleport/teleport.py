"""Generalized d-dimensional teleportation primitives.

The maximally entangled basis is ``|psi_nm> = (1/sqrt(d)) sum_j
exp(2 pi i j n / d) |j> (x) |(j+m) mod d>`` with correction unitaries
``U_nm = sum_k exp(2 pi i k n / d) |k><(k+m) mod d|``; outcome ``(n, m)``
needs no correction exactly when it is ``(0, 0)``.  Measurement outcomes are
carried by genuine d^2-dimensional message systems in the computational
basis, so the whole protocol stays inside the Choi/link formalism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChoiOperator, Instrument, as_rng, choi_from_kraus, random_pure_state
from .errors import BadDimensionError, BadStateError, IndexOutOfRangeError
from .tensors import LabeledOperator, SpaceLabel, tensor_product


@dataclass(frozen=True)
class BellIndex:
    """Double index (n, m) of the generalized Bell basis, flat = n*d + m."""

    d: int
    n: int
    m: int

    def __post_init__(self):
        if not (0 <= self.n < self.d and 0 <= self.m < self.d):
            raise IndexOutOfRangeError(
                f"(n, m) = ({self.n}, {self.m}) out of range for d = {self.d}"
            )

    @property
    def flat(self) -> int:
        return self.n * self.d + self.m

    @classmethod
    def from_flat(cls, d: int, flat: int) -> "BellIndex":
        if not 0 <= flat < d * d:
            raise IndexOutOfRangeError(f"flat index {flat} out of range for d = {d}")
        return cls(d=d, n=flat // d, m=flat % d)


def bell_state(d: int, n: int, m: int) -> np.ndarray:
    """Unit vector |psi_nm> on a d x d bipartite space."""
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    BellIndex(d, n, m)
    vec = np.zeros(d * d, dtype=np.complex128)
    js = np.arange(d)
    vec[js * d + (js + m) % d] = np.exp(2j * np.pi * js * n / d) / math.sqrt(d)
    return vec


def correction_unitary(d: int, n: int, m: int) -> np.ndarray:
    """U_nm, the generalized Pauli correcting outcome (n, m); U_00 = identity."""
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    BellIndex(d, n, m)
    u = np.zeros((d, d), dtype=np.complex128)
    ks = np.arange(d)
    u[ks, (ks + m) % d] = np.exp(2j * np.pi * ks * n / d)
    return u


def _basis_projector(label: SpaceLabel, index: int) -> LabeledOperator:
    mat = np.zeros((label.dim, label.dim), dtype=np.complex128)
    mat[index, index] = 1.0
    return LabeledOperator((label,), mat, copy=False)


def _conj_bell_projector(d: int, in_a: str, in_b: str, flat: int) -> LabeledOperator:
    vec = bell_state(d, flat // d, flat % d).conj()
    op = np.outer(vec, vec.conj())
    return LabeledOperator((SpaceLabel(in_a, d), SpaceLabel(in_b, d)), op, copy=False)


def bsm_instrument(d: int, in_label_a: str, in_label_b: str, message_label: str) -> Instrument:
    """Bell state measurement that emits its outcome into a d^2-dim message.

    Outcome ``flat`` applies the Kraus operator ``|flat>_msg <psi_flat|`` to
    the pair ``(in_a, in_b)``; the Choi operator of that branch is
    ``|psi*_flat><psi*_flat| (x) |flat><flat|``.
    """
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    msg = SpaceLabel(message_label, d * d)
    elements = []
    for flat in range(d * d):
        op = tensor_product(
            _conj_bell_projector(d, in_label_a, in_label_b, flat),
            _basis_projector(msg, flat),
        )
        elements.append(ChoiOperator(op, (in_label_a, in_label_b), (message_label,)))
    return Instrument(tuple(elements))


def bsm_postselect0(d: int, in_label_a: str, in_label_b: str) -> ChoiOperator:
    """POVM element keeping only the correction-free outcome (0, 0).

    Returned as a trace-non-increasing Choi operator with trivial output;
    it equals outcome 0 of :func:`bsm_instrument` with the message discarded.
    """
    op = _conj_bell_projector(d, in_label_a, in_label_b, 0)
    return ChoiOperator(op, (in_label_a, in_label_b), ())


def cu_instrument(d: int, message_label: str, probe_label: str, out_label: str) -> ChoiOperator:
    """Correction channel: read the message, apply the matching U_m.

    CPTP from (message, probe) to the output; the Kraus set is
    ``{U_m (x) <m|}`` over all d^2 outcomes.
    """
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    msg = SpaceLabel(message_label, d * d)
    probe = SpaceLabel(probe_label, d)
    out = SpaceLabel(out_label, d)
    total = None
    for flat in range(d * d):
        u = correction_unitary(d, flat // d, flat % d)
        branch = tensor_product(
            _basis_projector(msg, flat),
            choi_from_kraus([u], probe, out).op,
        )
        total = branch if total is None else total + branch
    return ChoiOperator(total, (message_label, probe_label), (out_label,))


@dataclass(frozen=True)
class TeleportOutcome:
    n: int
    m: int
    flat: int
    probability: float
    fidelity: float


@dataclass(frozen=True)
class TeleportReport:
    d: int
    state: np.ndarray
    outcomes: tuple[TeleportOutcome, ...]

    @property
    def max_probability_deviation(self) -> float:
        return max(abs(o.probability - 1.0 / self.d**2) for o in self.outcomes)

    @property
    def min_fidelity(self) -> float:
        return min(o.fidelity for o in self.outcomes)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.d,
            "state": [[float(z.real), float(z.imag)] for z in self.state],
            "outcomes": [
                {
                    "n": o.n,
                    "m": o.m,
                    "flat": o.flat,
                    "probability": o.probability,
                    "fidelity": o.fidelity,
                }
                for o in self.outcomes
            ],
            "max_probability_deviation": self.max_probability_deviation,
            "min_fidelity": self.min_fidelity,
        }


def teleport_state_demo(d: int, psi: np.ndarray | None = None, seed=0) -> TeleportReport:
    """Run the single-state teleportation protocol at the vector level.

    For each Bell outcome the report carries the outcome probability (always
    1/d^2) and the fidelity of the corrected conditional state with the
    input (always 1).  ``psi`` defaults to a Haar-random state drawn from
    ``seed``.
    """
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    if psi is None:
        psi = random_pure_state(d, seed)
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (d,):
        raise BadStateError(f"state must be a vector of length {d}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise BadStateError("state must be normalized")

    phi_plus = np.zeros(d * d, dtype=np.complex128)
    phi_plus[:: d + 1] = 1.0 / math.sqrt(d)
    joint = np.kron(psi, phi_plus).reshape(d, d, d)  # axes (A, A', B)

    outcomes = []
    for n in range(d):
        for m in range(d):
            bell = bell_state(d, n, m).reshape(d, d)
            amp = np.tensordot(bell.conj(), joint, axes=([0, 1], [0, 1]))
            prob = float(np.vdot(amp, amp).real)
            corrected = correction_unitary(d, n, m) @ amp
            fid = float(abs(np.vdot(psi, corrected)) ** 2 / prob)
            outcomes.append(
                TeleportOutcome(
                    n=n, m=m, flat=n * d + m, probability=prob, fidelity=fid
                )
            )
    return TeleportReport(d=d, state=psi, outcomes=tuple(outcomes))
