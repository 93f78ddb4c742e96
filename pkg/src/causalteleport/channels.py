"""Choi-form channels, instruments, CPTP verification, random generators.

A channel from the spaces ``in_labels`` to ``out_labels`` is stored as its
Choi operator ``M = (id (x) channel)(|1>><<1|)``; applying it to a state is a
link product over the input labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadDimensionError,
    DimMismatchError,
    LabelMismatchError,
    ShapeMismatchError,
)
from .linkprod import link
from .tensors import LabeledOperator, SpaceLabel, partial_trace


def as_rng(seed) -> np.random.Generator:
    """Accept an int seed, a seed sequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class ChoiOperator:
    """A labeled operator with a declared input/output label partition."""

    op: LabeledOperator
    in_labels: tuple[str, ...]
    out_labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "in_labels", tuple(self.in_labels))
        object.__setattr__(self, "out_labels", tuple(self.out_labels))
        declared = set(self.in_labels) | set(self.out_labels)
        if len(self.in_labels) + len(self.out_labels) != len(declared):
            raise LabelMismatchError("in/out label sets must be disjoint")
        if declared != set(self.op.names):
            raise LabelMismatchError(
                f"in/out partition {declared} does not cover operator labels "
                f"{set(self.op.names)}"
            )

    @property
    def in_dim(self) -> int:
        return math.prod(self.op.label(n).dim for n in self.in_labels)

    @property
    def out_dim(self) -> int:
        return math.prod(self.op.label(n).dim for n in self.out_labels)

    def renamed(self, mapping) -> "ChoiOperator":
        return ChoiOperator(
            op=self.op.renamed(mapping),
            in_labels=tuple(mapping.get(n, n) for n in self.in_labels),
            out_labels=tuple(mapping.get(n, n) for n in self.out_labels),
        )


@dataclass(frozen=True)
class Instrument:
    """Outcome-indexed family of CP maps summing to a CPTP channel."""

    elements: tuple[ChoiOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ShapeMismatchError("instrument needs at least one outcome")
        first = self.elements[0]
        for el in self.elements[1:]:
            if set(el.in_labels) != set(first.in_labels) or set(el.out_labels) != set(
                first.out_labels
            ):
                raise LabelMismatchError("instrument elements disagree on labels")

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, a: int) -> ChoiOperator:
        return self.elements[a]

    @property
    def in_labels(self) -> tuple[str, ...]:
        return self.elements[0].in_labels

    @property
    def out_labels(self) -> tuple[str, ...]:
        return self.elements[0].out_labels

    def summed(self) -> ChoiOperator:
        total = self.elements[0].op
        for el in self.elements[1:]:
            total = total + el.op
        return ChoiOperator(total, self.in_labels, self.out_labels)

    def renamed(self, mapping) -> "Instrument":
        return Instrument(tuple(el.renamed(mapping) for el in self.elements))


@dataclass(frozen=True)
class CptpReport:
    is_cp: bool
    is_tp: bool
    ok: bool
    min_eigenvalue: float
    trace_deviation: float
    hermiticity_deviation: float


def choi_from_kraus(
    kraus: Sequence[np.ndarray], in_label: SpaceLabel, out_label: SpaceLabel
) -> ChoiOperator:
    """Choi operator ``sum_k (1 (x) K_k)|1>><<1|(1 (x) K_k)^dag``.

    Kraus matrices map the input space to the output space, so they have
    shape ``(out_dim, in_dim)``.
    """
    d_in, d_out = in_label.dim, out_label.dim
    mats = [np.asarray(k, dtype=np.complex128) for k in kraus]
    for k in mats:
        if k.shape != (d_out, d_in):
            raise ShapeMismatchError(
                f"Kraus matrix has shape {k.shape}, expected {(d_out, d_in)}"
            )
    total = np.zeros((d_in * d_out, d_in * d_out), dtype=np.complex128)
    for k in mats:
        vec = np.reshape(k.T, -1)  # v[(j, a)] = K[a, j]
        total += np.outer(vec, vec.conj())
    op = LabeledOperator((in_label, out_label), total, copy=False)
    return ChoiOperator(op, (in_label.name,), (out_label.name,))


def _min_eigenvalue(matrix: np.ndarray, tol: float) -> float | None:
    """Smallest eigenvalue, or None when a Cholesky probe already certifies
    that it is above ``-tol`` (cheaper than a full decomposition for large
    matrices)."""
    dim = matrix.shape[0]
    if dim > 1024:
        try:
            np.linalg.cholesky(matrix + tol * np.eye(dim))
            return None
        except np.linalg.LinAlgError:
            pass
    return float(np.linalg.eigvalsh(matrix)[0])


def is_cptp(c: ChoiOperator, tol: float = 1e-9) -> CptpReport:
    """Certify complete positivity and trace preservation of a Choi operator."""
    m = c.op.data
    herm_dev = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    herm = (m + m.conj().T) / 2.0
    min_eig = _min_eigenvalue(herm, tol)
    is_cp = True if min_eig is None else min_eig >= -tol
    reduced = partial_trace(c.op, c.out_labels)
    reduced = reduced.permuted([n for n in c.op.names if n in set(c.in_labels)])
    trace_dev = float(
        np.max(np.abs(reduced.data - np.eye(reduced.dim)), initial=0.0)
    )
    is_tp = trace_dev <= tol
    return CptpReport(
        is_cp=is_cp,
        is_tp=is_tp,
        ok=is_cp and is_tp and herm_dev <= math.sqrt(tol),
        min_eigenvalue=math.nan if min_eig is None else min_eig,
        trace_deviation=trace_dev,
        hermiticity_deviation=herm_dev,
    )


def apply_channel(c: ChoiOperator, state: LabeledOperator) -> LabeledOperator:
    """Apply a channel to a state living on exactly the input labels."""
    if set(state.names) != set(c.in_labels):
        raise LabelMismatchError(
            f"state labels {state.names} do not match channel input {c.in_labels}"
        )
    for name in state.names:
        if state.label(name).dim != c.op.label(name).dim:
            raise DimMismatchError(f"dimension mismatch on label {name!r}")
    return link(state, c.op)


def random_unitary(d: int, seed) -> np.ndarray:
    """Haar-distributed unitary from QR of a seeded complex-Gaussian matrix."""
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    rng = as_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_state(d: int, seed, name: str = "S") -> LabeledOperator:
    """Full-rank random density operator (Gaussian square, normalized)."""
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    rng = as_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return LabeledOperator((SpaceLabel(name, d),), rho, copy=False)


def random_pure_state(d: int, seed) -> np.ndarray:
    """Haar-random unit vector."""
    rng = as_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _stinespring_kraus(d_in: int, d_out: int, rng: np.random.Generator) -> list[np.ndarray]:
    # Isometry d_in -> d_out * d_env with d_env = d_in * d_out, sliced by env index.
    d_env = d_in * d_out
    u = random_unitary(d_out * d_env, rng)
    iso = u[:, :d_in].reshape(d_out, d_env, d_in)
    return [iso[:, e, :] for e in range(d_env)]


def random_cptp(
    d_in: int, d_out: int, seed, labels: Sequence[str] = ("I", "O")
) -> ChoiOperator:
    """Generic full-rank CPTP channel via a random Stinespring dilation."""
    if d_in < 1 or d_out < 1:
        raise BadDimensionError("channel dimensions must be >= 1")
    rng = as_rng(seed)
    kraus = _stinespring_kraus(d_in, d_out, rng)
    i_name, o_name = labels
    return choi_from_kraus(kraus, SpaceLabel(i_name, d_in), SpaceLabel(o_name, d_out))


def random_instrument(
    d_in: int,
    d_out: int,
    n_outcomes: int,
    seed,
    labels: Sequence[str] = ("I", "O"),
) -> Instrument:
    """Random instrument: a Stinespring environment split into outcome bins."""
    if d_in < 1 or d_out < 1:
        raise BadDimensionError("instrument dimensions must be >= 1")
    d_env = d_in * d_out
    if not 1 <= n_outcomes <= d_env:
        raise BadDimensionError(
            f"n_outcomes must lie in [1, {d_env}], got {n_outcomes}"
        )
    rng = as_rng(seed)
    kraus = _stinespring_kraus(d_in, d_out, rng)
    i_name, o_name = labels
    in_label, out_label = SpaceLabel(i_name, d_in), SpaceLabel(o_name, d_out)
    groups = np.array_split(np.arange(d_env), n_outcomes)
    elements = [
        choi_from_kraus([kraus[e] for e in group], in_label, out_label)
        for group in groups
    ]
    return Instrument(tuple(elements))
