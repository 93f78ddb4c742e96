"""Labeled dense-operator algebra.

Every quantum object in this package (states, Choi operators, POVM elements,
process matrices) is carried by :class:`LabeledOperator`: a square complex
matrix over an ordered list of named finite-dimensional spaces.  Row and
column index both enumerate the full tensor product in mixed-radix order,
first label most significant, so ``data.reshape(dims + dims)`` exposes one
axis pair per label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadDimensionError,
    LabelCollisionError,
    LabelMismatchError,
    NotAPermutationError,
    ShapeMismatchError,
    UnknownLabelError,
)

DEFAULT_ATOL = 1e-9


@dataclass(frozen=True)
class SpaceLabel:
    """A named Hilbert-space factor with a fixed dimension."""

    name: str
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        if not self.name:
            raise LabelCollisionError("label name must be nonempty")
        if self.dim < 1:
            raise BadDimensionError(f"dimension of label {self.name!r} must be >= 1")


class LabeledOperator:
    """Square complex matrix over an ordered tuple of :class:`SpaceLabel`.

    Instances are immutable: the underlying array is marked read-only and all
    operations return new objects, so values can be shared freely between
    threads and factor networks.
    """

    __slots__ = ("labels", "data")

    def __init__(self, labels: Sequence[SpaceLabel], data, *, copy: bool = True):
        labels = tuple(labels)
        names = [lab.name for lab in labels]
        if len(set(names)) != len(names):
            raise LabelCollisionError(f"duplicate label names in {names}")
        dim = math.prod(lab.dim for lab in labels)
        arr = np.array(data, dtype=np.complex128, copy=copy)
        if arr.shape != (dim, dim):
            raise ShapeMismatchError(
                f"data shape {arr.shape} does not match label dimension {dim}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LabeledOperator is immutable")

    # -- basic introspection ------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(lab.name for lab in self.labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(lab.dim for lab in self.labels)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def axis_shape(self) -> tuple[int, ...]:
        """Shape with one row axis and one column axis per label."""
        return self.dims + self.dims

    def label(self, name: str) -> SpaceLabel:
        for lab in self.labels:
            if lab.name == name:
                return lab
        raise UnknownLabelError(f"no label named {name!r} in {self.names}")

    def position(self, name: str) -> int:
        for k, lab in enumerate(self.labels):
            if lab.name == name:
                return k
        raise UnknownLabelError(f"no label named {name!r} in {self.names}")

    def __repr__(self):
        spec = ", ".join(f"{lab.name}:{lab.dim}" for lab in self.labels)
        return f"LabeledOperator([{spec}], dim={self.dim})"

    # -- arithmetic ---------------------------------------------------------

    def _aligned(self, other: "LabeledOperator") -> "LabeledOperator":
        if set(other.names) != set(self.names):
            raise LabelMismatchError(
                f"label sets differ: {self.names} vs {other.names}"
            )
        return other.permuted(self.names)

    def __add__(self, other):
        other = self._aligned(other)
        return LabeledOperator(self.labels, self.data + other.data, copy=False)

    def __sub__(self, other):
        other = self._aligned(other)
        return LabeledOperator(self.labels, self.data - other.data, copy=False)

    def __mul__(self, scalar):
        return LabeledOperator(self.labels, self.data * complex(scalar), copy=False)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return LabeledOperator(self.labels, self.data / complex(scalar), copy=False)

    def __neg__(self):
        return LabeledOperator(self.labels, -self.data, copy=False)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def conj(self) -> "LabeledOperator":
        return LabeledOperator(self.labels, self.data.conj(), copy=False)

    def transpose(self) -> "LabeledOperator":
        return LabeledOperator(self.labels, self.data.T, copy=True)

    def adjoint(self) -> "LabeledOperator":
        return LabeledOperator(self.labels, self.data.conj().T, copy=True)

    # -- label surgery ------------------------------------------------------

    def permuted(self, order: Sequence[str]) -> "LabeledOperator":
        """Return the same abstract operator with labels in the given order."""
        order = tuple(order)
        if order == self.names:
            return self
        if sorted(order) != sorted(self.names):
            raise NotAPermutationError(
                f"{order} is not a permutation of {self.names}"
            )
        perm = [self.position(name) for name in order]
        n = len(self.labels)
        tensor = self.data.reshape(self.axis_shape)
        tensor = tensor.transpose([*perm, *(p + n for p in perm)])
        labels = tuple(self.labels[p] for p in perm)
        dim = self.dim
        return LabeledOperator(labels, tensor.reshape(dim, dim), copy=False)

    def renamed(self, mapping: Mapping[str, str]) -> "LabeledOperator":
        """Rename labels (dimensions and data unchanged)."""
        for old in mapping:
            self.position(old)
        labels = tuple(
            SpaceLabel(mapping.get(lab.name, lab.name), lab.dim) for lab in self.labels
        )
        return LabeledOperator(labels, self.data, copy=False)

    def split_label(self, name: str, parts: Sequence[SpaceLabel]) -> "LabeledOperator":
        """Replace one label by a tuple of labels with the same total dimension.

        The mixed-radix index convention makes this a pure relabeling: no data
        moves.
        """
        parts = tuple(parts)
        k = self.position(name)
        if math.prod(p.dim for p in parts) != self.labels[k].dim:
            raise BadDimensionError(
                f"parts of {name!r} must multiply to dim {self.labels[k].dim}"
            )
        labels = self.labels[:k] + parts + self.labels[k + 1 :]
        return LabeledOperator(labels, self.data, copy=False)

    def merged_labels(self, names: Sequence[str], new_name: str) -> "LabeledOperator":
        """Fuse a group of labels into one label appended at the end.

        An empty group inserts a fresh one-dimensional label, which keeps the
        degenerate ``d = 1`` protocol cases uniform.
        """
        names = tuple(names)
        rest = [n for n in self.names if n not in names]
        if len(rest) + len(names) != len(self.labels):
            raise UnknownLabelError(f"{names} not all present in {self.names}")
        moved = self.permuted([*rest, *names])
        merged_dim = math.prod(moved.label(n).dim for n in names) if names else 1
        labels = tuple(moved.labels[: len(rest)]) + (SpaceLabel(new_name, merged_dim),)
        return LabeledOperator(labels, moved.data, copy=False)

    # -- comparison ---------------------------------------------------------

    def allclose(self, other: "LabeledOperator", atol: float = DEFAULT_ATOL) -> bool:
        """Equality up to label permutation, entrywise within ``atol``."""
        if sorted(self.names) != sorted(other.names):
            return False
        order = sorted(self.names)
        a = self.permuted(order)
        b = other.permuted(order)
        if a.dims != b.dims:
            return False
        return bool(np.max(np.abs(a.data - b.data), initial=0.0) <= atol)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data), initial=0.0))

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        """JSON form: labels plus row-major nesting of [re, im] entries."""
        d = self.dim
        re = self.data.real
        im = self.data.imag
        return {
            "labels": [{"name": lab.name, "dim": lab.dim} for lab in self.labels],
            "data": [
                [[float(re[i, j]), float(im[i, j])] for j in range(d)]
                for i in range(d)
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "LabeledOperator":
        labels = [SpaceLabel(entry["name"], entry["dim"]) for entry in obj["labels"]]
        raw = np.asarray(obj["data"], dtype=float)
        dim = math.prod(lab.dim for lab in labels)
        if raw.shape != (dim, dim, 2):
            raise ShapeMismatchError(
                f"serialized data has shape {raw.shape}, expected {(dim, dim, 2)}"
            )
        return cls(labels, raw[..., 0] + 1j * raw[..., 1])


def scalar_operator(value: complex) -> LabeledOperator:
    """A LabeledOperator with no labels (1x1 matrix)."""
    return LabeledOperator((), [[value]])


def identity_operator(labels: Sequence[SpaceLabel]) -> LabeledOperator:
    dim = math.prod(lab.dim for lab in labels)
    return LabeledOperator(tuple(labels), np.eye(dim), copy=False)


def tensor_product(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """Kronecker product; ``a``'s labels come first and stay most significant."""
    if set(a.names) & set(b.names):
        raise LabelCollisionError(
            f"labels {set(a.names) & set(b.names)} appear in both factors"
        )
    return LabeledOperator(a.labels + b.labels, np.kron(a.data, b.data), copy=False)


def tensor_many(factors: Iterable[LabeledOperator]) -> LabeledOperator:
    out = scalar_operator(1.0)
    for f in factors:
        out = tensor_product(out, f)
    return out


def partial_trace(a: LabeledOperator, over: Iterable[str]) -> LabeledOperator:
    """Trace out the named labels; tracing all labels leaves a scalar."""
    over = set(over)
    out = a
    for name in [n for n in a.names if n in over]:
        over.discard(name)
        k = out.position(name)
        n = len(out.labels)
        tensor = out.data.reshape(out.axis_shape)
        traced = np.trace(tensor, axis1=k, axis2=n + k)
        labels = out.labels[:k] + out.labels[k + 1 :]
        dim = out.dim // out.labels[k].dim
        out = LabeledOperator(labels, traced.reshape(dim, dim), copy=False)
    if over:
        raise UnknownLabelError(f"labels {over} not present in {a.names}")
    return out


def partial_transpose(a: LabeledOperator, on: Iterable[str]) -> LabeledOperator:
    """Transpose the row/column axes of the named labels only."""
    on = set(on)
    unknown = on - set(a.names)
    if unknown:
        raise UnknownLabelError(f"labels {unknown} not present in {a.names}")
    if not on:
        return a
    n = len(a.labels)
    perm = list(range(2 * n))
    for k, lab in enumerate(a.labels):
        if lab.name in on:
            perm[k], perm[n + k] = perm[n + k], perm[k]
    tensor = a.data.reshape(a.axis_shape).transpose(perm)
    return LabeledOperator(a.labels, tensor.reshape(a.dim, a.dim), copy=False)


def permute_labels(a: LabeledOperator, order: Sequence[str]) -> LabeledOperator:
    return a.permuted(order)


def depolarize_on(a: LabeledOperator, x: str) -> LabeledOperator:
    """Trace-and-refill one label: keep everything else, replace ``x`` by 1/d.

    Idempotent and trace preserving; the label order is unchanged.
    """
    k = a.position(x)
    d = a.labels[k].dim
    n = len(a.labels)
    tensor = a.data.reshape(a.axis_shape)
    traced = np.trace(tensor, axis1=k, axis2=n + k) / d
    out = np.zeros(a.axis_shape, dtype=np.complex128)
    view = np.moveaxis(out, (k, n + k), (0, 1))
    for i in range(d):
        view[i, i] = traced
    return LabeledOperator(a.labels, out.reshape(a.dim, a.dim), copy=False)


def depolarize_subset(a: LabeledOperator, names: Iterable[str]) -> LabeledOperator:
    """Joint trace-and-refill over several labels (order irrelevant)."""
    out = a
    for name in names:
        out = depolarize_on(out, name)
    return out


def residual_on(a: LabeledOperator, x: str) -> LabeledOperator:
    """The complement of :func:`depolarize_on`: ``a - depolarize_on(a, x)``."""
    return a - depolarize_on(a, x)


def residual_subset(a: LabeledOperator, names: Iterable[str]) -> LabeledOperator:
    """Joint residual of a label group, ``a`` minus its joint depolarization.

    Note this is not the composition of single-label residuals unless the
    group has one element.
    """
    return a - depolarize_subset(a, names)


def _pair_labels(d: int, labels: Sequence[str]) -> tuple[SpaceLabel, SpaceLabel]:
    first, second = labels
    return SpaceLabel(first, d), SpaceLabel(second, d)


def max_entangled_state(d: int, labels: Sequence[str]) -> LabeledOperator:
    """|Phi+><Phi+| with Phi+ = (1/sqrt(d)) sum_j |jj> on a pair of labels."""
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    vec = np.zeros(d * d, dtype=np.complex128)
    vec[:: d + 1] = 1.0 / math.sqrt(d)
    return LabeledOperator(_pair_labels(d, labels), np.outer(vec, vec.conj()), copy=False)


def unnormalized_me_vector_op(d: int, labels: Sequence[str]) -> LabeledOperator:
    """|1>><<1| = d * |Phi+><Phi+|: the Choi operator of the identity channel."""
    if d < 1:
        raise BadDimensionError(f"d must be >= 1, got {d}")
    return d * max_entangled_state(d, labels)


def operators_close(
    a: LabeledOperator, b: LabeledOperator, atol: float = DEFAULT_ATOL
) -> bool:
    return a.allclose(b, atol=atol)
