"""Link product and factor-network contraction.

The link product ``A * B = Tr_S[A^{T_S} B]`` (S the shared labels) composes
Choi operators of circuit fragments.  A :class:`FactorNetwork` is an implicit
tensor product of labeled operators in which every label name occurs at most
twice; contraction eliminates each shared label exactly once, so the network
value never has to be materialized as one dense matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ContractTooLargeError,
    DimMismatchError,
    MalformedNetworkError,
)
from .tensors import LabeledOperator, scalar_operator


def link(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """Link product of two labeled operators.

    The result carries the symmetric difference of the label sets: shared
    labels are contracted (with the partial transpose on ``a``'s side, which
    is where the link product differs from a plain trace), disjoint labels
    survive.  With no shared labels this reduces to the tensor product; with
    identical label sets it reduces to the scalar ``Tr[a^T b]``.
    """
    shared = sorted(set(a.names) & set(b.names))
    for name in shared:
        if a.label(name).dim != b.label(name).dim:
            raise DimMismatchError(
                f"shared label {name!r} has dims "
                f"{a.label(name).dim} vs {b.label(name).dim}"
            )
    keep_a = [n for n in a.names if n not in shared]
    keep_b = [n for n in b.names if n not in shared]
    ap = a.permuted([*keep_a, *shared])
    bp = b.permuted([*shared, *keep_b])
    da = math.prod(ap.label(n).dim for n in keep_a)
    ds = math.prod(ap.label(n).dim for n in shared)
    db = math.prod(bp.label(n).dim for n in keep_b)

    # C[a,k,b,l] = sum_{u,v} A[a,u,b,v] B[u,k,v,l] realizes Tr_S[A^{T_S} B].
    ta = ap.data.reshape(da, ds, da, ds)
    tb = bp.data.reshape(ds, db, ds, db)
    out = np.tensordot(ta, tb, axes=((1, 3), (0, 2)))  # [a, b, k, l]
    out = out.transpose(0, 2, 1, 3).reshape(da * db, da * db)
    labels = ap.labels[: len(keep_a)] + bp.labels[len(shared) :]
    return LabeledOperator(labels, out, copy=False)


@dataclass(frozen=True)
class FactorNetwork:
    """An unordered collection of factors joined by the link product."""

    factors: tuple[LabeledOperator, ...]

    def __init__(self, factors: Iterable[LabeledOperator]):
        factors = tuple(factors)
        seen: dict[str, int] = {}
        for f in factors:
            for lab in f.labels:
                prev = seen.get(lab.name)
                if prev is None:
                    seen[lab.name] = lab.dim
                elif prev == -1:
                    raise MalformedNetworkError(
                        f"label {lab.name!r} occurs in more than two factors"
                    )
                else:
                    if prev != lab.dim:
                        raise DimMismatchError(
                            f"label {lab.name!r} has dims {prev} vs {lab.dim}"
                        )
                    seen[lab.name] = -1
        object.__setattr__(self, "factors", factors)

    def __len__(self):
        return len(self.factors)

    def extended(self, more: Iterable[LabeledOperator]) -> "FactorNetwork":
        return FactorNetwork(self.factors + tuple(more))

    def open_labels(self) -> tuple[str, ...]:
        """Labels occurring exactly once (they survive full contraction)."""
        counts: dict[str, int] = {}
        for f in self.factors:
            for name in f.names:
                counts[name] = counts.get(name, 0) + 1
        return tuple(sorted(n for n, c in counts.items() if c == 1))


@dataclass(frozen=True)
class PlanStep:
    """One pairwise merge: positions refer to the current factor list.

    Both operands are removed and the result is appended at the end, the same
    bookkeeping convention einsum path optimizers use.
    """

    pair: tuple[int, int]
    result_dim: int
    result_labels: tuple[str, ...]


@dataclass(frozen=True)
class ContractionPlan:
    steps: tuple[PlanStep, ...]
    peak_dim: int

    def to_json_dict(self) -> dict:
        return {
            "steps": [
                {
                    "pair": list(s.pair),
                    "result_dim": s.result_dim,
                    "result_labels": list(s.result_labels),
                }
                for s in self.steps
            ],
            "peak_dim": self.peak_dim,
        }


def _merge_signature(names_a, names_b, dims: dict[str, int]) -> tuple[int, tuple, tuple]:
    result = sorted(set(names_a) ^ set(names_b))
    result_dim = math.prod(dims[n] for n in result)
    sig_a, sig_b = sorted((tuple(sorted(names_a)), tuple(sorted(names_b))))
    return result_dim, sig_a, sig_b


def plan_contraction(network: FactorNetwork) -> ContractionPlan:
    """Greedy pairwise plan: always merge the pair with the smallest result.

    Ties are broken by the lexicographic order of the operands' sorted label
    names (then by position), so the plan is deterministic.
    """
    dims: dict[str, int] = {}
    for f in network.factors:
        for lab in f.labels:
            dims[lab.name] = lab.dim
    work: list[tuple[str, ...]] = [f.names for f in network.factors]
    steps: list[PlanStep] = []
    peak = max((f.dim for f in network.factors), default=1)
    while len(work) > 1:
        best = None
        best_key = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                key = _merge_signature(work[i], work[j], dims)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
        i, j = best
        result = tuple(sorted(set(work[i]) ^ set(work[j])))
        result_dim = best_key[0]
        peak = max(peak, result_dim)
        steps.append(PlanStep(pair=(i, j), result_dim=result_dim, result_labels=result))
        del work[j], work[i]
        work.append(result)
    return ContractionPlan(steps=tuple(steps), peak_dim=peak)


def contract(
    network: FactorNetwork,
    order: Sequence[tuple[int, int]] | None = None,
    *,
    max_dim: int | None = None,
) -> LabeledOperator:
    """Contract a network down to a single operator (a scalar if closed).

    ``order`` optionally fixes the merge sequence (same pair convention as
    :class:`PlanStep`); by default the greedy plan is used.  ``max_dim``
    aborts with :class:`ContractTooLargeError` before an intermediate larger
    than the cap would be materialized.
    """
    if len(network.factors) == 0:
        return scalar_operator(1.0)
    if order is None:
        order = [s.pair for s in plan_contraction(network).steps]
    work = list(network.factors)
    for pair in order:
        i, j = pair
        if i == j or not (0 <= i < len(work)) or not (0 <= j < len(work)):
            raise MalformedNetworkError(f"invalid contraction step {pair!r}")
        i, j = min(i, j), max(i, j)
        a, b = work[i], work[j]
        if max_dim is not None:
            result_dim = math.prod(
                lab.dim
                for op in (a, b)
                for lab in op.labels
                if (lab.name in set(a.names) ^ set(b.names))
            )
            if result_dim > max_dim:
                raise ContractTooLargeError(
                    f"intermediate of dimension {result_dim} exceeds cap {max_dim}"
                )
        merged = link(a, b)
        del work[j], work[i]
        work.append(merged)
    if len(work) != 1:
        raise MalformedNetworkError(
            f"contraction order leaves {len(work)} factors unmerged"
        )
    return work[0]


def contract_scalar(
    network: FactorNetwork,
    *,
    max_dim: int | None = None,
    imag_tol: float = 1e-7,
) -> float:
    """Contract a closed network to a real number.

    Raises if the network has open labels or the result has a significant
    imaginary part (which would indicate a wiring bug, not physics).
    """
    open_labels = network.open_labels()
    if open_labels:
        raise MalformedNetworkError(f"network has open labels {open_labels}")
    value = contract(network, max_dim=max_dim).data[0, 0]
    if abs(value.imag) > imag_tol * max(1.0, abs(value.real)):
        raise MalformedNetworkError(
            f"closed network contracted to non-real value {value}"
        )
    return float(value.real)
