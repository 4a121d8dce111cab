"""Exact evaluation of partition functions by exhaustive enumeration.

``partition_function`` sums over all ``q**|V|`` assignments;
``pinned_partition`` fixes the labeled variables and sums over the
``q**|unlabeled|`` extensions.  Evaluation order is lexicographic over the
instance's stable variable ordering, and a hard term cap keeps #P-hardness
from turning into a hang.
"""

from __future__ import annotations

from typing import Optional

from .algebra import Scalar
from .instances import CFSet, LabeledInstance, PinMap

DEFAULT_TERM_CAP = 10_000_000


class TermCapExceeded(RuntimeError):
    def __init__(self, terms: int, cap: int):
        super().__init__(f"enumeration needs {terms} terms, cap is {cap}")
        self.terms = terms
        self.cap = cap


def assignment_count(q: int, free_variables: int) -> int:
    return q ** free_variables


def _compiled_constraints(fset: CFSet, inst: LabeledInstance, position):
    compiled = []
    for j, vs in inst.constraints:
        fn = fset.functions[j]
        compiled.append((fn.entries, tuple(position[v] for v in vs)))
    return compiled


def pinned_partition(
    fset: CFSet,
    inst: LabeledInstance,
    psi: PinMap,
    cap: Optional[int] = None,
) -> Scalar:
    """``Z^psi``: sum over extensions of the pinning, already normalized by
    the pinned weights (only unlabeled variables contribute weight factors)."""
    inst.validate_against(fset)
    q = fset.q
    if len(psi) != inst.k:
        raise ValueError(f"pin map has {len(psi)} values, instance has k={inst.k}")
    if any(not 0 <= x < q for x in psi):
        raise ValueError("pin value out of domain range")
    cap = DEFAULT_TERM_CAP if cap is None else cap

    free = inst.unlabeled_variables()
    terms = assignment_count(q, len(free))
    if terms > cap:
        raise TermCapExceeded(terms, cap)

    # Variable order: labeled first (fixed), then free in stable order.
    order = list(inst.labels) + list(free)
    position = {v: i for i, v in enumerate(order)}
    compiled = _compiled_constraints(fset, inst, position)
    weights = fset.weights

    phi = list(psi) + [0] * len(free)
    n_lab = len(psi)
    n_free = len(free)
    total: Scalar = 0
    while True:
        term: Scalar = 1
        if weights is not None:
            for i in range(n_lab, n_lab + n_free):
                term = term * weights[phi[i]]
        if term != 0:
            for entries, positions in compiled:
                idx = 0
                for p in positions:
                    idx = idx * q + phi[p]
                value = entries[idx]
                if value == 0:
                    term = 0
                    break
                term = term * value
        total = total + term
        # next assignment over the free suffix, lexicographic
        pos = n_lab + n_free - 1
        while pos >= n_lab and phi[pos] == q - 1:
            phi[pos] = 0
            pos -= 1
        if pos < n_lab:
            return total
        phi[pos] += 1


def partition_function(fset: CFSet, inst: LabeledInstance, cap: Optional[int] = None) -> Scalar:
    """``Z_{F,alpha}``: labels are ignored; every variable is summed."""
    unlabeled = LabeledInstance(inst.variables, inst.constraints, ())
    return pinned_partition(fset, unlabeled, (), cap=cap)


def pinned_profile(fset: CFSet, inst: LabeledInstance, cap: Optional[int] = None):
    """All pinned values ``psi -> Z^psi`` as a dict, mostly for tests."""
    from .algebra import all_tuples

    return {
        psi: pinned_partition(fset, inst, psi, cap=cap)
        for psi in all_tuples(fset.q, inst.k)
    }
