"""
Enumeration and addressing of the auxiliary-density-operator labels of a
hierarchy.

Bosonic labels are tuples of non-negative integers, one per bath exponent,
truncated by total level ``sum(label) <= cutoff``.  Fermionic labels are
binary occupation tuples with at most ``cutoff`` ones.  Labels are ordered
level-major and, within a level, in descending lexicographic order; the
zero label (the system density matrix) is always at offset 0.
"""

import itertools
from math import comb

__all__ = [
    "HierarchySpace",
    "enumerate_space",
    "fermionic_insertion_parity",
]

BOSONIC = "bosonic"
FERMIONIC = "fermionic"


def _weak_compositions(total, parts):
    """Weak compositions of ``total`` into ``parts`` parts, descending lex."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


class HierarchySpace:
    """
    The set of hierarchy labels for a fixed statistics, exponent count and
    truncation level, with a dense label <-> offset bijection.

    Attributes
    ----------
    statistics : str
        ``"bosonic"`` or ``"fermionic"``.
    n_exponents : int
        Number of bath exponents (label length).
    cutoff : int
        Maximum total level retained in the hierarchy.
    labels : list of tuple
        All labels in enumeration order.
    """

    def __init__(self, statistics, n_exponents, cutoff, max_labels=2_000_000):
        if statistics not in (BOSONIC, FERMIONIC):
            raise ValueError(f"unknown statistics {statistics!r}")
        if n_exponents < 1:
            raise ValueError("n_exponents must be at least 1")
        if cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        self.statistics = statistics
        self.n_exponents = n_exponents
        self.cutoff = cutoff

        if statistics == BOSONIC:
            count = comb(n_exponents + cutoff, cutoff)
        else:
            count = sum(comb(n_exponents, k) for k in range(min(cutoff, n_exponents) + 1))
        if count > max_labels:
            raise ValueError(
                f"hierarchy would contain {count} labels, above the configured"
                f" maximum of {max_labels}"
            )

        labels = []
        for level in range(cutoff + 1):
            if statistics == BOSONIC:
                labels.extend(_weak_compositions(level, n_exponents))
            else:
                if level > n_exponents:
                    break
                for occupied in itertools.combinations(range(n_exponents), level):
                    occ = [0] * n_exponents
                    for pos in occupied:
                        occ[pos] = 1
                    labels.append(tuple(occ))
        assert len(labels) == count
        self.labels = labels
        self._offsets = {label: i for i, label in enumerate(labels)}

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return tuple(label) in self._offsets

    def index(self, label):
        """Offset of ``label`` within the enumeration."""
        try:
            return self._offsets[tuple(label)]
        except KeyError:
            raise KeyError(f"label {label!r} is not in the hierarchy") from None

    def level(self, label):
        return sum(label)

    def next(self, label, k):
        """
        The label with index ``k`` raised by one, or ``None`` if raising
        would leave the truncated hierarchy (or, for fermions, the index is
        already occupied).
        """
        if not 0 <= k < self.n_exponents:
            raise IndexError(f"exponent index {k} out of range")
        if sum(label) >= self.cutoff:
            return None
        if self.statistics == FERMIONIC and label[k] >= 1:
            return None
        return label[:k] + (label[k] + 1,) + label[k + 1:]

    def prev(self, label, k):
        """
        The label with index ``k`` lowered by one, or ``None`` if that index
        is already zero.
        """
        if not 0 <= k < self.n_exponents:
            raise IndexError(f"exponent index {k} out of range")
        if label[k] <= 0:
            return None
        return label[:k] + (label[k] - 1,) + label[k + 1:]


def enumerate_space(statistics, n_exponents, cutoff, max_labels=2_000_000):
    """Construct the :class:`HierarchySpace` for the given parameters."""
    return HierarchySpace(statistics, n_exponents, cutoff, max_labels=max_labels)


def fermionic_insertion_parity(label, k):
    """
    Sign picked up when a fermionic index created at position ``k`` is moved
    from the left end of the ordered index list to its canonical position:
    ``(-1) ** (number of occupied indices before k)``.
    """
    return -1 if sum(label[:k]) % 2 else 1
