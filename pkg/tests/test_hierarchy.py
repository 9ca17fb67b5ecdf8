import itertools
from math import comb

import numpy as np
import pytest

from heomkit.hierarchy import enumerate_space, fermionic_insertion_parity


def brute_force_bosonic(n_exp, cutoff):
    labels = [
        t for t in itertools.product(range(cutoff + 1), repeat=n_exp)
        if sum(t) <= cutoff
    ]
    return labels


def test_bosonic_count_example():
    space = enumerate_space("bosonic", 2, 2)
    assert len(space) == 6
    assert set(space.labels) == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}


def test_fermionic_count_example():
    space = enumerate_space("fermionic", 4, 2)
    assert len(space) == 1 + 4 + 6


@pytest.mark.parametrize("statistics", ["bosonic", "fermionic"])
def test_cutoff_zero_is_system_only(statistics):
    space = enumerate_space(statistics, 3, 0)
    assert len(space) == 1
    assert space.labels[0] == (0, 0, 0)


@pytest.mark.parametrize("n_exp", range(1, 7))
@pytest.mark.parametrize("cutoff", range(0, 5))
def test_bosonic_counts_vs_brute_force(n_exp, cutoff):
    space = enumerate_space("bosonic", n_exp, cutoff)
    brute = brute_force_bosonic(n_exp, cutoff)
    assert len(space) == len(brute) == comb(n_exp + cutoff, cutoff)
    assert set(space.labels) == set(brute)


def test_zero_label_at_offset_zero():
    for statistics in ("bosonic", "fermionic"):
        space = enumerate_space(statistics, 5, 3)
        assert space.index((0,) * 5) == 0


def test_enumeration_is_level_major_and_deterministic():
    space = enumerate_space("bosonic", 3, 3)
    levels = [sum(label) for label in space.labels]
    assert levels == sorted(levels)
    again = enumerate_space("bosonic", 3, 3)
    assert space.labels == again.labels
    # descending lexicographic within a level
    for level in range(4):
        group = [l for l in space.labels if sum(l) == level]
        assert group == sorted(group, reverse=True)


def test_level_one_block_is_contiguous_prefix():
    space = enumerate_space("bosonic", 4, 3)
    for k in range(4):
        label = tuple(1 if i == k else 0 for i in range(4))
        assert 1 <= space.index(label) <= 4


def test_next_prev_bosonic():
    space = enumerate_space("bosonic", 2, 2)
    assert space.next((0, 0), 0) == (1, 0)
    assert space.next((2, 0), 0) is None  # at cutoff
    assert space.next((1, 1), 1) is None
    assert space.prev((1, 0), 0) == (0, 0)
    assert space.prev((0, 0), 0) is None
    assert space.prev((0, 0), 1) is None


def test_next_prev_fermionic():
    space = enumerate_space("fermionic", 4, 2)
    assert space.next((0, 0, 0, 0), 0) == (1, 0, 0, 0)
    assert space.next((1, 0, 0, 0), 0) is None  # Pauli blocking
    assert space.next((1, 1, 0, 0), 2) is None  # at cutoff
    assert space.prev((1, 0, 0, 0), 0) == (0, 0, 0, 0)
    assert space.prev((1, 0, 0, 0), 1) is None


def test_next_then_prev_round_trip():
    space = enumerate_space("bosonic", 3, 3)
    for label in space.labels:
        for k in range(3):
            up = space.next(label, k)
            if up is not None:
                assert space.prev(up, k) == label


def test_index_raises_for_unknown_label():
    space = enumerate_space("bosonic", 2, 1)
    with pytest.raises(KeyError):
        space.index((2, 2))


def test_k_out_of_range():
    space = enumerate_space("bosonic", 2, 1)
    with pytest.raises(IndexError):
        space.next((0, 0), 5)


def test_overflow_guard_reports_count():
    with pytest.raises(ValueError) as err:
        enumerate_space("bosonic", 30, 10, max_labels=1000)
    assert str(comb(40, 10)) in str(err.value)


def permutation_sign(order):
    sign = 1
    order = list(order)
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                sign = -sign
    return sign


def test_insertion_parity_examples():
    assert fermionic_insertion_parity((0, 0, 0, 0), 2) == 1
    assert fermionic_insertion_parity((1, 0, 0, 0), 2) == -1
    assert fermionic_insertion_parity((1, 1, 0, 0), 3) == 1


def test_insertion_parity_vs_operator_ordering_oracle():
    # Moving a new index from the front of the list to its sorted position
    # crosses each earlier occupied index once: the parity must equal the
    # sign of the permutation that sorts [k, occupied...].
    for occ in itertools.product((0, 1), repeat=5):
        occupied = [i for i, o in enumerate(occ) if o]
        for k in range(5):
            if occ[k]:
                continue
            sequence = [k] + occupied
            ranks = np.argsort(np.argsort(sequence))
            assert fermionic_insertion_parity(occ, k) == permutation_sign(ranks)


def test_parity_anticommutation():
    space = enumerate_space("fermionic", 5, 5)
    for label in space.labels:
        for k1 in range(5):
            for k2 in range(5):
                if k1 == k2:
                    continue
                up1 = space.next(label, k1)
                if up1 is None or space.next(up1, k2) is None:
                    continue
                up2 = space.next(label, k2)
                if up2 is None or space.next(up2, k1) is None:
                    continue
                sign_a = fermionic_insertion_parity(label, k1) * \
                    fermionic_insertion_parity(up1, k2)
                sign_b = fermionic_insertion_parity(label, k2) * \
                    fermionic_insertion_parity(up2, k1)
                assert sign_a == -sign_b
