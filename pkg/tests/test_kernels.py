"""Kernel construction, admissibility, slices, influences, contractions,
families and the JSON interchange."""

import json
import random
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homsums import (
    HomsumError,
    Kernel,
    KernelFamily,
    KernelFormatError,
    NotNormalizable,
    check_admissible,
    contraction_square_sum,
    family_kernel,
    influence,
    influence_max,
    make_admissible,
    random_admissible_kernel,
    slice_kernel,
)


def pair_kernel():
    return family_kernel(KernelFamily("product", 2), 2)


# -- construction and admissibility ------------------------------------------


def test_make_admissible_single_entry():
    k = make_admissible({(1, 2): 1}, n=2, d=2)
    assert k.entries == {(1, 2): Fraction(1, 2)}
    assert k.scale2 == 1
    assert check_admissible(k).ok


def test_make_admissible_symmetrizes():
    k = make_admissible({(1, 2): 1, (2, 1): 0}, n=2, d=2)
    assert k.entries == {(1, 2): Fraction(1, 2)}
    assert check_admissible(k).ok
    k2 = make_admissible({(2, 1): Fraction(1, 3)}, n=3, d=2)
    assert check_admissible(k2).ok


def test_make_admissible_idempotent():
    raw = {(1, 2): Fraction(2, 3), (1, 3): Fraction(-1, 5), (2, 3): 4}
    k = make_admissible(raw, n=3, d=2)
    assert make_admissible(k) == k


def test_make_admissible_drops_diagonals_and_rejects_pure_diagonal():
    k = make_admissible({(1, 1): 5, (1, 2): 1}, n=2, d=2)
    assert (1, 1) not in k.entries
    with pytest.raises(NotNormalizable):
        make_admissible({(1, 1): 5, (2, 2): 1}, n=2, d=2)


def test_make_admissible_float_mode():
    k = make_admissible({(1, 2): 0.25, (1, 3): 0.5}, n=3, d=2)
    assert k.mode == "float"
    assert check_admissible(k).ok


def test_uniform_pair_kernel_is_admissible():
    # f(i,j) = 1/sqrt(2n(n-1)) off the diagonal, here n=3
    k = family_kernel(KernelFamily("off-diagonal-pair", 2), 3)
    rep = check_admissible(k)
    assert rep.ok and rep.gamma_norm == 1


def test_check_admissible_reports_gamma_norm():
    k = family_kernel(KernelFamily("off-diagonal-pair", 2), 3)
    doubled = k.scaled(2)
    rep = check_admissible(doubled)
    assert not rep.gamma and rep.gamma_norm == 4
    assert rep.alpha and rep.beta
    empty = Kernel(3, 2, {})
    rep = check_admissible(empty)
    assert not rep.gamma and rep.gamma_norm == 0


def test_kernel_validation():
    with pytest.raises(KernelFormatError):
        Kernel(3, 2, {(2, 1): Fraction(1)})  # unsorted
    with pytest.raises(KernelFormatError):
        Kernel(3, 2, {(1, 1): Fraction(1)})  # diagonal
    with pytest.raises(KernelFormatError):
        Kernel(3, 2, {(1, 4): Fraction(1)})  # out of range
    with pytest.raises(HomsumError):
        Kernel(3, 0, {})


def test_value_lookup_uses_symmetric_extension():
    k = pair_kernel()
    assert k.value((1, 2)) == Fraction(1, 2)
    assert k.value((2, 1)) == Fraction(1, 2)
    assert k.value((1, 1)) == 0
    star = family_kernel(KernelFamily("star", 2), 3)
    assert star.value((2, 1)) == pytest.approx(1 / (2 * 2**0.5))


# -- slices -------------------------------------------------------------------


def test_slice_of_pair_kernel():
    sl = slice_kernel(pair_kernel(), (1,))
    assert sl.d == 1 and sl.entries == {(2,): Fraction(1, 2)}


def test_slice_with_repeated_fixed_indices_is_zero():
    k = family_kernel(KernelFamily("product", 3), 3)
    sl = slice_kernel(k, (1, 1))
    assert sl.entries == {}


def test_slice_of_star_kernel_keeps_block_structure():
    k = family_kernel(KernelFamily("star", 3), 3)  # hub 1, blocks (2,3), (4,5)
    sl = slice_kernel(k, (1,))
    assert sl.entries == {(2, 3): Fraction(1, 6), (4, 5): Fraction(1, 6)}
    assert sl.scale2 == Fraction(1, 2)
    leaf = slice_kernel(k, (2,))
    assert leaf.entries == {(1, 3): Fraction(1, 6)}


def test_slice_errors():
    k = pair_kernel()
    with pytest.raises(HomsumError):
        slice_kernel(k, (1, 2))  # m == d
    with pytest.raises(HomsumError):
        slice_kernel(k, (7,))


# -- influence and contraction -------------------------------------------------


@pytest.mark.parametrize("n", [2, 5, 10])
def test_influence_of_uniform_pair_kernel(n):
    k = family_kernel(KernelFamily("off-diagonal-pair", 2), n)
    for i in range(1, n + 1):
        assert influence(k, i) == Fraction(1, 2 * n)
    assert influence_max(k) == Fraction(1, 2 * n)


def test_influence_edge_cases():
    assert influence(Kernel(3, 2, {}), 1) == 0
    prod = family_kernel(KernelFamily("product", 2), 3)  # support {1,2} inside [3]
    assert influence(prod, 3) == 0
    with pytest.raises(HomsumError):
        influence(prod, 4)


def test_influences_sum_to_sq_norm():
    rng = random.Random(7)
    for d in (2, 3):
        k = random_admissible_kernel(rng, d, 5)
        total = sum(influence(k, i) for i in range(1, k.n + 1))
        assert total == k.sq_norm() == Fraction(1, factorial(d))


def test_contraction_square_sum_pair_kernel():
    assert contraction_square_sum(pair_kernel(), 1) == Fraction(1, 8)


def test_contraction_square_sum_errors_and_zero():
    with pytest.raises(HomsumError):
        contraction_square_sum(pair_kernel(), 2)
    assert contraction_square_sum(Kernel(4, 3, {}), 1) == 0


def test_contraction_square_sum_relabel_invariant(rng):
    k = random_admissible_kernel(rng, 3, 5)
    perm = {1: 3, 2: 5, 3: 1, 4: 2, 5: 4}
    for s in (1, 2):
        assert contraction_square_sum(k, s) == contraction_square_sum(k.relabel(perm), s)


def test_slice_commutes_with_relabeling(rng):
    k = random_admissible_kernel(rng, 3, 5)
    perm = {1: 2, 2: 4, 3: 3, 4: 5, 5: 1}
    for j in range(1, 6):
        assert slice_kernel(k.relabel(perm), (perm[j],)) == slice_kernel(k, (j,)).relabel(perm)


# -- families -------------------------------------------------------------------


def test_product_family():
    k = family_kernel(KernelFamily("product", 3), 3)
    assert k.entries == {(1, 2, 3): Fraction(1, 6)}
    assert check_admissible(k).ok


def test_off_diagonal_pair_n2_equals_product():
    assert family_kernel(KernelFamily("off-diagonal-pair", 2), 2) == pair_kernel()


def test_star_kernel_d2_n3():
    # X1 (X2 + X3) / sqrt(2) as a kernel on three indices
    k = family_kernel(KernelFamily("star", 2), 3)
    assert k.entries == {(1, 2): Fraction(1, 2), (1, 3): Fraction(1, 2)}
    assert k.scale2 == Fraction(1, 2)
    assert check_admissible(k).ok


def test_free_clt_family_layout():
    k = family_kernel(KernelFamily("free-clt", 2), 3)
    assert k.n == 6 and k.support_size == 9
    # every support tuple mixes the two residue classes mod 2
    assert all((t[0] - t[1]) % 2 == 1 for t in k.entries)
    assert check_admissible(k).ok


@pytest.mark.parametrize("family_id", ["off-diagonal-pair", "product", "star", "free-clt"])
def test_families_generate_admissible_kernels(family_id):
    d_values = (2,) if family_id == "off-diagonal-pair" else (2, 3)
    for d in d_values:
        fam = KernelFamily(family_id, d)
        for n in range(fam.min_n, fam.min_n + 3):
            assert check_admissible(fam.kernel(n)).ok


def test_family_validation():
    with pytest.raises(HomsumError):
        KernelFamily("off-diagonal-pair", 3)
    with pytest.raises(HomsumError):
        KernelFamily("starlike", 2)
    with pytest.raises(HomsumError):
        family_kernel(KernelFamily("star", 2), 1)
    with pytest.raises(HomsumError):
        family_kernel(KernelFamily("product", 3), 2)


# -- JSON interchange ------------------------------------------------------------


def test_json_round_trip_exact(tmp_path):
    k = pair_kernel()
    path = tmp_path / "kernel.json"
    k.dump(str(path))
    loaded = Kernel.load(str(path))
    assert loaded == k
    data = json.loads(path.read_text())
    assert data["mode"] == "exact"
    assert data["entries"] == [{"idx": [1, 2], "num": 1, "den": 2}]


def test_json_export_of_irrational_scale_goes_float(tmp_path):
    k = family_kernel(KernelFamily("star", 2), 3)
    data = k.to_json()
    assert data["mode"] == "float"
    assert data["entries"][0]["val"] == pytest.approx(0.5 / 2**0.5)
    path = tmp_path / "star.json"
    k.dump(str(path))
    loaded = Kernel.load(str(path))
    assert loaded.mode == "float"
    assert float(loaded.value((1, 2))) == pytest.approx(float(k.value((1, 2))))


@pytest.mark.parametrize(
    "entry",
    [
        {"idx": [2, 1], "num": 1, "den": 2},
        {"idx": [1, 1], "num": 1, "den": 2},
        {"idx": [1, 9], "num": 1, "den": 2},
        {"idx": [1], "num": 1, "den": 2},
        {"idx": [1, 2], "num": 1, "den": 0},
        {"idx": [1, 2]},
    ],
)
def test_json_rejects_bad_entries(entry):
    data = {"n": 3, "d": 2, "mode": "exact", "entries": [entry]}
    with pytest.raises(KernelFormatError):
        Kernel.from_json(data)


def test_json_rejects_bad_headers():
    with pytest.raises(KernelFormatError):
        Kernel.from_json({"n": 3, "d": 2, "mode": "exact"})
    with pytest.raises(KernelFormatError):
        Kernel.from_json({"n": 3, "d": 2, "mode": "triple", "entries": []})
    with pytest.raises(KernelFormatError):
        Kernel.from_json([1, 2, 3])


def test_json_rejects_duplicate_idx():
    data = {
        "n": 3,
        "d": 2,
        "mode": "exact",
        "entries": [
            {"idx": [1, 2], "num": 1, "den": 2},
            {"idx": [1, 2], "num": 1, "den": 3},
        ],
    }
    with pytest.raises(KernelFormatError, match="duplicate"):
        Kernel.from_json(data)


# -- randomized properties ---------------------------------------------------------


def test_random_admissible_kernels_are_admissible(rng):
    for d in (2, 3):
        for _ in range(20):
            k = random_admissible_kernel(rng, d, 5)
            assert check_admissible(k).ok
            assert k.gamma_norm() == 1


@settings(deadline=None, max_examples=40)
@given(
    st.dictionaries(
        st.tuples(st.integers(1, 4), st.integers(1, 4)),
        st.fractions(min_value=-3, max_value=3, max_denominator=4),
        max_size=8,
    )
)
def test_make_admissible_always_normalizes_or_raises(raw):
    try:
        k = make_admissible(raw, n=4, d=2)
    except NotNormalizable:
        off_diagonal = {t: v for t, v in raw.items() if t[0] != t[1]}
        sym = {}
        for (a, b), v in off_diagonal.items():
            sym[(min(a, b), max(a, b))] = sym.get((min(a, b), max(a, b)), Fraction(0)) + v
        assert all(v == 0 for v in sym.values())
        return
    assert check_admissible(k).ok
