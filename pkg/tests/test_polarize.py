"""Branch signatures, branch channels, linear detection and code
construction."""

import numpy as np
import pytest

from macpolar import (
    DiscreteMac,
    LengthMismatchError,
    LinearComboMac,
    TooLargeError,
    all_sigs,
    branch_order_cmp,
    build_code,
    detect_linear,
    direction_stats,
    iter_branch_channels,
    martingale_report,
    mutual_info,
    polarize_branch,
    projective_directions,
    sig_key,
    sum_capacity,
)
from macpolar.linear_mac import binary2_subspaces, binary2_step
from macpolar.polarize import CodeSpec, level_channels
from conftest import random_mac, random_combo, subsets_of


def uniform_five_explicit():
    return LinearComboMac(2, 2, [(0.2, s) for s in binary2_subspaces()]).to_explicit()


def test_branch_order_examples():
    assert branch_order_cmp("--", "++") == -1
    assert branch_order_cmp("+-", "-+") == -1
    assert branch_order_cmp("-+", "-+") == 0
    assert all_sigs(2) == ["--", "+-", "-+", "++"]


def test_branch_order_pairwise_consistency():
    # the order relation: the last differing position decides, '-' < '+'
    def slow_cmp(a, b):
        for i in reversed(range(len(a))):
            if a[i] != b[i]:
                return -1 if a[i] == "-" else 1
        return 0

    sigs = all_sigs(3)
    for a in sigs:
        for b in sigs:
            assert branch_order_cmp(a, b) == slow_cmp(a, b)
    assert sorted(sigs, key=sig_key) == sigs


def test_branch_order_length_mismatch():
    with pytest.raises(LengthMismatchError):
        branch_order_cmp("-", "--")


def test_projective_directions():
    dirs = projective_directions(2, 2)
    assert [tuple(d) for d in dirs] == [(1, 0), (0, 1), (1, 1)]
    assert len(projective_directions(3, 2)) == 4      # (9-1)/(3-1)
    assert len(projective_directions(3, 3)) == 13


def test_polarize_branch_empty_sig(rng):
    mac = random_mac(rng, 2, 2, 4)
    assert np.array_equal(polarize_branch(mac, "").table, mac.table)


def test_polarize_branch_single_step_matches_li(rng):
    combo = random_combo(rng, 2, 2)
    explicit = combo.to_explicit()
    for sig, li in [("-", combo.minus()), ("+", combo.plus())]:
        chan = polarize_branch(explicit, sig)
        for s in subsets_of(2):
            assert mutual_info(chan, s) == pytest.approx(li.mutual_info(s), abs=1e-9)


def test_branch_capacity_sum(rng):
    # Total information is conserved across each level of the tree.
    # Unstructured tables stop merging, so random channels stay shallow;
    # the structured channel is taken deeper.
    mac = random_mac(rng, 2, 2, 4)
    total = sum(sum_capacity(c) for c in level_channels(mac, 2))
    assert total == pytest.approx(4 * sum_capacity(mac), abs=1e-6)
    five = uniform_five_explicit()
    total = sum(sum_capacity(c) for c in level_channels(five, 3))
    assert total == pytest.approx(8 * sum_capacity(five), abs=1e-6)


def test_iter_matches_polarize_branch():
    mac = uniform_five_explicit()
    seen = []
    for sig, chan in iter_branch_channels(mac, 3):
        seen.append(sig)
        direct = polarize_branch(mac, sig)
        assert sum_capacity(chan) == pytest.approx(sum_capacity(direct), abs=1e-12)
    assert seen == all_sigs(3)


def test_polarize_branch_size_cap(rng):
    mac = random_mac(rng, 2, 2, 6)
    with pytest.raises(TooLargeError):
        polarize_branch(mac, "++", max_outputs=8)


def test_detect_linear_examples():
    subs = binary2_subspaces()
    c3 = LinearComboMac(2, 2, [(1.0, subs[3])]).to_explicit()
    cols, r = detect_linear(c3, 0.1)
    assert r == 1 and cols.data.T.tolist() == [[1, 1]]
    _, r = detect_linear(DiscreteMac.identity(2, 2), 0.1)
    assert r == 2
    cols, r = detect_linear(DiscreteMac.useless(2, 2), 0.1)
    assert r == 0 and cols.shape == (2, 0)


def test_detect_linear_rejects_non_subspace_good_set():
    # Two clean axis directions, noisy diagonal: the good set spans the
    # whole plane but the diagonal fails, so detection must decline.
    subs = binary2_subspaces()
    mixed = LinearComboMac(2, 2, [(0.2, subs[1]), (0.2, subs[2]),
                                  (0.6, subs[4])]).to_explicit()
    stats = {s.alpha: s.i for s in direction_stats(mixed)}
    assert stats[(1, 0)] == pytest.approx(0.8) and stats[(1, 1)] == pytest.approx(0.6)
    assert detect_linear(mixed, 0.3) is None

    f = 0.01   # product of two symmetric single-user channels, same shape
    bsc = np.array([[1 - f, f], [f, 1 - f]])
    table = np.zeros((4, 4))
    for x1 in range(2):
        for x2 in range(2):
            for y1 in range(2):
                for y2 in range(2):
                    table[x1 + 2 * x2, y1 + 2 * y2] = bsc[x1, y1] * bsc[x2, y2]
    assert detect_linear(DiscreteMac(2, 2, table), 0.1) is None


def test_detect_linear_never_fails_on_pointmass_channels():
    for sub in binary2_subspaces():
        chan = LinearComboMac(2, 2, [(1.0, sub)]).to_explicit()
        for sig, branch in iter_branch_channels(chan, 3):
            det = detect_linear(branch, 0.2)
            assert det is not None
            assert det[1] == sub.dim


def test_direction_stats_extremes():
    # On exactly polarized channels, I and Z agree about each direction.
    subs = binary2_subspaces()
    for sub in subs:
        chan = LinearComboMac(2, 2, [(1.0, sub)]).to_explicit()
        for st in direction_stats(chan):
            if st.i > 1 - 1e-6:
                assert st.z < 1e-3
            if st.i < 1e-6:
                assert st.z > 1 - 1e-3


def test_build_code_perfect_and_useless():
    perfect = DiscreteMac.identity(2, 2)
    spec = build_code(perfect, 2, eps=0.2, z_budget=1e-6)
    spec.check()
    assert spec.sum_rate == pytest.approx(2.0)
    assert all(b.in_good_set and b.r == 2 for b in spec.branches)

    useless = DiscreteMac.useless(2, 2)
    spec = build_code(useless, 2, eps=0.2, z_budget=1e-6)
    spec.check()
    assert spec.sum_rate == 0.0
    assert all(b.in_good_set and b.r == 0 for b in spec.branches)
    assert all(all(f == 1 for f in b.frozen) for b in spec.branches)


def test_build_code_single_term_v3():
    subs = binary2_subspaces()
    chan = LinearComboMac(2, 2, [(1.0, subs[3])]).to_explicit()
    spec = build_code(chan, 3, eps=0.2, z_budget=1e-9)
    spec.check()
    assert spec.sum_rate == pytest.approx(1.0)
    assert spec.rate_vector == (1.0, 0.0)     # user 1 carries x1+x2's symbol
    assert spec.union_bound == pytest.approx(0.0, abs=1e-12)
    for b in spec.branches:
        assert b.s_users == (1,) and b.a_columns == ((1, 1),)


def test_codespec_json_roundtrip(rng):
    spec = build_code(uniform_five_explicit(), 3, eps=0.2, z_budget=0.1)
    again = CodeSpec.from_dict(spec.to_dict())
    assert again == spec
    import json
    assert json.loads(spec.to_json()) == json.loads(
        CodeSpec.from_dict(json.loads(spec.to_json())).to_json())


def test_martingale_report(rng):
    mac = random_mac(rng, 2, 2, 4)
    rep = martingale_report(mac, 2)
    for j, s in enumerate(rep.subsets):
        assert rep.averages[0][j] == pytest.approx(mutual_info(mac, s), abs=1e-12)
    assert rep.full_set_constant
    assert rep.strict_non_increasing
    full = rep.column((1, 2))
    assert max(abs(v - full[0]) for v in full) < 1e-6


def test_polarization_trend_even_levels():
    # Fraction of branches with every direction's information within 0.05
    # of an integer, computed exactly in the subspace-weight domain.
    states = np.array([[0.2] * 5])
    fractions = {}
    for lvl in range(1, 11):
        minus, plus = binary2_step(states)
        states = np.concatenate([minus, plus], axis=0)
        states /= states.sum(axis=1, keepdims=True)
        rho = np.stack([states[:, 1] + states[:, 4],
                        states[:, 2] + states[:, 4],
                        states[:, 3] + states[:, 4]], axis=1)
        dist = np.minimum(rho, 1 - rho).max(axis=1)
        fractions[lvl] = float(np.mean(dist < 0.05))
    evens = [fractions[l] for l in (2, 4, 6, 8, 10)]
    assert all(b >= a for a, b in zip(evens, evens[1:]))
