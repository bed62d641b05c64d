import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from hurwitz_pia.construction import (
    LevelCodeSpec,
    as_vector,
    build_code,
    canonical,
    code_from_dict,
    code_summary,
    embed,
    encode,
    enumerate_level_code,
    is_lattice_member,
    lattice_volume,
    lattice_volume_exact,
    load_code_spec,
    min_distance_estimate,
    random_codeword,
    random_hurwitz,
    rank_one_fixture,
    spec_from_dict,
)
from hurwitz_pia.crt import build_crt_context, enumerate_residues, hurwitz_box, reduce_two_sided_batch
from hurwitz_pia import kernels
from hurwitz_pia.quaternion import HurwitzInt

TWO_LEVEL_DOC = {
    "primes": [3],
    "n": 2,
    "levels": [
        {"prime": 3, "side": "pi", "generator": [[[2, 0, 0, 0], [0, 0, 0, 0]]]},
        {"prime": 3, "side": "pibar", "generator": [[[2, 0, 0, 0], [2, 0, 0, 0]]]},
    ],
}


@pytest.fixture(scope="module")
def c81():
    return code_from_dict(TWO_LEVEL_DOC)


def _zero_specs(k, n):
    z = np.zeros((0, n, 4), dtype=np.int64)
    return [LevelCodeSpec(j, s, z) for j in range(k) for s in (0, 1)]


def _identity_specs(k, n):
    eye = np.zeros((n, n, 4), dtype=np.int64)
    for i in range(n):
        eye[i, i, 0] = 2
    return [LevelCodeSpec(j, s, eye) for j in range(k) for s in (0, 1)]


def left_span_oracle(q, gen):
    """{h * gen mod qH : h in H/qH} computed independently with numpy products."""
    hs = reduce_two_sided_batch(hurwitz_box(0, 2 * q), q)
    hs = np.unique(hs, axis=0)
    words = np.stack([kernels.hamilton_doubled(hs, np.array(g)) for g in gen], axis=1)
    words = reduce_two_sided_batch(words, q)
    return {w.tobytes() for w in words}


def test_example_code_sizes(c81):
    assert c81.size == 81
    assert c81.level_sizes == [9, 9]


def test_example_code_is_left_span(c81):
    oracle = left_span_oracle(3, [[2, 0, 0, 0], [-2, -2, -2, 0]])
    assert {w.tobytes() for w in c81.combined} == oracle


def test_level_code_examples():
    ctx = build_crt_context([3])
    g = np.array([[[2, 0, 0, 0], [0, 0, 0, 0]]])
    assert len(enumerate_level_code(LevelCodeSpec(0, 0, g), ctx)) == 9
    z = np.zeros((1, 2, 4), dtype=np.int64)
    assert enumerate_level_code(LevelCodeSpec(0, 0, z), ctx).tolist() == [[[0] * 4] * 2]
    eye = _identity_specs(1, 2)[0]
    assert len(enumerate_level_code(eye, ctx)) == 81


def test_zero_and_full_codes():
    ctx = build_crt_context([3])
    zero = build_code(ctx, _zero_specs(1, 1))
    assert zero.size == 1
    assert lattice_volume_exact(zero) == Fraction(81, 2)
    dm = min_distance_estimate(zero)
    assert dm.norm_sq == 9 and dm.value == 3.0
    full = build_code(ctx, _identity_specs(1, 1))
    assert full.size == 81
    assert lattice_volume_exact(full) == Fraction(1, 2)
    assert min_distance_estimate(full).value == 1.0


def test_full_code_two_primes():
    ctx = build_crt_context([3, 5])
    code = build_code(ctx, _identity_specs(2, 1))
    assert code.size == 15 ** 4
    assert np.array_equal(code.combined, enumerate_residues(15).elements.reshape(-1, 1, 4))


@pytest.mark.parametrize("p", [3, 7, 11])
def test_rank_one_sizes_for_three_mod_four(p):
    code = rank_one_fixture([p])
    assert code.level_sizes == [p * p, p * p]
    assert code.size == p ** 4


def test_rank_one_composite():
    code = rank_one_fixture([3, 5])
    assert code.size == 15 ** 4
    assert code.level_sizes == [9, 9, 25, 25]


def test_build_rejects_bad_specs():
    ctx = build_crt_context([3])
    g = np.zeros((1, 2, 4), dtype=np.int64)
    with pytest.raises(ValueError):
        build_code(ctx, [LevelCodeSpec(0, 0, g)])
    with pytest.raises(ValueError):
        build_code(ctx, [LevelCodeSpec(0, 0, g), LevelCodeSpec(0, 0, g)])
    with pytest.raises(ValueError):
        build_code(ctx, [LevelCodeSpec(0, 0, g), LevelCodeSpec(0, 1, np.zeros((1, 3, 4), dtype=np.int64))])
    with pytest.raises(ValueError):
        LevelCodeSpec(0, 2, g)
    with pytest.raises(ValueError):
        LevelCodeSpec(0, 0, np.zeros((3, 2, 4), dtype=np.int64))


def test_example_metrics(c81):
    assert lattice_volume_exact(c81) == Fraction(81, 4)
    assert lattice_volume(c81) == 20.25
    dm = min_distance_estimate(c81)
    assert dm.certified and dm.norm_sq == 3


def _brute_min_norm_sq(code, radius_doubled=4):
    """Shortest nonzero lattice vector among c + q*h with small h (independent enumeration)."""
    q = code.q
    shifts = hurwitz_box(-radius_doubled, radius_doubled + 1)
    best = None
    for c in code.combined:
        # coordinates decouple: shortest representative per position
        per = []
        for i in range(code.n):
            vals = ((c[i][None, :] + q * shifts) ** 2).sum(axis=1)
            per.append(vals)
        if not c.any():
            s = min(int(v[v > 0].min()) for v in per)
        else:
            s = sum(int(v.min()) for v in per)
        best = s if best is None else min(best, s)
    return Fraction(best, 4)


def test_min_distance_matches_brute_force(c81):
    assert min_distance_estimate(c81).norm_sq == _brute_min_norm_sq(c81) == 3


def test_min_distance_radius_flag(c81):
    dm = min_distance_estimate(c81, radius_bound=1.0)
    assert not dm.certified
    assert min_distance_estimate(c81, radius_bound=2.0).certified
    with pytest.raises(ValueError):
        min_distance_estimate(c81, radius_bound=0.5)


def test_membership(c81, rng):
    zero = np.zeros((2, 4), dtype=np.int64)
    assert is_lattice_member(zero, c81)
    for _ in range(200):
        c = c81.combined[rng.integers(c81.size)]
        h = random_hurwitz(rng, (2, 4), 5)
        assert is_lattice_member(c + 3 * h, c81)
    assert not is_lattice_member(np.array([[2, 0, 0, 0], [0, 0, 0, 0]]), c81)


def test_membership_rate_counting(c81, rng):
    pts = random_hurwitz(rng, (20_000, 2, 4), 3)
    hits = sum(is_lattice_member(p, c81) for p in pts)
    rate = hits / len(pts)
    assert abs(rate - 1 / 81) < 0.004


def test_closed_under_addition(rng):
    code = rank_one_fixture([3, 5])
    for _ in range(1000):
        a = code.combined[rng.integers(code.size)]
        b = code.combined[rng.integers(code.size)]
        assert code.index_of(canonical(a + b, code.q)) is not None


def test_encode(c81):
    from hurwitz_pia.construction import _level_residue_systems

    z = [rs.index(HurwitzInt.zero()) for rs in _level_residue_systems(c81)]
    assert not encode(c81, [[z[0]], [z[1]]]).any()
    words = {encode(c81, [[a], [b]]).tobytes() for a in range(9) for b in range(9)}
    assert words == {w.tobytes() for w in c81.combined}
    with pytest.raises(ValueError):
        encode(c81, [[0]])


def test_random_codeword_deterministic_and_uniform(c81):
    a = random_codeword(c81, 99)
    b = random_codeword(c81, 99)
    assert np.array_equal(a, b)
    rng = np.random.default_rng(3)
    counts = Counter(c81.index_of(random_codeword(c81, rng)) for _ in range(10_000))
    assert len(counts) == 81
    exp = 10_000 / 81
    chi2 = sum((c - exp) ** 2 / exp for c in counts.values())
    assert chi2 < 140  # 80 dof, p ~ 1e-4


def test_translate_box(c81, rng):
    x = random_codeword(c81, rng, translate_box=3)
    assert is_lattice_member(x, c81)


def test_random_hurwitz_range(rng):
    h = random_hurwitz(rng, (5000, 4), 2)
    assert np.abs(h).max() <= 4
    assert kernels.hurwitz_parity_ok(h).all()


def test_vector_helpers():
    v = as_vector([HurwitzInt(1, 1, 1, 1), HurwitzInt(2, 0, 0, 0)])
    assert v.shape == (2, 4)
    assert np.allclose(embed(v), [0.5, 0.5, 0.5, 0.5, 1, 0, 0, 0])
    with pytest.raises(ValueError):
        as_vector(np.array([[1, 0, 0, 0]]))


def test_spec_documents(tmp_path):
    p = tmp_path / "c.json"
    import json

    p.write_text(json.dumps(TWO_LEVEL_DOC))
    assert load_code_spec(p).size == 81
    bad = dict(TWO_LEVEL_DOC, levels=TWO_LEVEL_DOC["levels"][:1])
    with pytest.raises(ValueError):
        spec_from_dict(bad)
    bad = dict(TWO_LEVEL_DOC, levels=[dict(TWO_LEVEL_DOC["levels"][0], prime=5), TWO_LEVEL_DOC["levels"][1]])
    with pytest.raises(ValueError):
        spec_from_dict(bad)
    pinned = dict(TWO_LEVEL_DOC, factors={"3": [2, -2, -2, 0]})
    assert code_from_dict(pinned).ctx.levels[0].pi == HurwitzInt(2, -2, -2, 0)


def test_summary(c81):
    s = code_summary(c81)
    assert s["code_size"] == 81 and s["volume_exact"] == "81/4" and s["d_min_certified"]


def count_box_points(code, S):
    """Lattice points with every doubled coordinate in [0, 2S), via per-position residue counts."""
    q = code.q
    per_residue = Counter()
    for d0 in range(2 * S):
        par = d0 & 1
        axis = np.arange(par, 2 * S, 2)
        g = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
        pts = np.concatenate([np.full((len(g), 1), d0), g], axis=1)
        red = reduce_two_sided_batch(pts, q)
        u, c = np.unique(red, axis=0, return_counts=True)
        for row, k in zip(u, c):
            per_residue[row.tobytes()] += int(k)
    total = 0
    for w in code.combined:
        prod = 1
        for coord in w:
            prod *= per_residue[np.ascontiguousarray(coord).tobytes()]
        total += prod
    return total


def test_volume_counting_oracle(c81):
    S = 24
    count = count_box_points(c81, S)
    assert abs(count * lattice_volume(c81) / S ** 8 - 1) < 0.02
