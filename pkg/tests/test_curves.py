from fractions import Fraction

import numpy as np
import pytest

from hypmoments import curves, ffield
from oracles import count_long_form, inv_mod, legendre_curve_count, trial_is_prime

ALL_BUILTINS = ("legendre", "legendre_neg", "d3", "d4", "d6", "clausen")


def _long_form_count(family, p, lam):
    """Naive count of the family's own long-form equation at a fiber."""
    coeffs = []
    for key in ("a1", "a2", "a3", "a4", "a6"):
        poly = getattr(family, key)
        val = poly(Fraction(lam))
        coeffs.append(val.numerator % p * inv_mod(val.denominator % p, p) % p)
    return count_long_form(p, *coeffs)


def test_builtin_legendre_counts_the_source_curve():
    # the model must reproduce the point counts of y^2 = x(1-x)(x-lambda)
    # at every prime, including p = 3 mod 4 where the sign of the trace
    # distinguishes the curve from its quadratic twist
    leg = curves.builtin_family("legendre")
    for p in (5, 7, 11, 13):
        ctx = ffield.build_field(p)
        for lam in range(2, p):
            a = curves.trace_single(leg, ctx, lam)
            assert a == p + 1 - legendre_curve_count(p, lam)


def test_builtin_legendre_discriminant():
    leg = curves.builtin_family("legendre")
    # delta = 16 lam^2 (lam-1)^2
    assert leg.delta.coeffs == (Fraction(0), Fraction(0), Fraction(16), Fraction(-32), Fraction(16))
    assert not (leg.a2.is_zero() and leg.a1.is_zero() and leg.a6.is_zero())


def test_builtin_d6_and_clausen_coefficients():
    d6 = curves.builtin_family("d6")
    assert d6.a1.coeffs == (Fraction(1),)
    assert d6.a6.coeffs == (Fraction(0), Fraction(-1, 432))
    for key in ("a2", "a3", "a4"):
        assert getattr(d6, key).is_zero()
    cl = curves.builtin_family("clausen")
    assert cl.a2.coeffs == (Fraction(-1),)
    assert cl.a4.coeffs == (Fraction(0), Fraction(1))
    assert cl.a6.coeffs == (Fraction(0), Fraction(-1))


def test_unknown_family():
    with pytest.raises(curves.UnknownFamilyError):
        curves.builtin_family("weierstrass")


def test_j_invariant_values():
    leg = curves.builtin_family("legendre")
    # lambda in {-1, 2, 1/2} are the harmonic fibers with j = 1728
    for lam in (Fraction(-1), Fraction(2), Fraction(1, 2)):
        assert leg.j_at(lam) == 1728
    assert leg.j_at(Fraction(3)) == Fraction(256 * 7**3, 9 * 4)
    with pytest.raises(ZeroDivisionError):
        leg.j_at(Fraction(1))


def test_custom_family_equals_builtin():
    leg = curves.builtin_family("legendre")
    made = curves.custom_family(
        [curves.RatPoly(c) for c in ((0,), (1, 1), (0,), (0, 1), (0,))], name="legendre"
    )
    for key in ("a1", "a2", "a3", "a4", "a6", "b2", "b4", "b6", "c4", "c6", "delta"):
        assert getattr(made, key) == getattr(leg, key)
    assert curves.family_hash(made) == curves.family_hash(leg)


def test_custom_family_singular():
    with pytest.raises(curves.SingularFamilyError):
        curves.custom_family([curves.RatPoly() for _ in range(5)])


def test_custom_family_with_denominators():
    fam = curves.custom_family([(0,), (0,), (0, Fraction(1, 7)), (1,), (1,)], name="den7")
    ctx = ffield.build_field(11)
    assert curves.trace_single(fam, ctx, 2) is not None
    with pytest.raises(curves.BadPrimeError):
        curves.trace_single(fam, ffield.build_field(7), 2)


def test_trace_single_examples():
    leg = curves.builtin_family("legendre")
    assert curves.trace_single(leg, ffield.build_field(5), 2) == -2
    assert curves.trace_single(leg, ffield.build_field(7), 1) is None
    cl = curves.builtin_family("clausen")
    for p in (5, 13, 29):
        assert curves.trace_single(cl, ffield.build_field(p), 0) is None


def test_sweep_bad_mask_legendre_p5():
    ctx = ffield.build_field(5)
    sweep = curves.trace_sweep(curves.builtin_family("legendre"), ctx)
    assert np.nonzero(sweep.bad_mask)[0].tolist() == [0, 1]


def test_sweep_totals_match_enumeration_p13():
    ctx = ffield.build_field(13)
    sweep = curves.trace_sweep(curves.builtin_family("legendre"), ctx)
    total = sum(
        13 + 1 - legendre_curve_count(13, lam) for lam in range(13) if not sweep.bad_mask[lam]
    )
    assert int(sweep.traces[sweep.good_mask()].sum()) == total


@pytest.mark.parametrize("name", ALL_BUILTINS)
@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_counts_match_naive_enumeration(name, p):
    fam = curves.builtin_family(name)
    ctx = ffield.build_field(p)
    sweep = curves.trace_sweep(fam, ctx)
    for lam in range(p):
        if sweep.bad_mask[lam]:
            continue
        assert p + 1 - _long_form_count(fam, p, lam) == int(sweep.traces[lam])


@pytest.mark.parametrize("name", ALL_BUILTINS)
def test_hasse_bound_property(name):
    fam = curves.builtin_family(name)
    for p in [q for q in range(5, 200) if trial_is_prime(q)]:
        ctx = ffield.build_field(p)
        sweep = curves.trace_sweep(fam, ctx)
        good = sweep.good_mask()
        if good.any():
            amax = int(np.abs(sweep.traces[good]).max())
            assert amax * amax <= 4 * p


@pytest.mark.parametrize("p", [q for q in range(5, 51) if trial_is_prime(q)])
def test_twist_covariance(p):
    ctx = ffield.build_field(p)
    leg = curves.builtin_family("legendre")
    base = curves.trace_sweep(leg, ctx)
    d = next(x for x in range(2, p) if ffield.legendre_symbol(x, p) == -1)
    twist = curves.custom_family([(0,), (d, d), (0,), (0, d * d % p), (0,)], name="twist")
    tw = curves.trace_sweep(twist, ctx)
    for lam in range(p):
        if base.bad_mask[lam]:
            continue
        assert int(tw.traces[lam]) == -int(base.traces[lam])


def test_sweep_determinism_across_worker_counts():
    ctx = ffield.build_field(4099)
    fam = curves.builtin_family("d3")
    sweeps = [curves.trace_sweep(fam, ctx, threads=t) for t in (1, 2, 8)]
    for s in sweeps[1:]:
        assert s.traces.tobytes() == sweeps[0].traces.tobytes()
        assert s.bad_mask.tobytes() == sweeps[0].bad_mask.tobytes()


def test_negated_sweep_matches_direct_computation():
    for name in ("legendre", "d3"):
        fam = curves.builtin_family(name)
        ctx = ffield.build_field(13)
        direct = curves.trace_sweep(curves.negated_family(fam), ctx)
        derived = curves.negated_sweep(fam, curves.trace_sweep(fam, ctx))
        assert direct.family_hash == derived.family_hash
        assert np.array_equal(direct.traces, derived.traces)
        assert np.array_equal(direct.bad_mask, derived.bad_mask)


def test_negated_family_names_and_involution():
    leg = curves.builtin_family("legendre")
    neg = curves.negated_family(leg)
    assert neg.name == "legendre_neg"
    assert curves.family_hash(neg) == curves.family_hash(curves.builtin_family("legendre_neg"))
    back = curves.negated_family(neg)
    assert curves.family_hash(back) == curves.family_hash(leg)


def test_classify_reduction_legendre_p13():
    report = curves.classify_reduction(curves.builtin_family("legendre"), ffield.build_field(13))
    assert report.points == [(0, "multiplicative"), (1, "multiplicative")]
    assert report.j_nonconstant


def test_classify_reduction_clausen_p13():
    report = curves.classify_reduction(curves.builtin_family("clausen"), ffield.build_field(13))
    # bad fibers at lambda = 0 and lambda = -1 = 12; c4 = -16(3 lam - 1) vanishes at neither
    assert report.points == [(0, "multiplicative"), (12, "multiplicative")]
    assert report.j_nonconstant


def test_classify_reduction_additive_case():
    # y^2 = x^3 + lambda: delta = -432 lam^2, c4 = 0 -> additive at lambda = 0
    fam = curves.custom_family([(0,), (0,), (0,), (0,), (0, 1)], name="j0")
    report = curves.classify_reduction(fam, ffield.build_field(13))
    assert report.points == [(0, "additive")]
    assert not report.j_nonconstant


def test_sweep_cache_roundtrip(tmp_path):
    fam = curves.builtin_family("legendre")
    ctx = ffield.build_field(13)
    sweep = curves.trace_sweep(fam, ctx)
    path = curves.save_sweep(sweep, fam, tmp_path)
    assert path.name == f"legendre-{curves.family_hash(fam)[:12]}-13.csv"
    loaded = curves.load_sweep(path)
    assert loaded.p == 13
    assert loaded.family_hash == sweep.family_hash
    assert np.array_equal(loaded.traces, sweep.traces)
    assert np.array_equal(loaded.bad_mask, sweep.bad_mask)
    before = path.read_bytes()
    curves.save_sweep(sweep, fam, tmp_path)
    assert path.read_bytes() == before


def test_sweep_cache_detects_tampering(tmp_path):
    fam = curves.builtin_family("legendre")
    sweep = curves.trace_sweep(fam, ffield.build_field(13))
    path = curves.save_sweep(sweep, fam, tmp_path)
    meta = path.with_name(path.name.replace(".csv", ".meta.json"))
    meta.write_text(meta.read_text().replace(sweep.family_hash, "0" * 64))
    with pytest.raises(curves.SweepMismatchError):
        curves.load_sweep(path)


def test_ensure_sweep_idempotent(tmp_path):
    fam = curves.builtin_family("d4")
    first = curves.ensure_sweep(fam, 13, tmp_path)
    csv = tmp_path / f"{curves.sweep_cache_name(fam, 13)}.csv"
    stamp = csv.stat().st_mtime_ns
    second = curves.ensure_sweep(fam, 13, tmp_path)
    assert csv.stat().st_mtime_ns == stamp
    assert np.array_equal(first.traces, second.traces)


def test_bad_prime_below_five():
    with pytest.raises(curves.BadPrimeError):
        curves._require_good_prime(curves.builtin_family("legendre"), 3)
