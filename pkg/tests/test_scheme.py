import math
from fractions import Fraction

import pytest

import oracles
from modelset import (
    DeformedSample,
    LinearInternal,
    apply_generator,
    displacement_candidates,
    enumerate_half_open,
    enumerate_model_set,
    is_nonsingular,
    min_candidate_spacing,
    reproject,
    sample_to_text,
    scheme_from_config,
    validate_scheme,
)
from modelset.errors import ConfigError, SingularParameterError
from modelset.quadfield import golden, qr

PHI = oracles.PHI


def test_enumeration_matches_float_scan(fib):
    scheme, window, xi = fib
    box = (qr(Fraction(1, 10)), qr(Fraction(401, 10)))
    sample = enumerate_model_set(scheme, window, xi, box)
    expected = oracles.brute_force_points(
        basis=((1.0, 1 - PHI), (1.0, PHI)),
        window=(-1.0, PHI - 1),
        xi=(1 / 3, 0.0),
        box=(0.1, 40.1),
        kmax=60,
    )
    got = [p.phys.to_float() for p in sample.points]
    assert len(got) == len(expected)
    assert all(abs(a - b) < 1e-9 for a, b in zip(got, expected))


def test_first_points_and_gaps(fib, fib_sample_600):
    phi = golden()
    pts = fib_sample_600.points
    assert [p.phys.serialize() for p in pts[:4]] == [
        "0",
        "1/2 + 1/2*sqrt(5)",
        "1 + 1*sqrt(5)",
        "2 + 1*sqrt(5)",
    ]
    gaps = {(b.phys - a.phys).serialize() for a, b in zip(pts, pts[1:])}
    assert gaps == {"1", "1/2 + 1/2*sqrt(5)"}
    assert (fib_sample_600.min_gap - qr(1)).sign() == 0
    # stars all strictly inside the window
    W = fib[1].component(())
    assert all(W.interior().contains(fib_sample_600.star(p)) for p in pts)


def test_float_caches_align(fib_sample_600):
    xs = fib_sample_600.float_physical()
    assert len(xs) == len(fib_sample_600.points)
    assert all(b > a for a, b in zip(xs, xs[1:]))
    ws = fib_sample_600.float_stars()
    assert all(-1.0 < w < PHI - 1 for w in ws)


def test_singular_offset_is_refused(fib):
    scheme, window, _ = fib
    xi0 = (qr(0), qr(0))
    with pytest.raises(SingularParameterError) as err:
        enumerate_model_set(scheme, window, xi0, (qr(-30), qr(30)))
    assert err.value.witness is not None


def test_half_open_enumerations_differ_by_defect(fib):
    scheme, window, _ = fib
    xi0 = (qr(0), qr(0))
    box = (qr(-30), qr(30))
    lam_plus = enumerate_half_open(scheme, window, xi0, box, keep_low=True)
    lam_minus = enumerate_half_open(scheme, window, xi0, box, keep_low=False)
    plus = {p.phys.serialize() for p in lam_plus.points}
    minus = {p.phys.serialize() for p in lam_minus.points}
    assert plus - minus == {"-1"}
    assert minus - plus == {"-1/2 - 1/2*sqrt(5)"}


def test_nonsingularity_decision(fib):
    scheme, window, xi = fib
    verdict, _ = is_nonsingular(scheme, window, xi)
    assert verdict == "verified-up-to-bound"
    verdict, witness = is_nonsingular(scheme, window, (qr(0), qr(0)))
    assert verdict == "singular"
    assert witness in ((-1, 0), (0, -1))


def test_validate_scheme_accepts_fibonacci(fib):
    report = validate_scheme(fib[0])
    assert report["injectivity"] == "verified-up-to-bound"
    assert report["zero_physical_witness"] is None
    assert report["density_ok"] is True


def test_validate_scheme_flags_rational_slope():
    cfg = {
        "d": 1,
        "n": 1,
        "torsion": [],
        "field_D": 5,
        "mode": "exact",
        "basis": [["1", "1"], ["1", "2"]],
        "window": {"0": [["-1", "1"]]},
        "xi": ["1/3", "0"],
    }
    scheme, _, _ = scheme_from_config(cfg)
    report = validate_scheme(scheme, bound=200)
    assert report["injectivity"] == "violated"
    assert report["density_ok"] is False


def test_reproject_round_trip_is_exact(fib_sample_600):
    L = qr(Fraction(1, 8))
    once = reproject(fib_sample_600, L)
    assert isinstance(once, DeformedSample)
    back = reproject(once, -L)
    for p, q in zip(fib_sample_600.points, back.physical_values()):
        assert (p.phys - q).sign() == 0


def test_reproject_equals_linear_generator(fib_sample_600):
    L = qr(Fraction(3, 16))
    via_reproject = reproject(fib_sample_600, L)
    via_generator = apply_generator(fib_sample_600, LinearInternal(L))
    a = via_reproject.physical_values()
    b = via_generator.physical_values()
    assert len(a) == len(b)
    for p, q in zip(a, b):
        assert (p - q).sign() == 0


def test_strong_deformation_keeps_exact_order(fib_sample_600):
    # |L| = 1/2 shifts points by up to phi/2 > the smallest gap, so the
    # deformed order genuinely differs from the source order
    out = apply_generator(fib_sample_600, LinearInternal(qr(Fraction(1, 2))))
    xs = out.physical_values()
    assert all((b - a).sign() > 0 for a, b in zip(xs, xs[1:]))
    src = [p.phys.to_float() for p in fib_sample_600.points]
    moved = [x.to_float() for x in xs]
    assert len(moved) == len(src)
    assert any(abs(a - b) > 0.3 for a, b in zip(sorted(src), moved))


def test_displacement_candidates_complete(fib, fib_sample_600):
    scheme, window, _ = fib
    cands = displacement_candidates(scheme, window, qr(4))
    values = {c.phys.serialize() for c in cands}
    # every displacement actually realized within radius 4 is listed
    pts = fib_sample_600.points
    for i, a in enumerate(pts[:80]):
        for b in pts[i:]:
            d = b.phys - a.phys
            if (d - qr(4)).sign() > 0:
                break
            assert d.serialize() in values
    assert "0" in values
    WW = window.component(()).hull()
    width = WW.hi - WW.lo
    for c in cands:
        assert (abs(c.star) - width).sign() <= 0


def test_min_candidate_spacing_value(fib):
    scheme, window, _ = fib
    spacing = min_candidate_spacing(scheme, window, qr(5))
    assert spacing.serialize() == "3/2 - 1/2*sqrt(5)"


def test_sample_text_format(fib_sample_600):
    lines = sample_to_text(fib_sample_600).splitlines()
    assert lines[0] == "0\t0.000000000000"
    assert lines[1] == "1/2 + 1/2*sqrt(5)\t1.618033988750"
    assert len(lines) == len(fib_sample_600.points)


def test_config_rejection_paths(fib_config_dict):
    bad = dict(fib_config_dict)
    del bad["basis"]
    with pytest.raises(ConfigError):
        scheme_from_config(bad)

    bad = dict(fib_config_dict)
    bad["basis"] = [["1", "1"], ["1", "1"]]
    with pytest.raises(ConfigError):
        scheme_from_config(bad)

    bad = dict(fib_config_dict)
    bad["window"] = {"0": []}
    with pytest.raises(ConfigError):
        scheme_from_config(bad)

    bad = dict(fib_config_dict)
    bad["xi"] = ["1/3"]
    with pytest.raises(ConfigError):
        scheme_from_config(bad)


def test_empty_box_is_rejected(fib):
    scheme, window, xi = fib
    with pytest.raises(ConfigError):
        enumerate_model_set(scheme, window, xi, (qr(50), qr(0)))
