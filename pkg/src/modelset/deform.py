"""Shape deformations: generators, Meyer diagnostics, slip detection.

A generator assigns each sample point a physical displacement; the
deformed set is {x + F(x)}.  Three variants: a linear function of the
star map, a local rule reading a fixed-radius patch, and a raw value
table.  The module also measures uniform discreteness of difference
sets (the Meyer diagnostic), tests strong pattern equivariance,
probes generators on singular limit-set pairs, and decomposes a
generator into a star-linear part plus a pattern-equivariant rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError, DomainError, InternalCheckError
from .quadfield import QuadReal
from .scheme import (
    DeformedSample,
    PointSample,
    enumerate_half_open,
    star_of,
)

__all__ = [
    "LinearInternal",
    "LocalRule",
    "Table",
    "SumGenerator",
    "MeyerReport",
    "DecompositionResult",
    "NonslipReport",
    "apply_generator",
    "meyer_report",
    "is_strongly_pe",
    "singular_pair",
    "nonslip_probe",
    "rank_fraction_table",
    "decompose_generator",
    "patch_class_key",
]


# ---------------------------------------------------------------------------
# generators


def _interior_range(sample, margin):
    """Index range [i, j) of points whose margin-ball fits in the box."""
    blo, bhi = sample.box
    i = 0
    pts = sample.points
    while i < len(pts) and (pts[i].phys - margin - blo).sign() < 0:
        i += 1
    j = len(pts)
    while j > i and (bhi - pts[j - 1].phys - margin).sign() < 0:
        j -= 1
    return i, j


def _displacements_at(sample, idx, R):
    center = sample.points[idx]
    pts = sample.points
    out = []
    i = idx
    while i >= 0 and (center.phys - pts[i].phys - R).sign() <= 0:
        i -= 1
    j = idx
    while j < len(pts) and (pts[j].phys - center.phys - R).sign() <= 0:
        j += 1
    for k in range(i + 1, j):
        out.append(pts[k].phys - center.phys)
    return out


def patch_class_key(sample, idx, R):
    """Translation-class identity of the R-patch at a sample index."""
    return tuple(d.serialize() for d in _displacements_at(sample, idx, R))


@dataclass(frozen=True)
class LinearInternal:
    """F(x) = L * star(x): the sheared-projection generator."""

    L: QuadReal

    def margin(self, sample):
        return QuadReal(0, 0, self.L.D)

    def value_at(self, sample, idx):
        return self.L * sample.star(sample.points[idx])


class LocalRule:
    """F(x) determined by the R-patch at x via a class table.

    The table maps patch-class keys to values.  An optional rule
    function backs the table, so the generator stays total on patch
    classes that show up only in other samples (e.g. singular limit
    sets); without it, an unknown class is an error.
    """

    __slots__ = ("radius", "table", "rule")

    def __init__(self, radius, table, rule=None):
        self.radius = radius
        self.table = dict(table)
        self.rule = rule

    @classmethod
    def from_function(cls, sample, radius, fn):
        """Tabulate fn over every patch class the sample exhibits."""
        if not isinstance(radius, QuadReal):
            radius = QuadReal(Fraction(radius), 0, sample.scheme.field_D)
        i, j = _interior_range(sample, radius)
        if i >= j:
            raise DomainError("sample too small for the rule radius")
        table = {}
        for idx in range(i, j):
            disp = _displacements_at(sample, idx, radius)
            key = tuple(d.serialize() for d in disp)
            if key not in table:
                table[key] = fn(tuple(disp))
        return cls(radius, table, rule=fn)

    def margin(self, sample):
        return self.radius

    def value_at(self, sample, idx):
        disp = _displacements_at(sample, idx, self.radius)
        key = tuple(d.serialize() for d in disp)
        v = self.table.get(key)
        if v is None:
            if self.rule is None:
                raise DomainError(f"local rule has no entry for class {key}")
            v = self.rule(tuple(disp))
            self.table[key] = v
        return v


@dataclass(frozen=True)
class Table:
    """Raw per-point values keyed by exact position, with a bound."""

    values: dict
    bound: QuadReal

    def __post_init__(self):
        for v in self.values.values():
            if (abs(v) - self.bound).sign() > 0:
                raise ConfigError("table value exceeds declared bound")

    def margin(self, sample):
        return QuadReal(0, 0, self.bound.D)

    def value_at(self, sample, idx):
        key = sample.points[idx].phys.serialize()
        try:
            return self.values[key]
        except KeyError:
            raise DomainError(f"table has no value at {key}") from None


@dataclass(frozen=True)
class SumGenerator:
    """Pointwise sum of generators; margin is the widest part's."""

    parts: tuple

    def margin(self, sample):
        margins = [p.margin(sample) for p in self.parts]
        best = margins[0]
        for m in margins[1:]:
            if (m - best).sign() > 0:
                best = m
        return best

    def value_at(self, sample, idx):
        acc = self.parts[0].value_at(sample, idx)
        for p in self.parts[1:]:
            acc = acc + p.value_at(sample, idx)
        return acc


def apply_generator(sample: PointSample, F) -> DeformedSample:
    """Deform the sample: each point x moves to x + F(x).

    Local rules only apply where their patch ball fits inside the box;
    those edge points are trimmed and the margin recorded on the
    output.
    """
    margin = F.margin(sample)
    if margin.sign() > 0:
        i, j = _interior_range(sample, margin)
        trimmed = margin
    else:
        i, j = 0, len(sample.points)
        trimmed = None
    pairs = []
    for idx in range(i, j):
        pt = sample.points[idx]
        pairs.append((pt.phys + F.value_at(sample, idx), pt))
    return DeformedSample(sample, pairs, trimmed_margin=trimmed)


# ---------------------------------------------------------------------------
# Meyer diagnostic

_PACK_OFF = 1 << 25
_PACK_SHIFT = 1 << 26


@dataclass
class MeyerReport:
    radii: list
    min_gap: list  # exact values, aligned with radii
    near_zero: list  # float cross-check values, aligned with radii
    decay_fit: float
    verdict: str
    rate: float | None = None
    gen_labels: list | None = None
    fit_count: int = 0

    def min_gap_floats(self):
        return [g.to_float() for g in self.min_gap]

    def to_jsonable(self):
        return {
            "radii": [float(r.to_float() if isinstance(r, QuadReal) else r)
                      for r in self.radii],
            "min_gap": [g.serialize() for g in self.min_gap],
            "min_gap_float": self.min_gap_floats(),
            "near_zero": self.near_zero,
            "decay_fit": self.decay_fit,
            "verdict": self.verdict,
            "rate": self.rate,
            "gen_labels": self.gen_labels,
        }


def _int_pairs(points, D):
    """Exact (a, b) integer pairs over a common denominator.

    Positions are numbers a + b*sqrt(D) with rational a, b; clearing
    denominators lets numpy do all pair arithmetic in int64.
    """
    den = 1
    for x in points:
        den = math.lcm(den, x.a.denominator, x.b.denominator)
    A = np.array([int(x.a * den) for x in points], dtype=np.int64)
    B = np.array([int(x.b * den) for x in points], dtype=np.int64)
    return A, B, den


def _collect_diffs(A, B, den, D, rmax_f):
    """Unique nonnegative difference pairs with value below the radius.

    Scans sorted positions offset by offset; stops once the smallest
    difference at an offset exceeds the largest radius.  Pairs are
    deduplicated exactly via int64 packing (values determine pairs:
    1 and sqrt(D) are rationally independent).
    """
    sq = math.sqrt(D)
    V = (A + B * sq) / den
    cut = rmax_f * (1 + 1e-12) + 1e-9
    chunks = [np.array([_PACK_OFF * _PACK_SHIFT + _PACK_OFF], dtype=np.int64)]
    pending = 0
    for k in range(1, len(A)):
        dV = V[k:] - V[:-k]
        if dV.min() > cut:
            break
        mask = dV <= cut
        if not mask.any():
            continue
        dA = (A[k:] - A[:-k])[mask]
        dB = (B[k:] - B[:-k])[mask]
        if np.abs(dA).max() >= _PACK_OFF or np.abs(dB).max() >= _PACK_OFF:
            raise InternalCheckError("difference pair outside packing range")
        chunks.append((dA + _PACK_OFF) * _PACK_SHIFT + (dB + _PACK_OFF))
        pending += chunks[-1].size
        if pending > 4_000_000:
            chunks = [np.unique(np.concatenate(chunks))]
            pending = 0
    packed = np.unique(np.concatenate(chunks))
    dA = packed // _PACK_SHIFT - _PACK_OFF
    dB = packed % _PACK_SHIFT - _PACK_OFF
    vals = (dA + dB * sq) / den
    order = np.argsort(vals, kind="stable")
    return dA[order], dB[order], vals[order]


def _exact_leq(dA, dB, den, D, i, r) -> bool:
    v = QuadReal(Fraction(int(dA[i]), den), Fraction(int(dB[i]), den), D)
    return (v - r).sign() <= 0


def _min_gap_at_radius(dA, dB, vals, den, D, r):
    """Exact minimum gap between distinct difference values within r.

    Floats pick the candidates; the winners near the float minimum are
    recomputed exactly.  Membership at the radius boundary is decided
    exactly when the radius is an exact number.
    """
    r_f = r.to_float() if isinstance(r, QuadReal) else float(r)
    n = np.searchsorted(vals, r_f + 1e-6, side="right")
    while n > 0 and vals[n - 1] > r_f - 1e-6:
        if isinstance(r, QuadReal):
            if _exact_leq(dA, dB, den, D, n - 1, r):
                break
        else:
            if vals[n - 1] <= r_f:
                break
        n -= 1
    if n < 2:
        raise DomainError("radius admits fewer than two difference values")
    gaps_f = np.diff(vals[:n])
    m = gaps_f.min()
    best = None
    for i in np.nonzero(gaps_f <= m + 1e-6)[0]:
        g = QuadReal(
            Fraction(int(dA[i + 1] - dA[i]), den),
            Fraction(int(dB[i + 1] - dB[i]), den),
            D,
        )
        if best is None or (g - best).sign() < 0:
            best = g
    if best.sign() <= 0:
        raise InternalCheckError("duplicate value survived deduplication")
    # independent float route: second differences of the rounded value set
    u = np.unique(np.round(vals[:n], 9))
    du = np.diff(u)
    pos = du[du > 1e-8]
    near = float(pos.min()) if pos.size else float("nan")
    if not math.isfinite(near) or abs(near - best.to_float()) > 1e-6 * max(
        1.0, best.to_float()
    ):
        raise InternalCheckError(
            f"gap cross-check disagreement: {near} vs {best.to_float()}"
        )
    return best, near


def meyer_report(points, radii, gen_labels=None) -> MeyerReport:
    """Minimum difference-set gaps per radius, with a decay verdict.

    ``points`` is a sample, a deformed sample, or an explicit list of
    exact positions; ``radii`` must increase.  The gap at radius r is
    the smallest distance between distinct elements of the difference
    set restricted to [-r, r] (zero included), computed exactly; an
    independent float route over second differences is asserted to
    agree.  The verdict compares a least-squares log-gap slope over
    the top half of the radii against fixed thresholds; ``gen_labels``
    supplies the x-axis for the fit when radii grow geometrically.
    """
    if hasattr(points, "physical_values"):
        points = points.physical_values()
    if len(points) < 100:
        raise DomainError("need at least 100 points for a gap report")
    if len(radii) < 1:
        raise ConfigError("need at least one radius")
    rf = [r.to_float() if isinstance(r, QuadReal) else float(r) for r in radii]
    if any(b <= a for a, b in zip(rf, rf[1:])):
        raise ConfigError("radii must be strictly increasing")
    if gen_labels is not None and len(gen_labels) != len(radii):
        raise ConfigError("one generation label per radius required")

    D = points[0].D
    A, B, den = _int_pairs(points, D)
    order = np.argsort((A + B * math.sqrt(D)) / den, kind="stable")
    A, B = A[order], B[order]
    dA, dB, vals = _collect_diffs(A, B, den, D, rf[-1])

    gaps = []
    nears = []
    for r in radii:
        g, nz = _min_gap_at_radius(dA, dB, vals, den, D, r)
        gaps.append(g)
        nears.append(nz)
    for a, b in zip(gaps, gaps[1:]):
        if (b - a).sign() > 0:
            raise InternalCheckError("gap sequence increased with radius")

    half = len(radii) // 2
    xs = (gen_labels[half:] if gen_labels is not None
          else [math.log(r) for r in rf[half:]])
    ys = [math.log(g.to_float()) for g in gaps[half:]]
    if len(xs) >= 2:
        slope = float(np.polyfit(np.array(xs, float), np.array(ys, float), 1)[0])
    else:
        slope = 0.0

    g_f = [g.to_float() for g in gaps]
    top = g_f[half:]
    variation = (max(top) - min(top)) / max(top)
    verdict = "inconclusive"
    rate = None
    if slope < -0.1 and len(radii) >= 5 and g_f[-1] < 1e-3 * g_f[0]:
        verdict = "non-meyer"
        rate = -slope
    elif variation < 0.01:
        verdict = "meyer-consistent"
    return MeyerReport(
        radii=list(radii),
        min_gap=gaps,
        near_zero=nears,
        decay_fit=slope,
        verdict=verdict,
        rate=rate,
        gen_labels=list(gen_labels) if gen_labels is not None else None,
        fit_count=len(xs),
    )


# ---------------------------------------------------------------------------
# pattern equivariance


def is_strongly_pe(sample, values, R, strict=True):
    """Are the values determined by the R-patch alone?

    ``values`` maps sample indices to exact values and must cover the
    margin-R interior (relaxable with strict=False for callers that
    can only evaluate on a subset).  Groups indices by patch class and
    demands exact constancy; returns (True, None) or (False, (i, j))
    with a witnessing index pair.
    """
    if isinstance(R, (int, Fraction)):
        R = QuadReal(Fraction(R), 0, sample.scheme.field_D)
    i, j = _interior_range(sample, R)
    if i >= j:
        raise DomainError("no interior points at this margin")
    if strict:
        missing = [k for k in range(i, j) if k not in values]
        if missing:
            raise DomainError(
                f"values missing for {len(missing)} interior points"
            )
        idxs = range(i, j)
    else:
        idxs = sorted(k for k in values if i <= k < j)
        if not idxs:
            raise DomainError("no evaluable interior points at this margin")
    seen = {}
    for idx in idxs:
        key = patch_class_key(sample, idx, R)
        if key in seen:
            ref_idx, ref_val = seen[key]
            if (values[idx] - ref_val).sign() != 0:
                return False, (ref_idx, idx)
        else:
            seen[key] = (idx, values[idx])
    return True, None


# ---------------------------------------------------------------------------
# singular pairs and the slip probe


def singular_pair(scheme, window, xi, box):
    """The two half-open limit enumerations at a singular offset.

    Demands a singular offset whose window-boundary hits form a single
    translation chain (one hit per boundary point, all hits related by
    lattice vectors whose stars match the corresponding endpoint
    differences); anything else is ambiguous and refused.
    """
    if scheme.torsion:
        raise ConfigError("singular pairs need trivial torsion")
    W = window.component(())
    if len(W.cells) != 1:
        raise DomainError("singular pairs support single-cell windows only")
    cell = W.cells[0]
    hits = []
    for endpoint in (cell.lo, cell.hi):
        tgt = endpoint - xi[0]
        a1, b1 = scheme.i1.a, scheme.i1.b
        a2, b2 = scheme.i2.a, scheme.i2.b
        det = a1 * b2 - a2 * b1
        if det == 0:
            raise DomainError("degenerate internal row; cannot classify offset")
        k1 = (tgt.a * b2 - tgt.b * a2) / det
        k2 = (a1 * tgt.b - b1 * tgt.a) / det
        if k1.denominator == 1 and k2.denominator == 1:
            hits.append(((int(k1), int(k2)), endpoint))
    if not hits:
        raise DomainError("offset is not singular; no boundary hit exists")
    if len(hits) == 2:
        (ka, ea), (kb, eb) = hits
        dk = (kb[0] - ka[0], kb[1] - ka[1])
        if (scheme.internal_of(dk) - (eb - ea)).sign() != 0:
            raise DomainError("boundary hits lie on distinct orbits")
    plus = enumerate_half_open(scheme, window, xi, box, keep_low=True)
    minus = enumerate_half_open(scheme, window, xi, box, keep_low=False)
    return plus, minus, hits


@dataclass
class NonslipReport:
    radii: list
    tested: list
    disagreements: list
    max_disagreement_radius: object
    label: str
    symmetric_difference: list = field(default_factory=list)

    def to_jsonable(self):
        return {
            "radii": [float(r) for r in self.radii],
            "tested": self.tested,
            "disagreements": self.disagreements,
            "max_disagreement_radius": (
                None if self.max_disagreement_radius is None
                else float(self.max_disagreement_radius)
            ),
            "label": self.label,
            "symmetric_difference": self.symmetric_difference,
        }


def rank_fraction_table(alpha=None):
    """Factory for a bounded, patch-incoherent table generator.

    The value at a point is the fractional part of alpha times the
    point's rank in star order, which depends on the whole
    enumeration, not on any finite patch.  Used as the designated
    slip example.
    """

    def build(sample):
        D = sample.scheme.field_D
        a = alpha if alpha is not None else (
            QuadReal(Fraction(-1, 2), Fraction(1, 2), D)
        )
        stars = [(sample.star(p), i) for i, p in enumerate(sample.points)]
        stars.sort(key=lambda t: (t[0].to_float(), t[1]))
        # exact fixup of the float presort
        for i in range(1, len(stars)):
            j = i
            while j > 0 and (stars[j][0] - stars[j - 1][0]).sign() < 0:
                stars[j - 1], stars[j] = stars[j], stars[j - 1]
                j -= 1
        values = {}
        for rank, (_, idx) in enumerate(stars):
            v = a * rank
            frac = v - QuadReal(v.floor(), 0, D)
            values[sample.points[idx].phys.serialize()] = frac
        return Table(values, QuadReal(1, 0, D))

    return build


def nonslip_probe(scheme, window, xi, F, radii, box) -> NonslipReport:
    """Compare generator values across a singular limit-set pair.

    Builds the two half-open limit sets, finds points present in both
    whose patches agree out to each radius, and evaluates the
    generator on each set's own data at those points.  A generator
    whose values depend only on local pattern must agree once the
    radius covers its dependence; persistent disagreement out to the
    largest radius is the slip signature.  Results are labeled
    consistent-with-nonslip, never proofs.
    """
    plus, minus, _hits = singular_pair(scheme, window, xi, box)
    F_plus = F(plus) if callable(F) and not hasattr(F, "value_at") else F
    F_minus = F(minus) if callable(F) and not hasattr(F, "value_at") else F

    idx_minus = {p.phys.serialize(): i for i, p in enumerate(minus.points)}
    common = []
    for i, p in enumerate(plus.points):
        j = idx_minus.get(p.phys.serialize())
        if j is not None:
            common.append((i, j))
    idx_plus = {p.phys.serialize(): i for i, p in enumerate(plus.points)}
    sym = sorted(
        {p.phys.serialize() for p in plus.points
         if p.phys.serialize() not in idx_minus}
        | {p.phys.serialize() for p in minus.points
           if p.phys.serialize() not in idx_plus}
    )

    tested = []
    disagreements = []
    max_bad = None
    D = scheme.field_D
    for R in radii:
        Rq = R if isinstance(R, QuadReal) else QuadReal(Fraction(R), 0, D)
        ip, jp = _interior_range(plus, Rq)
        im, jm = _interior_range(minus, Rq)
        n_test = 0
        n_bad = 0
        for i, j in common:
            if not (ip <= i < jp and im <= j < jm):
                continue
            dp = _displacements_at(plus, i, Rq)
            dm = _displacements_at(minus, j, Rq)
            if len(dp) != len(dm) or any(
                (a - b).sign() != 0 for a, b in zip(dp, dm)
            ):
                continue
            n_test += 1
            vp = F_plus.value_at(plus, i)
            vm = F_minus.value_at(minus, j)
            if (vp - vm).sign() != 0:
                n_bad += 1
        if n_test == 0:
            raise DomainError(f"no patch-matched common points at radius {R}")
        tested.append(n_test)
        disagreements.append(n_bad)
        if n_bad:
            max_bad = R
    label = (
        "consistent-with-nonslip" if disagreements[-1] == 0 else "slip-detected"
    )
    return NonslipReport(
        radii=list(radii),
        tested=tested,
        disagreements=disagreements,
        max_disagreement_radius=max_bad,
        label=label,
        symmetric_difference=sym,
    )


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class DecompositionResult:
    L: QuadReal
    psi_values: dict
    psi_radius: object  # int or None
    residual_linf: object

    def to_jsonable(self):
        return {
            "L": self.L.serialize(),
            "L_float": self.L.to_float(),
            "psi_radius": self.psi_radius,
            "residual_linf": (
                None if self.residual_linf is None
                else self.residual_linf.serialize()
            ),
            "psi_support": len(self.psi_values),
        }


def _fit_within_classes(sample, f_values, idxs, R):
    """Least-squares slope of F against the star over same-class steps.

    Differences of consecutive same-class points cancel any function
    of the R-patch, leaving a pure linear regression on star
    differences; with an exactly star-linear-plus-local model the
    rational normal equations recover the slope exactly.
    """
    D = sample.scheme.field_D
    zero = QuadReal(0, 0, D)
    sxx = zero
    sxy = zero
    last_by_class = {}
    for idx in idxs:
        key = patch_class_key(sample, idx, R)
        if key in last_by_class:
            prev = last_by_class[key]
            ds = sample.star(sample.points[idx]) - sample.star(sample.points[prev])
            df = f_values[idx] - f_values[prev]
            sxx = sxx + ds * ds
            sxy = sxy + ds * df
        last_by_class[key] = idx
    if sxx.sign() == 0:
        return None
    return sxy / sxx


def decompose_generator(sample: PointSample, F, R_max: int) -> DecompositionResult:
    """Split a generator into star-linear part plus patch-local rest.

    For each radius R up to R_max: fit the linear coefficient on
    same-class consecutive differences, subtract, and test the
    residual for strong pattern equivariance at R.  The first radius
    that passes wins.  If none passes, the reported coefficient is the
    radius-0 fit and the residual is left per-point with no radius.
    """
    if len(sample.points) < 200:
        raise DomainError("need at least 200 points to decompose")
    margin_F = F.margin(sample)
    D = sample.scheme.field_D
    fallback = None
    for R in range(0, R_max + 1):
        Rq = QuadReal(Fraction(R), 0, D)
        margin = Rq if (Rq - margin_F).sign() >= 0 else margin_F
        i, j = _interior_range(sample, margin)
        if j - i < 2:
            break
        idxs = list(range(i, j))
        f_values = {idx: F.value_at(sample, idx) for idx in idxs}
        L = _fit_within_classes(sample, f_values, idxs, Rq)
        if L is None:
            if R == 0:
                raise DomainError("degenerate star spread; fit is singular")
            continue
        psi = {
            idx: f_values[idx] - L * sample.star(sample.points[idx])
            for idx in idxs
        }
        if R == 0:
            fallback = (L, psi)
        ok, _witness = is_strongly_pe(sample, psi, Rq, strict=False)
        if ok:
            # exact coherence certificate: max within-class deviation
            reps = {}
            linf = QuadReal(0, 0, D)
            for idx in idxs:
                key = patch_class_key(sample, idx, Rq)
                if key in reps:
                    dev = abs(psi[idx] - reps[key])
                    if (dev - linf).sign() > 0:
                        linf = dev
                else:
                    reps[key] = psi[idx]
            return DecompositionResult(L, psi, R, linf)
    if fallback is None:
        raise DomainError("degenerate star spread; fit is singular")
    L, psi = fallback
    return DecompositionResult(L, psi, None, None)
