"""Cut-and-project schemes: lattices, windows, enumeration, star maps.

A scheme holds an (n+d) x (n+d) basis whose columns generate the
lattice; the first n rows are internal coordinates, the last d rows
physical ones.  A finite torsion component is carried as labels on
basis columns.  Exact mode (the only fully supported one) requires
d = n = 1 with interval windows; every accept/reject decision is made
in the quadratic field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, SingularParameterError, InternalCheckError
from .intervals import Cell, IntervalSet
from .quadfield import QuadReal, parse_quadreal

__all__ = [
    "CutProjectScheme",
    "WindowRegion",
    "LatticePoint",
    "PointSample",
    "DeformedSample",
    "Candidate",
    "validate_scheme",
    "enumerate_model_set",
    "enumerate_half_open",
    "star_of",
    "is_nonsingular",
    "reproject",
    "displacement_candidates",
    "min_candidate_spacing",
    "scheme_from_config",
    "sample_to_text",
]


@dataclass(frozen=True)
class CutProjectScheme:
    d: int
    n: int
    torsion: tuple
    basis: tuple  # rows; each row a tuple of QuadReal; columns generate
    torsion_labels: tuple
    field_D: int = 5
    mode: str = "exact"

    def __post_init__(self):
        size = self.n + self.d
        if len(self.basis) != size or any(len(r) != size for r in self.basis):
            raise ConfigError(f"basis must be {size}x{size}")
        if self.mode == "exact" and (self.d != 1 or self.n != 1):
            raise ConfigError("exact mode supports d = n = 1 only")
        if len(self.torsion_labels) != size:
            raise ConfigError("one torsion label per basis column required")

    # 1D accessors (exact mode)
    @property
    def i1(self) -> QuadReal:
        return self.basis[0][0]

    @property
    def i2(self) -> QuadReal:
        return self.basis[0][1]

    @property
    def p1(self) -> QuadReal:
        return self.basis[1][0]

    @property
    def p2(self) -> QuadReal:
        return self.basis[1][1]

    def determinant(self) -> QuadReal:
        return self.i1 * self.p2 - self.i2 * self.p1

    def internal_of(self, coords) -> QuadReal:
        return self.i1 * coords[0] + self.i2 * coords[1]

    def physical_of(self, coords) -> QuadReal:
        return self.p1 * coords[0] + self.p2 * coords[1]

    def label_of(self, coords) -> tuple:
        if not self.torsion:
            return ()
        acc = [0] * len(self.torsion)
        for k, lab in zip(coords, self.torsion_labels):
            for idx, (v, order) in enumerate(zip(lab, self.torsion)):
                acc[idx] = (acc[idx] + k * v) % order
        return tuple(acc)


class WindowRegion:
    """Per-torsion-component interval sets; compact, interior-closed."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = dict(components)
        for key, region in self.components.items():
            if not isinstance(region, IntervalSet) or region.is_empty():
                raise ConfigError(f"window component {key!r} must be nonempty")
            reg = region.regularize()
            if not (reg == region.closure()):
                raise ConfigError(
                    f"window component {key!r} is not the closure of its interior"
                )
            self.components[key] = region.closure()

    @classmethod
    def single_interval(cls, lo: QuadReal, hi: QuadReal) -> "WindowRegion":
        return cls({(): IntervalSet.closed(lo, hi)})

    def component(self, label) -> IntervalSet:
        try:
            return self.components[label]
        except KeyError:
            raise ConfigError(f"no window component for torsion label {label!r}")

    def difference_set(self) -> IntervalSet:
        """All differences w - w' over the whole window (all components)."""
        out = IntervalSet.empty()
        cells = [c for reg in self.components.values() for c in reg.cells]
        for a in cells:
            for b in cells:
                out = out.union(IntervalSet.closed(a.lo - b.hi, a.hi - b.lo))
        return out

    def total_length(self):
        acc = 0
        for reg in self.components.values():
            acc = reg.total_length() + acc
        return acc


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple
    torsion_part: tuple
    phys: QuadReal
    internal: QuadReal


class PointSample:
    """Complete enumeration of a projection set inside a physical box.

    Points are sorted by physical coordinate; the minimum nearest
    neighbour gap is recorded and asserted positive (uniform
    discreteness of the sample).
    """

    __slots__ = (
        "scheme", "window", "xi", "box", "points", "min_gap",
        "_fphys", "_fstars",
    )

    def __init__(self, scheme, window, xi, box, points):
        self.scheme = scheme
        self.window = window
        self.xi = xi
        self.box = box
        self.points = points
        gap = None
        for a, b in zip(points, points[1:]):
            g = b.phys - a.phys
            if gap is None or g < gap:
                gap = g
        self.min_gap = gap
        if gap is not None and gap.sign() <= 0:
            raise InternalCheckError("sample is not uniformly discrete")
        self._fphys = None
        self._fstars = None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def physical_values(self):
        return [p.phys for p in self.points]

    def float_physical(self):
        """Cached float positions, ascending like ``points``."""
        if self._fphys is None:
            self._fphys = np.array([p.phys.to_float() for p in self.points])
        return self._fphys

    def float_stars(self):
        if self._fstars is None:
            self._fstars = np.array(
                [self.star(p).to_float() for p in self.points]
            )
        return self._fstars

    def star(self, point: LatticePoint) -> QuadReal:
        return star_of(point, self.xi)

    def stars(self):
        return [self.star(p) for p in self.points]

    def index_by_phys(self):
        return {p.phys: i for i, p in enumerate(self.points)}


class DeformedSample:
    """Image of a sample under a pointwise deformation.

    Keeps each output point's pre-image lattice data; output order is
    by deformed physical coordinate.
    """

    __slots__ = ("base", "pairs", "trimmed_margin")

    def __init__(self, base, pairs, trimmed_margin=None):
        self.base = base
        self.pairs = sorted(pairs, key=lambda t: t[0].to_float())
        # exact fixup of the float presort
        p = self.pairs
        for i in range(1, len(p)):
            j = i
            while j > 0 and (p[j][0] - p[j - 1][0]).sign() < 0:
                p[j - 1], p[j] = p[j], p[j - 1]
                j -= 1
        self.trimmed_margin = trimmed_margin

    def __len__(self):
        return len(self.pairs)

    def physical_values(self):
        return [x for x, _ in self.pairs]

    def preimages(self):
        return [pt for _, pt in self.pairs]

    def star(self, i: int) -> QuadReal:
        return star_of(self.pairs[i][1], self.xi)

    @property
    def xi(self):
        # deformations never move the lattice lift, so the offset is
        # inherited through any chain of deformed samples
        return self.base.xi


def star_of(point: LatticePoint, xi) -> QuadReal:
    """Internal coordinate of the point's lattice lift, offset included."""
    return point.internal + xi[0]


# ---------------------------------------------------------------------------
# construction and validation


def validate_scheme(scheme: CutProjectScheme, bound: int = 10**4) -> dict:
    """Diagnostics: determinant, injectivity, internal-density proxy.

    The zero-physical-part question for d = n = 1 reduces to whether
    p2/p1 is rational, which is decided exactly; the verdict is still
    phrased as verified-up-to-bound to keep the report shape uniform.
    The density proxy searches coords up to the bound for the smallest
    nonzero |internal| value; a lattice whose internal parts lie in a
    discrete set (rational slope) stalls at a positive floor, which
    fails the check.
    """
    det = scheme.determinant()
    if det.sign() == 0:
        raise ConfigError("singular basis")

    report = {
        "determinant": det,
        "bound": bound,
        "zero_physical_witness": None,
        "injectivity": "verified-up-to-bound",
        "min_internal_abs": None,
        "min_internal_witness": None,
        "density_ok": None,
    }

    # assumption: no nonzero lattice vector projects to physical zero.
    # k1 p1 + k2 p2 = 0 with (k1, k2) nonzero integers requires p2/p1
    # rational (or a zero column handled via the determinant above).
    if scheme.p1.sign() == 0 or scheme.p2.sign() == 0:
        if scheme.p1.sign() == 0 and scheme.p2.sign() == 0:
            report["zero_physical_witness"] = (1, 0)
            report["injectivity"] = "violated"
        # one zero physical column: that column itself is a witness
        elif scheme.p1.sign() == 0:
            report["zero_physical_witness"] = (1, 0)
            report["injectivity"] = "violated"
        else:
            report["zero_physical_witness"] = (0, 1)
            report["injectivity"] = "violated"
    else:
        ratio = scheme.p2 / scheme.p1
        if ratio.is_rational():
            q = ratio.a
            report["zero_physical_witness"] = (q.numerator, -q.denominator)
            report["injectivity"] = "violated"

    # density proxy: best |k1 i1 + k2 i2| over 0 < |k| <= bound.
    # float search locates the champion, exact arithmetic confirms it.
    i1f, i2f = scheme.i1.to_float(), scheme.i2.to_float()
    best = None
    best_k = None
    if i1f == 0 and i2f == 0:
        report["min_internal_abs"] = QuadReal(0, 0, scheme.field_D)
        report["density_ok"] = False
        return report
    for k2 in range(-bound, bound + 1):
        if i1f != 0:
            k1 = round(-k2 * i2f / i1f)
        else:
            k1 = 0
        for kk in (k1 - 1, k1, k1 + 1):
            if kk == 0 and k2 == 0:
                continue
            if abs(kk) > bound:
                continue
            v = abs(kk * i1f + k2 * i2f)
            if v < 1e-12 and scheme.internal_of((kk, k2)).sign() == 0:
                # an exactly vanishing internal part says nothing about
                # density; it marks a degenerate internal direction
                continue
            if best is None or v < best:
                best = v
                best_k = (kk, k2)
    exact_best = abs(scheme.internal_of(best_k))
    report["min_internal_abs"] = exact_best
    report["min_internal_witness"] = best_k
    scale = max(abs(scheme.i1.to_float()), abs(scheme.i2.to_float()))
    report["density_ok"] = exact_best.to_float() < scale / (bound ** 0.5)
    return report


def _exact_div_range(lo, hi, coef):
    """Integer k with lo <= k*coef <= hi, as an inclusive range."""
    s = coef.sign()
    if s == 0:
        raise InternalCheckError("zero coefficient in range solve")
    if s > 0:
        return (lo / coef).ceil(), (hi / coef).floor()
    return (hi / coef).ceil(), (lo / coef).floor()


def _slab_points(scheme, window, xi, box, accept):
    """Sorted LatticePoints of the slab, filtered by accept(label, w).

    Integer coordinate ranges are derived exactly from the window hull
    and box constraints (corner images under the inverse basis), so
    the scan is complete by construction.  ``accept`` sees the torsion
    label and the star value of every in-box lattice point whose star
    lies in the closed window hull.
    """
    if scheme.mode != "exact":
        raise ConfigError("enumeration implemented for exact mode")
    xi_int, xi_phys = xi
    blo, bhi = box
    if (bhi - blo).sign() < 0:
        raise ConfigError("empty box")

    hulls = [reg.hull() for reg in window.components.values()]
    wlo = min((h.lo for h in hulls), key=lambda v: v.to_float())
    whi = max((h.hi for h in hulls), key=lambda v: v.to_float())
    # exact min/max fixup (floats only pick the candidate)
    for h in hulls:
        if (h.lo - wlo).sign() < 0:
            wlo = h.lo
        if (h.hi - whi).sign() > 0:
            whi = h.hi

    IL, IH = wlo - xi_int, whi - xi_int
    PL, PH = blo - xi_phys, bhi - xi_phys

    det = scheme.determinant()
    if det.sign() == 0:
        raise ConfigError("singular basis")
    # k2 = (i1*physical - p1*internal)/det ranges over corner images
    corners = [
        (scheme.i1 * P - scheme.p1 * I) / det
        for I in (IL, IH)
        for P in (PL, PH)
    ]
    k2_lo = min(corners, key=lambda v: v.to_float())
    k2_hi = max(corners, key=lambda v: v.to_float())
    for c in corners:
        if (c - k2_lo).sign() < 0:
            k2_lo = c
        if (c - k2_hi).sign() > 0:
            k2_hi = c

    points = []
    for k2 in range(k2_lo.floor(), k2_hi.ceil() + 1):
        # k1 range from whichever constraint pins it
        if scheme.i1.sign() != 0:
            a_lo, a_hi = _exact_div_range(IL - scheme.i2 * k2, IH - scheme.i2 * k2, scheme.i1)
        else:
            a_lo, a_hi = None, None
        if scheme.p1.sign() != 0:
            b_lo, b_hi = _exact_div_range(PL - scheme.p2 * k2, PH - scheme.p2 * k2, scheme.p1)
        else:
            b_lo, b_hi = None, None
        if a_lo is None:
            k1_lo, k1_hi = b_lo, b_hi
        elif b_lo is None:
            k1_lo, k1_hi = a_lo, a_hi
        else:
            k1_lo, k1_hi = max(a_lo, b_lo), min(a_hi, b_hi)
        for k1 in range(k1_lo, k1_hi + 1):
            coords = (k1, k2)
            internal = scheme.internal_of(coords)
            phys = scheme.physical_of(coords)
            x = phys + xi_phys
            if (x - blo).sign() < 0 or (bhi - x).sign() < 0:
                continue
            label = scheme.label_of(coords)
            if label not in window.components:
                continue
            w = internal + xi_int
            if accept(label, w, coords):
                points.append(LatticePoint(coords, label, x, internal))

    points.sort(key=lambda p: p.phys.to_float())
    for i in range(1, len(points)):
        j = i
        while j > 0 and (points[j].phys - points[j - 1].phys).sign() < 0:
            points[j - 1], points[j] = points[j], points[j - 1]
            j -= 1
    return points


def enumerate_model_set(scheme, window, xi, box) -> PointSample:
    """All points of the projection set inside the physical box.

    The scan is complete by construction (exact coordinate ranges).
    Any lattice star landing exactly on a window boundary aborts with
    the offending lattice point: such an offset has no single
    well-defined projection set.
    """
    boundary = {
        key: reg.boundary_points() for key, reg in window.components.items()
    }
    interiors = {
        key: reg.interior() for key, reg in window.components.items()
    }

    def accept(label, w, coords):
        for bp in boundary[label]:
            if (w - bp).sign() == 0:
                raise SingularParameterError(
                    f"offset is singular: lattice point {coords} lands on "
                    f"the window boundary at {bp}",
                    witness=coords,
                )
        return interiors[label].contains(w)

    points = _slab_points(scheme, window, xi, box, accept)
    return PointSample(scheme, window, xi, box, points)


def enumerate_half_open(scheme, window, xi, box, keep_low: bool) -> PointSample:
    """Variant enumeration with a half-open window convention per cell.

    ``keep_low=True`` takes each cell as [lo, hi); False takes (lo, hi].
    This realizes the two limit sets of a singular offset exactly; for
    a non-singular offset both conventions give the ordinary set.
    """

    def accept(label, w, coords):
        region = window.components[label]
        for cell in region.cells:
            lo_ok = (w - cell.lo).sign() > 0 or (
                keep_low and (w - cell.lo).sign() == 0
            )
            hi_ok = (cell.hi - w).sign() > 0 or (
                (not keep_low) and (cell.hi - w).sign() == 0
            )
            if lo_ok and hi_ok:
                return True
        return False

    points = _slab_points(scheme, window, xi, box, accept)
    return PointSample(scheme, window, xi, box, points)


def is_nonsingular(scheme, window, xi, bound: int = 10**5):
    """Exact boundary test; ('verified-up-to-bound', bound) or ('singular', w).

    For d = n = 1 the question whether some lattice point's star hits a
    window-cell endpoint is a 2x2 rational linear solve per endpoint,
    so the answer is exact for all lattice points at once; a rank
    deficient system falls back to a bounded scan.
    """
    xi_int = xi[0]
    D = scheme.field_D
    for label, region in window.components.items():
        for e in region.boundary_points():
            tgt = e - xi_int  # need k1 i1 + k2 i2 = tgt
            a1, b1 = scheme.i1.a, scheme.i1.b
            a2, b2 = scheme.i2.a, scheme.i2.b
            ta, tb = tgt.a, tgt.b
            det = a1 * b2 - a2 * b1
            if det != 0:
                k1 = (ta * b2 - tb * a2) / det
                k2 = (a1 * tb - b1 * ta) / det
                if k1.denominator == 1 and k2.denominator == 1:
                    coords = (int(k1), int(k2))
                    if scheme.label_of(coords) == label:
                        return ("singular", coords)
            else:
                for k2 in range(-bound, bound + 1):
                    rem = tgt - scheme.i2 * k2
                    if scheme.i1.sign() == 0:
                        if rem.sign() == 0 and scheme.label_of((0, k2)) == label:
                            return ("singular", (0, k2))
                        continue
                    q = rem / scheme.i1
                    if q.is_rational() and q.a.denominator == 1:
                        coords = (int(q.a), k2)
                        if scheme.label_of(coords) == label:
                            return ("singular", coords)
    return ("verified-up-to-bound", bound)


def reproject(sample, L: QuadReal) -> DeformedSample:
    """Shear the projection direction: each x maps to x + L(star(x)).

    The output keeps pre-image lattice coordinates and accepts an
    already deformed sample, so composing with -L restores the
    original exactly.
    """
    if isinstance(sample, DeformedSample):
        items = sample.pairs
    else:
        items = [(pt.phys, pt) for pt in sample.points]
    xi = sample.xi
    pairs = []
    for x, pt in items:
        pairs.append((x + L * star_of(pt, xi), pt))
    return DeformedSample(sample, pairs)


@dataclass(frozen=True)
class Candidate:
    """Lattice displacement vector: coords, physical part, star."""
    coords: tuple
    phys: QuadReal
    star: QuadReal


def displacement_candidates(scheme, window, bound) -> list:
    """Lattice vectors whose star lies in the closed difference window.

    A superset of all displacement vectors that can occur between two
    points of one projection set; symmetric, contains 0.  ``bound`` is
    the physical radius.
    """
    diff = window.difference_set()
    hull = diff.hull()
    b = QuadReal(bound, 0, scheme.field_D) if not isinstance(bound, QuadReal) else bound
    IL, IH = hull.lo, hull.hi
    PL, PH = -b, b

    det = scheme.determinant()
    corners = [
        (scheme.i1 * P - scheme.p1 * I) / det
        for I in (IL, IH)
        for P in (PL, PH)
    ]
    k2_lo = min(corners, key=lambda v: v.to_float())
    k2_hi = max(corners, key=lambda v: v.to_float())
    for c in corners:
        if (c - k2_lo).sign() < 0:
            k2_lo = c
        if (c - k2_hi).sign() > 0:
            k2_hi = c

    out = []
    for k2 in range(k2_lo.floor(), k2_hi.ceil() + 1):
        if scheme.i1.sign() != 0:
            k1_lo, k1_hi = _exact_div_range(IL - scheme.i2 * k2, IH - scheme.i2 * k2, scheme.i1)
        else:
            k1_lo, k1_hi = _exact_div_range(PL - scheme.p2 * k2, PH - scheme.p2 * k2, scheme.p1)
        for k1 in range(k1_lo, k1_hi + 1):
            internal = scheme.internal_of((k1, k2))
            phys = scheme.physical_of((k1, k2))
            if (phys - PH).sign() > 0 or (PL - phys).sign() > 0:
                continue
            if diff.contains(internal):
                out.append(Candidate((k1, k2), phys, internal))
    out.sort(key=lambda c: c.phys.to_float())
    return out


def min_candidate_spacing(scheme, window, bound) -> QuadReal:
    """Smallest distance between distinct displacement candidates.

    Any enumerated sample's difference set is a subset of the
    candidates, so this is a certified lower bound for min-gap reports
    at radii up to the bound.
    """
    cands = [c.phys for c in displacement_candidates(scheme, window, bound)]
    best = None
    for a, b in zip(cands, cands[1:]):
        g = b - a
        if g.sign() <= 0:
            continue
        if best is None or (g - best).sign() < 0:
            best = g
    if best is None:
        raise InternalCheckError("fewer than two displacement candidates")
    return best


# ---------------------------------------------------------------------------
# config plumbing


def _window_from_config(obj, D):
    comps = {}
    for key, cells in obj.items():
        label = () if key in ("0", "", "e") else tuple(int(t) for t in key.split("+"))
        region = IntervalSet(
            [
                Cell(parse_quadreal(lo, D), parse_quadreal(hi, D))
                for lo, hi in cells
            ]
        )
        comps[label] = region
    return WindowRegion(comps)


def scheme_from_config(cfg: dict):
    """Build (scheme, window, xi) from a config dictionary.

    Expected fields: d, n, torsion, basis (rows of field-element
    strings; columns generate the lattice), window (component key to
    list of [lo, hi] cells), xi (n+d field-element strings), mode,
    field_D, and optionally torsion_labels.
    """
    try:
        d = int(cfg["d"])
        n = int(cfg["n"])
        D = int(cfg.get("field_D", 5))
        mode = cfg.get("mode", "exact")
        torsion = tuple(int(t) for t in cfg.get("torsion", []))
        basis_rows = cfg["basis"]
        basis = tuple(
            tuple(parse_quadreal(v, D) for v in row) for row in basis_rows
        )
        labels_cfg = cfg.get("torsion_labels")
        if labels_cfg is None:
            labels = tuple(tuple(0 for _ in torsion) for _ in range(n + d))
        else:
            labels = tuple(tuple(int(v) for v in lab) for lab in labels_cfg)
        scheme = CutProjectScheme(
            d=d, n=n, torsion=torsion, basis=basis,
            torsion_labels=labels, field_D=D, mode=mode,
        )
        if n + d == 2 and scheme.determinant().sign() == 0:
            raise ConfigError("singular basis")
        window = _window_from_config(cfg["window"], D)
        xi_vals = [parse_quadreal(v, D) for v in cfg["xi"]]
        if len(xi_vals) != n + d:
            raise ConfigError(f"xi must have {n + d} components")
        xi = (xi_vals[0], xi_vals[1]) if n + d == 2 else tuple(xi_vals)
    except KeyError as e:
        raise ConfigError(f"missing config field {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed config: {e}") from None
    return scheme, window, xi


def sample_to_text(sample) -> str:
    """One point per line: exact form, tab, float form."""
    lines = []
    for x in sample.physical_values():
        lines.append(f"{x.serialize()}\t{x.to_float():.12f}")
    return "\n".join(lines) + ("\n" if lines else "")
