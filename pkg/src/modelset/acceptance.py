"""Acceptance domains of patches and patch localization.

The acceptance domain of a finite patch P (anchored at 0, inside a
ball of radius B) is the part of the window whose points admit exactly
that patch: the intersection of the shifted open window over patch
points, minus the shifted closed window over the displacement
candidates that are absent from the patch.  Everything here is exact
interval algebra; the exposed domain is always the closure of the
computed interior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    IncompleteKnowledgeError,
    InternalCheckError,
    SampleTooSmallError,
    UnrealizablePatchError,
)
from .intervals import Cell, IntervalSet
from .quadfield import QuadReal
from .scheme import PointSample, displacement_candidates

__all__ = [
    "Patch",
    "AcceptanceDomain",
    "extract_patch",
    "acceptance_domain",
    "verify_acceptance",
    "localizing_patch",
]


@dataclass(frozen=True)
class Patch:
    """Finite point set around an anchor, translated so the anchor is 0.

    ``points`` are exact physical displacements in ascending order and
    always include 0; ``coords`` are the matching lattice coordinate
    differences, so displacement stars need no offset.
    """

    points: tuple
    coords: tuple
    radius: QuadReal
    source: PointSample
    anchor_index: int

    def __post_init__(self):
        if not any(p.sign() == 0 for p in self.points):
            raise InternalCheckError("patch must contain its anchor")
        if len(self.points) != len(self.coords):
            raise InternalCheckError("patch points/coords misaligned")

    def __len__(self):
        return len(self.points)

    def displacement_stars(self):
        scheme = self.source.scheme
        return [scheme.internal_of(c) for c in self.coords]

    def key(self):
        """Canonical identity of the patch's translation class."""
        return tuple(p.serialize() for p in self.points)


@dataclass(frozen=True)
class AcceptanceDomain:
    """Exact interval region in internal space characterizing a patch.

    ``cells`` is the closed exposure (closure of ``interior``);
    ``complement_witnesses`` records the absent displacement vectors
    that carved the domain out of the window.
    """

    cells: IntervalSet
    interior: IntervalSet
    patch: Patch
    complement_witnesses: tuple

    def contains_interior(self, w: QuadReal) -> bool:
        return self.interior.contains(w)

    def to_jsonable(self):
        return {
            "cells": [
                [c.lo.serialize(), c.hi.serialize()] for c in self.cells.cells
            ],
            "patch_points": [p.serialize() for p in self.patch.points],
            "radius": self.patch.radius.serialize(),
            "complement_witnesses": [
                w.serialize() for w in self.complement_witnesses
            ],
        }


def _as_radius(R, D):
    if isinstance(R, QuadReal):
        return R
    from fractions import Fraction

    return QuadReal(Fraction(R), 0, D)


def _resolve_index(sample, x):
    if isinstance(x, int):
        if not 0 <= x < len(sample.points):
            raise ConfigError(f"sample index {x} out of range")
        return x
    for i, p in enumerate(sample.points):
        if (p.phys - x.phys).sign() == 0:
            return i
    raise ConfigError("point is not in the sample")


def extract_patch(sample: PointSample, x, R) -> Patch:
    """The ball patch of the sample at x, translated to the origin.

    The closed ball must lie inside the sample's box; a ball reaching
    past the box raises rather than silently truncating.
    """
    idx = _resolve_index(sample, x)
    center = sample.points[idx]
    R = _as_radius(R, sample.scheme.field_D)
    if R.sign() < 0:
        raise ConfigError("negative patch radius")
    blo, bhi = sample.box
    if (center.phys - R - blo).sign() < 0 or (bhi - center.phys - R).sign() < 0:
        raise IncompleteKnowledgeError(
            "patch ball reaches past the sample box"
        )
    pts = []
    coords = []
    # walk outward from the center; the sample is sorted by position
    i = idx
    while i >= 0 and (center.phys - sample.points[i].phys - R).sign() <= 0:
        i -= 1
    j = idx
    last = len(sample.points) - 1
    while j <= last and (sample.points[j].phys - center.phys - R).sign() <= 0:
        j += 1
    for k in range(i + 1, j):
        q = sample.points[k]
        pts.append(q.phys - center.phys)
        coords.append(
            tuple(a - b for a, b in zip(q.coords, center.coords))
        )
    return Patch(tuple(pts), tuple(coords), R, sample, idx)


def acceptance_domain(scheme, window, patch: Patch) -> AcceptanceDomain:
    """Exact acceptance domain of the patch in the window.

    Supported for trivial torsion. The candidate set for absent
    displacements is complete by construction (exact slab ranges), so
    no search-bound escalation is ever needed; the empty result means
    the patch is incompatible with the window.
    """
    if scheme.torsion:
        raise ConfigError("acceptance domains need trivial torsion")
    W = window.component(())
    interior = W.interior()
    present = {p.serialize() for p in patch.points}
    for star in patch.displacement_stars():
        interior = interior.intersect(W.interior().translate(-star))

    witnesses = []
    for cand in displacement_candidates(scheme, window, patch.radius):
        if (abs(cand.phys) - patch.radius).sign() > 0:
            continue
        if cand.phys.serialize() in present:
            continue
        witnesses.append(cand.phys)
        interior = interior.minus(W.translate(-cand.star))

    if interior.is_empty():
        raise UnrealizablePatchError(
            "patch admits no window point; it cannot occur"
        )
    closed = interior.closure()
    return AcceptanceDomain(closed, interior, patch, tuple(witnesses))


def _patch_displacements_at(sample, idx, R):
    """Displacements of sample points within R of point idx (exact)."""
    center = sample.points[idx]
    out = []
    i = idx
    while i >= 0 and (center.phys - sample.points[i].phys - R).sign() <= 0:
        i -= 1
    j = idx
    last = len(sample.points) - 1
    while j <= last and (sample.points[j].phys - center.phys - R).sign() <= 0:
        j += 1
    for k in range(i + 1, j):
        out.append(sample.points[k].phys - center.phys)
    return out


def verify_acceptance(sample: PointSample, patch: Patch, domain) -> dict:
    """Empirical two-way check of the patch/domain correspondence.

    For every sample point whose patch ball fits in the box: the star
    lying in the domain's interior must coincide with the point's ball
    patch equalling the given patch.  Stars on the domain boundary are
    skipped and counted.  Report-carrying; never raises on mismatches.

    Decisions run on a float fast path.  This is rigorous away from
    edges: distinct displacement values in a bounded ball differ by a
    fixed field-dependent floor (far above 1e-7) while accumulated
    float error stays below 1e-9; anything inside the 1e-7 band around
    a decision edge is re-derived exactly, as is every prospective
    miss before it is reported.
    """
    R = patch.radius
    blo, bhi = sample.box
    target = patch.points
    K = len(target)
    xs = sample.float_physical()
    ws = sample.float_stars()
    rf = R.to_float()
    blo_f = blo.to_float()
    bhi_f = bhi.to_float()
    tol = 1e-7
    disp_f = [p.to_float() for p in target]
    lo_idx = np.searchsorted(xs, xs - (rf + tol), side="left")
    hi_idx = np.searchsorted(xs, xs + (rf + tol), side="right")
    int_cells = [(c.lo.to_float(), c.hi.to_float())
                 for c in domain.interior.cells]

    # exact ball membership for displacements within tol of the radius,
    # resolved once per distinct value (distinct values never collide
    # at 6 decimals)
    edge_cache: dict = {}

    def edge_inside(i: int, j: int) -> bool:
        key = round(xs[j] - xs[i], 6)
        v = edge_cache.get(key)
        if v is None:
            d = sample.points[j].phys - sample.points[i].phys
            v = (abs(d) - R).sign() <= 0
            edge_cache[key] = v
        return v

    hits = 0
    misses = 0
    boundary_skips = 0
    n = len(sample.points)
    for i in range(n):
        x = xs[i]
        m_lo = x - rf - blo_f
        m_hi = bhi_f - x - rf
        if m_lo < -tol or m_hi < -tol:
            continue
        pt = None
        if m_lo <= tol or m_hi <= tol:
            pt = sample.points[i]
            if (pt.phys - R - blo).sign() < 0 or (bhi - pt.phys - R).sign() < 0:
                continue

        w = ws[i]
        inside = False
        near = False
        for a, b in int_cells:
            if a + tol < w < b - tol:
                inside = True
                break
            if a - tol <= w <= b + tol:
                near = True
        if near and not inside:
            if pt is None:
                pt = sample.points[i]
            wq = sample.star(pt)
            inside = domain.interior.contains(wq)
            if not inside and domain.cells.contains(wq):
                boundary_skips += 1
                continue

        kept = []
        for j in range(lo_idx[i], hi_idx[i]):
            d = xs[j] - x
            ad = abs(d)
            if ad <= rf - tol:
                kept.append(d)
            elif ad < rf + tol and edge_inside(i, j):
                kept.append(d)
        same = len(kept) == K and all(
            abs(d - e) <= tol for d, e in zip(kept, disp_f)
        )

        if inside == same:
            hits += 1
            continue
        # float path disagreed; settle exactly before reporting a miss
        if pt is None:
            pt = sample.points[i]
        wq = sample.star(pt)
        inside_e = domain.interior.contains(wq)
        if not inside_e and domain.cells.contains(wq):
            boundary_skips += 1
            continue
        disp = _patch_displacements_at(sample, i, R)
        same_e = len(disp) == K and all(
            (a - b).sign() == 0 for a, b in zip(disp, target)
        )
        if inside_e == same_e:
            hits += 1
        else:
            misses += 1
    return {"hits": hits, "misses": misses, "boundary_skips": boundary_skips}


def localizing_patch(scheme, window, sample: PointSample, target) -> Patch:
    """A patch of the sample whose acceptance domain fits inside target.

    Greedy constructive search: starting from the window, repeatedly
    intersect with window translates by displacement stars of nearby
    sample points, keeping only translates that strictly shrink the
    running intersection, until it is contained in the target region.
    The returned patch is the full ball patch at the radius of the last
    kept point, so its acceptance domain refines the running
    intersection; requires trivial torsion.
    """
    if scheme.torsion:
        raise ConfigError("localization needs trivial torsion")
    if isinstance(target, Cell):
        target = IntervalSet([target])
    W = window.component(())
    if W.intersect(target).is_empty():
        raise DomainError("target region misses the window entirely")

    # Anchor at the most central eligible point: the usable ball radius is
    # capped by the distance to the nearer box edge, so an anchor near an
    # edge would waste the rest of the sample.
    blo, bhi = sample.box
    anchor_idx = None
    best = None
    for i, pt in enumerate(sample.points):
        if not target.contains(sample.star(pt)):
            continue
        m = pt.phys - blo
        if (bhi - pt.phys - m).sign() < 0:
            m = bhi - pt.phys
        if best is None or (m - best).sign() > 0:
            anchor_idx, best = i, m
    if anchor_idx is None:
        raise DomainError("no sample star lies in the target region")
    anchor = sample.points[anchor_idx]
    margin = best

    running = W
    zero = QuadReal(0, 0, scheme.field_D)
    radius = zero
    if running.is_subset_of(target):
        return extract_patch(sample, anchor_idx, radius)

    others = sorted(
        (p for i, p in enumerate(sample.points) if i != anchor_idx),
        key=lambda p: (abs(p.phys.to_float() - anchor.phys.to_float()),
                       p.phys.serialize()),
    )
    for q in others:
        dist = abs(q.phys - anchor.phys)
        if (dist - margin).sign() > 0:
            break
        shrunk = running.intersect(W.translate(anchor.internal - q.internal))
        if shrunk == running:
            continue
        running = shrunk
        radius = dist
        if running.is_subset_of(target):
            patch = extract_patch(sample, anchor_idx, radius)
            dom = acceptance_domain(scheme, window, patch)
            if not dom.cells.is_subset_of(target):
                raise InternalCheckError(
                    "localized domain escaped the target region"
                )
            return patch
    raise SampleTooSmallError(
        "sample exhausted before the intersection localized",
        achieved=running,
    )
