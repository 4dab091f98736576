"""Deformations of the chain and the difference-set diagnostic.

A deformation moves each point by a generator value computed from the
point's data.  Two families behave very differently:

  * star-linear generators (a reprojection: the physical coordinate
    shifts by L times the internal coordinate) tilt the projection
    direction and land on another cut-and-project set, and
  * patch-local rules move each point by an amount readable off its
    finite neighborhood.

Both keep the difference set uniformly discrete.  The slip diagnostic
compares a generator across the two limit sets of a singular offset;
a generator whose values need global data (here: the rank of a point
in internal order) disagrees at every radius and is flagged.
Decomposition splits a mixed generator back into its star-linear
coefficient and its patch-local remainder.
"""

import json
from fractions import Fraction
from pathlib import Path

from modelset import (
    LinearInternal,
    LocalRule,
    SumGenerator,
    apply_generator,
    decompose_generator,
    enumerate_model_set,
    nonslip_probe,
    rank_fraction_table,
    reproject,
    scheme_from_config,
)
from modelset.deform import meyer_report
from modelset.quadfield import qr

HERE = Path(__file__).resolve().parent

config = json.loads((HERE / "fibonacci.json").read_text())
scheme, window, xi = scheme_from_config(config)
sample = enumerate_model_set(scheme, window, xi, (qr(0), qr(600)))

L = qr(Fraction(1, 8))
sheared = reproject(sample, L)
rep = meyer_report(sheared, [5, 10, 20, 40])
print(f"reprojection by L = 1/8: verdict {rep.verdict}, "
      f"min gap {rep.min_gap[-1].serialize()}")


def widen_right_gap_one(disp):
    # push a point by 1/8 when its right neighbor sits at distance 1
    for d in disp:
        if d.sign() > 0 and (d - qr(1)).sign() == 0:
            return qr(Fraction(1, 8))
    return qr(0)


rule = LocalRule.from_function(sample, 2, widen_right_gap_one)
bumped = apply_generator(sample, rule)
rep = meyer_report(bumped, [5, 10, 20, 40])
print(f"radius-2 local rule:     verdict {rep.verdict}, "
      f"min gap {rep.min_gap[-1].serialize()}")

print("\nslip diagnostic at the singular offset 0, radii 1..16:")
box = (qr(-120), qr(120))
radii = [1, 2, 4, 8, 16]
for name, F in [
    ("linear L=1/8", LinearInternal(qr(Fraction(1, 8)))),
    ("local rule", lambda s: LocalRule.from_function(s, 2, widen_right_gap_one)),
    ("rank table", rank_fraction_table()),
]:
    probe = nonslip_probe(scheme, window, (qr(0), qr(0)), F, radii, box)
    print(f"  {name:<14} {probe.label:<24} "
          f"disagreements {probe.disagreements}")

mixed = SumGenerator((LinearInternal(L), rule))
res = decompose_generator(sample, mixed, R_max=4)
print(f"\ndecomposing linear + local rule:")
print(f"  recovered L = {res.L.serialize()}, "
      f"local radius {res.psi_radius}, "
      f"residual {res.residual_linf.serialize()}")
