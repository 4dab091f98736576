"""Acceptance domains: which window positions produce a given patch.

The patch of radius R at a point is the finite set of displacements
to its neighbors within R.  Its acceptance domain is the exact subset
of the window where the shifted window conditions for every present
point hold and the conditions for every absent candidate fail.  The
verification pass re-derives, for every point of the sample, whether
its patch equals the reference patch and whether its internal
coordinate lies in the domain; the two answers must agree everywhere.

Localization inverts the direction: given a target region inside the
window, grow a patch whose acceptance domain fits inside the target,
so seeing that patch around a point certifies where its internal
coordinate lies.
"""

import json
from pathlib import Path

from modelset import (
    acceptance_domain,
    enumerate_model_set,
    extract_patch,
    localizing_patch,
    scheme_from_config,
    verify_acceptance,
)
from modelset.intervals import Cell, IntervalSet
from modelset.quadfield import qr
from fractions import Fraction

HERE = Path(__file__).resolve().parent

config = json.loads((HERE / "fibonacci.json").read_text())
scheme, window, xi = scheme_from_config(config)
sample = enumerate_model_set(scheme, window, xi, (qr(0), qr(600)))
print(f"{len(sample.points)} points in [0, 600]")

patch = extract_patch(sample, 40, 3)
print(f"\nradius-3 patch at index 40 ({len(patch)} points):")
print(f"  displacements: {[p.serialize() for p in patch.points]}")

domain = acceptance_domain(scheme, window, patch)
print(f"  acceptance domain: {domain.cells}")
print(f"  window itself:     {window.component(())}")

result = verify_acceptance(sample, patch, domain)
print(f"\nfull-sample verification: {result}")
assert result["misses"] == 0

# pin the internal coordinate down to a 1/8-wide target
target = IntervalSet([Cell(qr(0), qr(Fraction(1, 8)), False, False)])
loc = localizing_patch(scheme, window, sample, target)
loc_domain = acceptance_domain(scheme, window, loc)
print(f"\nlocalizing patch for target {target}:")
print(f"  {len(loc)} points, radius {loc.radius.serialize()}")
print(f"  domain {loc_domain.cells} fits the target: "
      f"{loc_domain.cells.is_subset_of(target)}")
