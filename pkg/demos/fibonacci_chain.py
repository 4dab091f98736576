"""Build the golden-ratio chain and look at its basic structure.

A cut-and-project scheme slices a planar lattice with an interval
window: lattice points whose internal coordinate lands in the window
contribute their physical coordinate to the point set.  Every
coordinate here is an exact element of Q(sqrt(5)), so gaps, window
membership, and scheme diagnostics are decided by sign computations,
never by float comparison.
"""

import json
from pathlib import Path

from modelset import enumerate_model_set, scheme_from_config, validate_scheme
from modelset.deform import meyer_report
from modelset.quadfield import qr

HERE = Path(__file__).resolve().parent

config = json.loads((HERE / "fibonacci.json").read_text())
scheme, window, xi = scheme_from_config(config)

print("scheme diagnostics")
report = validate_scheme(scheme, bound=10_000)
for key in ("determinant", "injectivity", "min_internal_abs", "density_ok"):
    print(f"  {key}: {report[key]}")

sample = enumerate_model_set(scheme, window, xi, (qr(0), qr(100)))
print(f"\n{len(sample.points)} points in [0, 100]")

print("\nfirst positions and gaps (exact):")
pts = sample.points[:8]
for prev, cur in zip(pts, pts[1:]):
    gap = cur.phys - prev.phys
    print(f"  {prev.phys.serialize():>24}   gap {gap.serialize()}")

# only two gap values ever occur: 1 and the golden ratio
gaps = {
    (b.phys - a.phys).serialize()
    for a, b in zip(sample.points, sample.points[1:])
}
print(f"\ndistinct gaps over the whole box: {sorted(gaps)}")

# the gap report wants a few hundred points for meaningful statistics
large = enumerate_model_set(scheme, window, xi, (qr(0), qr(300)))
rep = meyer_report(large, [5, 10, 20, 40])
print("\ndifference-set gap report:")
print(f"  min gap per radius: {[g.serialize() for g in rep.min_gap]}")
print(f"  verdict: {rep.verdict}")
