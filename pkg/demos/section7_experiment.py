"""The two-branch deformation study on the doubled golden substitution.

Doubling the golden chain's two tile types gives a four-letter
substitution whose letter-count matrix has two eigenvalue pairs.
Deforming tile lengths along a left eigenvector changes each n-fold
supertile length by a multiple of lambda^n, so the two choices of
contracting eigenvalue produce opposite behavior:

  * along the eigenvector of the algebraic conjugate of the leading
    eigenvalue, the two long supertiles stay exactly equal in length
    at every generation (the deformation is a reprojection), while
  * along the other contracting eigenvector their lengths differ by
    an exactly geometric amount, and marking one tile type produces a
    point set whose difference set acquires arbitrarily small gaps.

The report computes the gap table exactly, confirms the ratio is the
inverse golden ratio on the nose, and runs the difference-set
diagnostic on both realized branches.
"""

from modelset import doubled_fibonacci, eigen_system, section7_experiment

system = doubled_fibonacci()
print("letter-count matrix rows:")
for letter, row in zip(system.alphabet, system.matrix):
    print(f"  {letter}: {row}")

print("\neigenvalues:")
for entry in eigen_system(system).entries:
    print(f"  {entry.value.serialize():>22}  {entry.classification}")

report = section7_experiment(
    n_max=10, slip_generation=11, repr_generation=10,
    slip_radii_count=8, repr_radii_count=7,
)

print("\nsupertile length gap between the two long tiles:")
for row in report["gap_table"][:6]:
    ratio = row.get("ratio", "")
    print(f"  n={row['n']:>2}  slip gap {row['slip_gap']:>28}  "
          f"balanced gap {row['repr_gap']}  ratio {ratio}")
print(f"  every ratio equals the inverse golden ratio exactly: "
      f"{report['gap_ratio_exact_golden_inverse']}")

for name in ("reprojection", "slipping"):
    branch = report["branches"][name]
    rep = branch["report"]
    print(f"\n{name} branch, {branch['points']} marked points:")
    print(f"  min gap per radius: "
          f"{[f'{g:.3g}' for g in rep['min_gap_float']]}")
    print(f"  verdict: {rep['verdict']}"
          + (f", decay rate {rep['rate']:.4f}" if rep["rate"] else ""))
