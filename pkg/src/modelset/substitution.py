"""Symbolic substitutions: expansion, eigen data, lengths, realization.

The letter-count matrix uses the convention M[i][j] = occurrences of
letter i in the image of letter j, with letters in declared order.
Eigenvalues and left eigenvectors are computed exactly whenever they
live in the working quadratic field (float eigenvalues only nominate
candidates; an exact characteristic-polynomial root check decides),
with a float fallback and a notice otherwise.  Tile-length vectors
deformed along eigenvectors drive the supertile length laws; geometric
realization lays a substituted word on the line and returns marked
tile boundaries exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, DomainError, InternalCheckError
from .quadfield import QuadReal
from .deform import meyer_report

__all__ = [
    "SubstitutionSystem",
    "LengthVector",
    "EigenEntry",
    "EigenData",
    "expand",
    "abelianization_matrix",
    "char_poly",
    "eigen_system",
    "natural_lengths",
    "deformed_lengths",
    "supertile_length",
    "realize",
    "section7_experiment",
    "doubled_fibonacci",
]


def _mat_mul(A, B):
    n = len(A)
    return [
        [sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


def _mat_pow(M, e):
    n = len(M)
    R = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    P = [row[:] for row in M]
    while e:
        if e & 1:
            R = _mat_mul(R, P)
        P = _mat_mul(P, P)
        e >>= 1
    return R


class SubstitutionSystem:
    """Ordered alphabet, rewriting rules, letter-count matrix."""

    __slots__ = ("alphabet", "rules", "matrix", "field_D", "_pop_memo")

    def __init__(self, alphabet, rules, field_D=5):
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ConfigError("duplicate letters in alphabet")
        self.rules = {}
        for letter in self.alphabet:
            if letter not in rules:
                raise ConfigError(f"no rule for letter {letter!r}")
            word = tuple(rules[letter])
            if not word:
                raise ConfigError(f"empty rule for letter {letter!r}")
            for t in word:
                if t not in self.alphabet:
                    raise ConfigError(f"rule for {letter!r} uses unknown {t!r}")
            self.rules[letter] = word
        self.field_D = field_D
        idx = {l: i for i, l in enumerate(self.alphabet)}
        n = len(self.alphabet)
        self.matrix = [
            [sum(1 for t in self.rules[self.alphabet[j]] if idx[t] == i)
             for j in range(n)]
            for i in range(n)
        ]
        self._pop_memo = {}
        self._check_primitive()

    def _check_primitive(self):
        n = len(self.alphabet)
        P = [row[:] for row in self.matrix]
        for _ in range((n - 1) * (n - 1) + 1):
            if all(v > 0 for row in P for v in row):
                break
            P = _mat_mul(P, self.matrix)
        else:
            raise ConfigError("substitution is not primitive")
        lam = max(abs(v) for v in np.linalg.eigvals(np.array(self.matrix, float)))
        if not lam > 1 + 1e-9:
            raise ConfigError("inflation factor must exceed 1")

    @classmethod
    def from_config(cls, cfg: dict) -> "SubstitutionSystem":
        try:
            letters = list(cfg["letters"])
            rules_cfg = cfg["rules"]
        except KeyError as e:
            raise ConfigError(f"missing substitution field {e.args[0]!r}") from None
        multi = any(len(l) > 1 for l in letters)
        rules = {}
        for letter, word in rules_cfg.items():
            if isinstance(word, str):
                rules[letter] = word.split() if multi else list(word)
            else:
                rules[letter] = list(word)
        return cls(letters, rules, field_D=int(cfg.get("field_D", 5)))

    def index(self, letter) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise ConfigError(f"unknown letter {letter!r}") from None

    def population(self, letter, n) -> tuple:
        """Letter counts of the n-th image, via the matrix power."""
        key = (letter, n)
        if key not in self._pop_memo:
            col = self.index(letter)
            P = _mat_pow(self.matrix, n)
            self._pop_memo[key] = tuple(P[i][col] for i in range(len(self.matrix)))
        return self._pop_memo[key]


def expand(system: SubstitutionSystem, letter, n: int):
    """The n-fold substitution image of a letter, as a letter tuple."""
    if n < 0:
        raise ConfigError("expansion order must be nonnegative")
    word = (letter if isinstance(letter, (list, tuple)) else (letter,))
    for t in word:
        system.index(t)
    for _ in range(n):
        nxt = []
        for t in word:
            nxt.extend(system.rules[t])
        word = nxt
        if len(word) > 20_000_000:
            raise DomainError("expansion exceeds supported size")
    word = tuple(word)
    if not isinstance(letter, (list, tuple)):
        counts = [0] * len(system.alphabet)
        idx = {l: i for i, l in enumerate(system.alphabet)}
        for t in word:
            counts[idx[t]] += 1
        if tuple(counts) != system.population(letter, n):
            raise InternalCheckError("expansion disagrees with matrix power")
    return word


def abelianization_matrix(system: SubstitutionSystem):
    return [row[:] for row in system.matrix]


def char_poly(system: SubstitutionSystem):
    """Monic characteristic polynomial coefficients, highest first.

    Faddeev-LeVerrier over exact rationals; the result is integral for
    an integer matrix.
    """
    n = len(system.matrix)
    M = [[Fraction(v) for v in row] for row in system.matrix]
    coeffs = [Fraction(1)]
    N = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
         for i in range(n)]
    MN = None
    for k in range(1, n + 1):
        MN = [
            [sum(M[i][t] * N[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
        c = -sum(MN[i][i] for i in range(n)) / k
        coeffs.append(c)
        N = [
            [MN[i][j] + (c if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
    return coeffs


@dataclass(frozen=True)
class EigenEntry:
    value: object  # QuadReal when exact, float otherwise
    multiplicity: int
    left_vector: tuple
    classification: str
    exact: bool
    notice: str | None = None

    def to_jsonable(self):
        if self.exact:
            val = {"exact": self.value.serialize(), "float": self.value.to_float()}
            vec = [v.serialize() for v in self.left_vector]
        else:
            val = {"exact": None, "float": float(self.value)}
            vec = [float(v) for v in self.left_vector]
        return {
            "value": val,
            "multiplicity": self.multiplicity,
            "left_vector": vec,
            "classification": self.classification,
            "notice": self.notice,
        }


@dataclass(frozen=True)
class EigenData:
    entries: tuple
    char_poly: tuple  # Fraction coefficients, highest first

    def by_classification(self, key) -> EigenEntry:
        for e in self.entries:
            if e.classification == key:
                return e
        raise DomainError(f"no eigenvalue classified {key!r}")

    def perron(self) -> EigenEntry:
        return self.by_classification("PF")

    def to_jsonable(self):
        return {
            "char_poly": [str(c) for c in self.char_poly],
            "entries": [e.to_jsonable() for e in self.entries],
        }


def _poly_eval(coeffs, x: QuadReal) -> QuadReal:
    acc = QuadReal(0, 0, x.D)
    for c in coeffs:
        acc = acc * x + QuadReal(c, 0, x.D)
    return acc


def _recognize_in_field(lam_f: float, coeffs, D: int):
    """Exact field element matching a float root, or None.

    Tries (p + q*sqrt(D))/r for small r and |q|; a candidate counts
    only if it is an exact root of the characteristic polynomial.
    """
    sq = math.sqrt(D)
    for r in range(1, 13):
        for q in range(-64, 65):
            p = round(r * lam_f - q * sq)
            if abs((p + q * sq) / r - lam_f) > 1e-9:
                continue
            cand = QuadReal(Fraction(p, r), Fraction(q, r), D)
            if _poly_eval(coeffs, cand).sign() == 0:
                return cand
    return None


def _nullspace_left(matrix, lam: QuadReal, D: int):
    """One left eigenvector: nullspace vector of (transpose - lam I)."""
    n = len(matrix)
    A = [
        [QuadReal(matrix[j][i], 0, D) - (lam if i == j else QuadReal(0, 0, D))
         for j in range(n)]
        for i in range(n)
    ]
    # Gaussian elimination, exact pivots
    piv_cols = []
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, n):
            if A[r][col].sign() != 0:
                piv = r
                break
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = A[row][col]
        A[row] = [v / inv for v in A[row]]
        for r in range(n):
            if r != row and A[r][col].sign() != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[row])]
        piv_cols.append(col)
        row += 1
    free = [c for c in range(n) if c not in piv_cols]
    if not free:
        raise InternalCheckError("eigenvalue has empty nullspace")
    fc = free[0]
    vec = [QuadReal(0, 0, D)] * n
    vec[fc] = QuadReal(1, 0, D)
    for r, pc in enumerate(piv_cols):
        vec[pc] = -A[r][fc]
    # normalize: first nonzero component = 1
    for v in vec:
        if v.sign() != 0:
            vec = [u / v for u in vec]
            break
    return tuple(vec)


def eigen_system(system: SubstitutionSystem) -> EigenData:
    """Eigenvalues with exact left eigenvectors and classifications.

    Classification: the spectral radius is PF; its field conjugate is
    PF-conjugate (the reprojection direction); remaining values split
    by modulus into contracting-non-conjugate (the slipping
    directions), unit, and expanding-other.
    """
    D = system.field_D
    coeffs = char_poly(system)
    lam_f = np.linalg.eigvals(np.array(system.matrix, float))
    if np.abs(lam_f.imag).max() > 1e-9:
        raise DomainError("complex eigenvalues are not supported")
    lam_f = sorted(lam_f.real.tolist(), reverse=True)

    clusters = []
    for v in lam_f:
        if clusters and abs(v - clusters[-1][0]) < 1e-7:
            clusters[-1][1] += 1
        else:
            clusters.append([v, 1])

    recognized = []
    for v, mult in clusters:
        exact = _recognize_in_field(v, coeffs, D)
        recognized.append((v, mult, exact))

    pf_float = max(v for v, _, _ in recognized)
    pf_exact = next(e for v, _, e in recognized if v == pf_float)
    if pf_exact is None:
        raise DomainError("spectral radius escapes the working field")

    entries = []
    one = QuadReal(1, 0, D)
    for v, mult, exact in recognized:
        if exact is not None:
            vec = _nullspace_left(system.matrix, exact, D)
            if v == pf_float:
                cls = "PF"
            elif (exact - pf_exact.conjugate()).sign() == 0:
                cls = "PF-conjugate"
            else:
                mag = abs(exact)
                s = (mag - one).sign()
                if s < 0:
                    cls = "contracting-non-conjugate"
                elif s == 0:
                    cls = "unit"
                else:
                    cls = "expanding-other"
            entries.append(EigenEntry(exact, mult, vec, cls, True))
        else:
            MT = np.array(system.matrix, float).T
            w, vecs = np.linalg.eig(MT)
            k = int(np.argmin(np.abs(w - v)))
            fv = vecs[:, k].real
            nz = fv[np.abs(fv) > 1e-12]
            fv = fv / nz[0]
            mag = abs(v)
            if mag < 1 - 1e-9:
                cls = "contracting-non-conjugate"
            elif mag <= 1 + 1e-9:
                cls = "unit"
            else:
                cls = "expanding-other"
            entries.append(
                EigenEntry(
                    v, mult, tuple(fv.tolist()), cls, False,
                    notice="eigenvalue outside the working field; float fallback",
                )
            )
    if sum(e.multiplicity for e in entries) != len(system.alphabet):
        raise InternalCheckError("eigenvalue multiplicities do not sum up")
    return EigenData(tuple(entries), tuple(coeffs))


@dataclass(frozen=True)
class LengthVector:
    alphabet: tuple
    values: tuple

    def __post_init__(self):
        if len(self.alphabet) != len(self.values):
            raise ConfigError("one length per letter required")
        for v in self.values:
            if v.sign() <= 0:
                raise DomainError("tile lengths must be positive")

    def __getitem__(self, letter):
        return self.values[self.alphabet.index(letter)]

    def to_jsonable(self):
        return {
            l: {"exact": v.serialize(), "float": v.to_float()}
            for l, v in zip(self.alphabet, self.values)
        }


def natural_lengths(system: SubstitutionSystem) -> LengthVector:
    """Left PF eigenvector scaled so the smallest tile has length 1."""
    pf = eigen_system(system).perron()
    vec = pf.left_vector
    smallest = vec[0]
    for v in vec[1:]:
        if (v - smallest).sign() < 0:
            smallest = v
    return LengthVector(system.alphabet, tuple(v / smallest for v in vec))


def deformed_lengths(base: LengthVector, direction, eps) -> LengthVector:
    """Componentwise base + eps * direction; must stay positive."""
    if not isinstance(eps, QuadReal):
        eps = QuadReal(Fraction(eps), 0, base.values[0].D)
    if len(direction) != len(base.values):
        raise ConfigError("direction length mismatch")
    return LengthVector(
        base.alphabet,
        tuple(b + eps * v for b, v in zip(base.values, direction)),
    )


def supertile_length(system, lengths: LengthVector, letter, n: int) -> QuadReal:
    """Exact length of the n-fold supertile of a letter."""
    if n < 0:
        raise ConfigError("supertile order must be nonnegative")
    vec = list(lengths.values)
    for _ in range(n):
        vec = [
            sum(
                (vec[i] * system.matrix[i][j] for i in range(len(vec))),
                QuadReal(0, 0, system.field_D),
            )
            for j in range(len(vec))
        ]
    return vec[system.index(letter)]


def realize(system, lengths: LengthVector, n: int, seed, marker):
    """Left endpoints of marked tiles in the laid-out n-fold supertile.

    The supertile word starts at the origin; each tile contributes its
    length.  ``marker`` is one letter or an iterable of letters.
    Exact coordinates via integer pairs over a common denominator.
    """
    if system.rules[seed][0] != seed:
        raise DomainError(f"seed {seed!r} does not start its own image")
    markers = {marker} if isinstance(marker, str) else set(marker)
    for m in markers:
        system.index(m)
    word = expand(system, seed, n)
    idx = {l: i for i, l in enumerate(system.alphabet)}
    widx = np.fromiter((idx[t] for t in word), dtype=np.int64, count=len(word))

    D = system.field_D
    den = 1
    for v in lengths.values:
        den = math.lcm(den, v.a.denominator, v.b.denominator)
    LA = np.array([int(v.a * den) for v in lengths.values], dtype=np.int64)
    LB = np.array([int(v.b * den) for v in lengths.values], dtype=np.int64)
    stepsA = LA[widx]
    stepsB = LB[widx]
    posA = np.concatenate(([0], np.cumsum(stepsA)[:-1]))
    posB = np.concatenate(([0], np.cumsum(stepsB)[:-1]))
    mask = np.isin(widx, [idx[m] for m in markers])
    out = [
        QuadReal(Fraction(int(a), den), Fraction(int(b), den), D)
        for a, b in zip(posA[mask], posB[mask])
    ]
    return out


# ---------------------------------------------------------------------------
# the doubled-Fibonacci experiment


def doubled_fibonacci() -> SubstitutionSystem:
    """Four-letter system with two marked copies of each Fibonacci tile."""
    return SubstitutionSystem(
        ["a1", "b1", "a2", "b2"],
        {
            "a1": ["a1", "b1", "a2"],
            "b1": ["a1", "b2"],
            "a2": ["a1", "b2", "a2"],
            "b2": ["a2", "b1"],
        },
    )


def section7_experiment(
    n_max: int = 16,
    eps=Fraction(1, 8),
    slip_generation: int = 13,
    repr_generation: int = 12,
    slip_radii_count: int = 10,
    repr_radii_count: int = 9,
) -> dict:
    """Two eigen-deformations of the doubled Fibonacci system, compared.

    Deforming along the PF-conjugate eigenvector keeps supertile
    lengths balanced (gap sequence identically zero, gap report flat);
    deforming along the contracting non-conjugate eigenvector makes
    the two long-tile supertiles differ by an exactly geometrically
    shrinking amount, and the marked-point set's difference set
    acquires arbitrarily small gaps.  Returns a JSON-ready report.
    """
    if n_max < 8:
        raise ConfigError("need n_max >= 8")
    system = doubled_fibonacci()
    eig = eigen_system(system)
    base = natural_lengths(system)
    D = system.field_D
    if not isinstance(eps, QuadReal):
        eps = QuadReal(Fraction(eps), 0, D)

    v_repr = eig.by_classification("PF-conjugate").left_vector
    v_slip = eig.by_classification("contracting-non-conjugate").left_vector
    len_repr = deformed_lengths(base, v_repr, eps)
    len_slip = deformed_lengths(base, v_slip, eps)

    gap_table = []
    ratio_exact = True
    repr_gaps_zero = True
    prev = None
    for n in range(1, n_max + 1):
        g = supertile_length(system, len_slip, "a1", n) - supertile_length(
            system, len_slip, "a2", n
        )
        g0 = supertile_length(system, len_repr, "a1", n) - supertile_length(
            system, len_repr, "a2", n
        )
        row = {
            "n": n,
            "slip_gap": g.serialize(),
            "slip_gap_float": g.to_float(),
            "repr_gap": g0.serialize(),
        }
        if prev is not None:
            # |g_n| / |g_{n-1}| as an exact field element
            ratio = abs(g) / abs(prev)
            row["ratio"] = ratio.serialize()
            golden_inv = QuadReal(Fraction(-1, 2), Fraction(1, 2), D)
            if (ratio - golden_inv).sign() != 0:
                ratio_exact = False
        if g0.sign() != 0:
            repr_gaps_zero = False
        gap_table.append(row)
        prev = g

    def branch(lengths, generation, count):
        pts = realize(system, lengths, generation, "a1", "a1")
        radii = [QuadReal(3, 0, D)] + [
            supertile_length(system, lengths, "a1", n)
            for n in range(1, count + 1)
        ]
        labels = list(range(0, count + 1))
        return pts, meyer_report(pts, radii, gen_labels=labels)

    pts_r, rep_r = branch(len_repr, repr_generation, repr_radii_count)
    pts_s, rep_s = branch(len_slip, slip_generation, slip_radii_count)

    return {
        "matrix": abelianization_matrix(system),
        "eigen": eig.to_jsonable(),
        "lengths": {
            "natural": base.to_jsonable(),
            "reprojection": len_repr.to_jsonable(),
            "slipping": len_slip.to_jsonable(),
        },
        "eps": eps.serialize(),
        "gap_table": gap_table,
        "gap_ratio_exact_golden_inverse": ratio_exact,
        "repr_gaps_all_zero": repr_gaps_zero,
        "branches": {
            "reprojection": {
                "points": len(pts_r),
                "generation": repr_generation,
                "report": rep_r.to_jsonable(),
            },
            "slipping": {
                "points": len(pts_s),
                "generation": slip_generation,
                "report": rep_s.to_jsonable(),
            },
        },
    }
