from fractions import Fraction

import pytest
import sympy

import oracles
from modelset import (
    SubstitutionSystem,
    abelianization_matrix,
    char_poly,
    deformed_lengths,
    eigen_system,
    expand,
    natural_lengths,
    realize,
    section7_experiment,
    supertile_length,
)
from modelset.errors import ConfigError, DomainError
from modelset.quadfield import golden, qr

RULES = {
    "a1": ["a1", "b1", "a2"],
    "b1": ["a1", "b2"],
    "a2": ["a1", "b2", "a2"],
    "b2": ["a2", "b1"],
}


def test_expand_matches_reference(doubled):
    for n in range(0, 7):
        assert list(expand(doubled, "a1", n)) == oracles.brute_force_word(
            RULES, "a1", n
        )


def test_letter_counts_match_matrix_power(doubled):
    word = expand(doubled, "a2", 9)
    counts = oracles.letter_counts(word, list(doubled.alphabet))
    M = abelianization_matrix(doubled)
    vec = [1 if a == "a2" else 0 for a in doubled.alphabet]
    for _ in range(9):
        vec = [
            sum(M[i][j] * vec[j] for j in range(4)) for i in range(4)
        ]
    assert counts == vec


def test_matrix_and_char_poly_frozen(doubled):
    assert abelianization_matrix(doubled) == [
        [1, 1, 1, 0],
        [1, 0, 0, 1],
        [1, 0, 1, 1],
        [0, 1, 1, 0],
    ]
    assert char_poly(doubled) == [
        Fraction(1), Fraction(-2), Fraction(-3), Fraction(4), Fraction(-1)
    ]


def test_eigen_data_is_exact(doubled):
    eig = eigen_system(doubled)
    classes = sorted(e.classification for e in eig.entries)
    assert classes == [
        "PF",
        "PF-conjugate",
        "contracting-non-conjugate",
        "expanding-other",
    ]
    perron = eig.perron()
    assert perron.value.serialize() == "3/2 + 1/2*sqrt(5)"
    # left eigenvector identity v M = lambda v, checked exactly
    M = abelianization_matrix(doubled)
    for entry in eig.entries:
        v = entry.left_vector
        for j in range(4):
            acc = qr(0)
            for i in range(4):
                acc = acc + v[i] * qr(M[i][j])
            assert (acc - entry.value * v[j]).sign() == 0


def test_eigenvalues_match_sympy(doubled):
    eig = eigen_system(doubled)
    got = sorted(
        sympy.nsimplify(e.value.serialize(), rational=False)
        for e in eig.entries
    )
    want = sorted(oracles.sympy_eigenvals(abelianization_matrix(doubled)))
    assert all(sympy.simplify(a - b) == 0 for a, b in zip(got, want))


def test_length_vectors_frozen(doubled):
    phi = golden()
    nat = natural_lengths(doubled)
    assert [x.serialize() for x in nat.values] == [
        "1/2 + 1/2*sqrt(5)", "1", "1/2 + 1/2*sqrt(5)", "1",
    ]
    eig = eigen_system(doubled)
    eps = qr(Fraction(1, 8))
    slip = deformed_lengths(
        nat,
        eig.by_classification("contracting-non-conjugate").left_vector,
        eps,
    )
    rep = deformed_lengths(
        nat, eig.by_classification("PF-conjugate").left_vector, eps
    )
    assert [x.serialize() for x in slip.values] == [
        "5/8 + 1/2*sqrt(5)",
        "15/16 + 1/16*sqrt(5)",
        "3/8 + 1/2*sqrt(5)",
        "17/16 - 1/16*sqrt(5)",
    ]
    assert [x.serialize() for x in rep.values] == [
        "5/8 + 1/2*sqrt(5)",
        "15/16 - 1/16*sqrt(5)",
        "5/8 + 1/2*sqrt(5)",
        "15/16 - 1/16*sqrt(5)",
    ]
    # positivity guard
    with pytest.raises(DomainError):
        deformed_lengths(nat, eig.by_classification("PF").left_vector, qr(-2))


def test_supertile_lengths(doubled):
    phi = golden()
    nat = natural_lengths(doubled)
    # sigma(a1) = a1 b1 a2 has length phi + 1 + phi
    want = phi + qr(1) + phi
    assert (supertile_length(doubled, nat, "a1", 1) - want).sign() == 0
    # cross-check a deeper supertile against the expanded word
    word = expand(doubled, "b2", 4)
    lengths = {a: v for a, v in zip(doubled.alphabet, nat.values)}
    total = qr(0)
    for c in word:
        total = total + lengths[c]
    assert (supertile_length(doubled, nat, "b2", 4) - total).sign() == 0


def test_realize_small_cases(doubled):
    phi = golden()
    nat = natural_lengths(doubled)
    only_a1 = realize(doubled, nat, 1, "a1", "a1")
    assert [x.serialize() for x in only_a1] == ["0"]
    both = realize(doubled, nat, 1, "a1", ("a1", "a2"))
    assert [x.serialize() for x in both] == ["0", "3/2 + 1/2*sqrt(5)"]
    assert (qr(1) + phi - both[1]).sign() == 0


def test_realize_matches_float_layout(doubled):
    nat = natural_lengths(doubled)
    got = [x.to_float() for x in realize(doubled, nat, 5, "a1", "b1")]
    lengths = {
        a: v.to_float() for a, v in zip(doubled.alphabet, nat.values)
    }
    want = oracles.brute_force_realization(RULES, lengths, "a1", 5, {"b1"})
    assert len(got) == len(want)
    assert all(abs(a - b) < 1e-9 for a, b in zip(got, want))


def test_realize_guards(doubled):
    nat = natural_lengths(doubled)
    with pytest.raises(DomainError):
        realize(doubled, nat, 3, "b1", "a1")  # b1 does not start its image
    with pytest.raises(ConfigError):
        realize(doubled, nat, 3, "a1", "zz")


def test_system_construction_guards():
    with pytest.raises(ConfigError):
        SubstitutionSystem(("a", "b"), {"a": ["a"], "b": ["b"]}, field_D=5)
    with pytest.raises(ConfigError):
        SubstitutionSystem(("a", "b"), {"a": ["b"], "b": ["a"]}, field_D=5)


def test_from_config_splits_multichar_letters(fib_config_dict):
    system = SubstitutionSystem.from_config(fib_config_dict["substitution"])
    assert system.alphabet == ("a1", "b1", "a2", "b2")
    assert list(expand(system, "b2", 1)) == ["a2", "b1"]


def test_experiment_rejects_small_horizon():
    with pytest.raises(ConfigError):
        section7_experiment(n_max=4)
