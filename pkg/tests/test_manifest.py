import pytest

from socheck.cli import corpus_names
from socheck.manifest import ArityError, ManifestError, UnknownSymbol, parse_manifest, print_manifest
from socheck.types import Atomic

from conftest import load


def test_recursor_parses_to_two_rules():
    m = load("recursor")
    assert [r.name for r in m.rules] == ["recZ", "recS"]
    assert m.option("type-order") == "identity"


def test_empty_file():
    m = parse_manifest("")
    assert m.rules == [] and m.signature.symbols == {}


def test_nullary_constant():
    m = parse_manifest("atomic c\nf : -> c\n")
    ft = m.signature["f"]
    assert ft.arity == 0 and ft.result == Atomic("c")


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("atomic o\nc : -> o\n(r) d -> c\n", UnknownSymbol, 3),
        ("atomic o\nc : -> o\nf : o -> o\n(r) f(c, c) -> c\n", ArityError, 4),
        ("atomic o\nc : -> o\n(r) c -> \n", ManifestError, 3),
        ("atomic o\nf : o -> o\n(r) f(X) -> f(Y)\n", ManifestError, 3),
    ],
)
def test_errors_carry_line_numbers(text, exc, line):
    with pytest.raises(exc) as info:
        parse_manifest(text)
    assert str(info.value).startswith(f"{line}:")


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trip(name):
    m = load(name)
    again = parse_manifest(print_manifest(m))
    assert again.signature.symbols == m.signature.symbols
    assert [(r.name, r.lhs, r.rhs) for r in again.rules] == [(r.name, r.lhs, r.rhs) for r in m.rules]
    assert (again.split, again.split_a, again.split_b) == (m.split, m.split_a, m.split_b)
    assert again.options == m.options
