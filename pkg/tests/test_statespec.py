import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiprob.errors import (
    ArityError,
    ComplexLiteralError,
    ParameterRangeError,
    StateSpecError,
    UnknownKindError,
)
from quasiprob.statespec import StateSpec, parse_complex, parse_state_list, parse_state_spec


def test_fock():
    assert parse_state_spec("fock:3") == StateSpec.fock(3)


def test_coherent_complex():
    assert parse_state_spec("coherent:1.0+0.5i") == StateSpec.coherent(1.0 + 0.5j)


def test_whitespace_and_case():
    assert parse_state_spec("  CoHeReNt : 1.0 - 0.5 i ") == StateSpec.coherent(1.0 - 0.5j)


def test_two_arguments():
    assert parse_state_spec("squeezed:0.4,0") == StateSpec.squeezed(0.4, 0.0)
    assert parse_state_spec("cat:1.5,0") == StateSpec.cat(1.5, 0.0)


@pytest.mark.parametrize("text, value", [
    ("1", 1), ("-2.5", -2.5), ("i", 1j), ("-i", -1j), ("0.5i", 0.5j),
    ("1-i", 1 - 1j), ("+.5+2.i", 0.5 + 2j), ("1e-3+2E1i", 0.001 + 20j),
])
def test_complex_literals(text, value):
    assert parse_complex(text) == value


def test_thermal_out_of_range():
    with pytest.raises(ParameterRangeError, match="n̄ >= 0") as info:
        parse_state_spec("thermal:-1")
    assert info.value.position == 8


def test_unknown_kind():
    with pytest.raises(UnknownKindError) as info:
        parse_state_spec("squashed:1")
    assert info.value.position == 0


def test_arity():
    with pytest.raises(ArityError):
        parse_state_spec("squeezed:0.4")
    with pytest.raises(ArityError):
        parse_state_spec("fock:1,2")


def test_malformed_complex_position():
    with pytest.raises(ComplexLiteralError) as info:
        parse_state_spec("coherent:1+2j")
    assert info.value.position == 9


def test_fock_must_be_integer():
    with pytest.raises(ParameterRangeError):
        parse_state_spec("fock:1.5")


def test_state_list_grouping():
    specs = parse_state_list("vacuum,fock:1,squeezed:0.4,0,thermal:0.5")
    assert [str(s) for s in specs] == ["vacuum", "fock:1", "squeezed:0.4,0.0", "thermal:0.5"]


def test_str_roundtrip():
    for spec in ["fock:2", "coherent:1.0+0.5i", "thermal:0.5", "squeezed:0.4,0.3", "cat:1.5-1i,0.7"]:
        parsed = parse_state_spec(spec)
        assert parse_state_spec(str(parsed)) == parsed


@settings(max_examples=500, deadline=None)
@given(st.text())
def test_grammar_is_total(text):
    try:
        spec = parse_state_spec(text)
    except StateSpecError as exc:
        assert 0 <= exc.position <= len(text)
    else:
        assert isinstance(spec, StateSpec)


_fragments = st.sampled_from(
    ["fock", "coherent", "thermal", "squeezed", "cat", "vacuum", ":", ",", "+", "-", "i",
     ".", "e", "1", "0.5", " ", "2e3", "x", "--"]
)


@settings(max_examples=500, deadline=None)
@given(st.lists(_fragments, max_size=8).map("".join))
def test_grammar_is_total_near_valid_inputs(text):
    try:
        parse_state_spec(text)
    except StateSpecError as exc:
        assert 0 <= exc.position <= len(text)
