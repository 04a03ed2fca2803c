from fractions import Fraction

import pytest
from hypothesis import given

from conftest import instances
from fairmarket.errors import InvalidInstance, ParseError
from fairmarket.io import (
    ResultFile,
    canonicalize_instance,
    parse_instance,
    parse_instance_file,
    parse_result,
    serialize_instance,
    serialize_result,
)
from fairmarket.model import validate_instance

E1_TEXT = """{
  "schemaVersion": 1,
  "kind": "instance",
  "agents": 2,
  "goods": 3,
  "valuations": [
    [2, 1, 3],
    [1, 2, 1]
  ],
  "metadata": {"name": "e1", "seed": 3, "family": "random"}
}
"""


def test_canonical_text_round_trips_byte_for_byte():
    f = parse_instance_file(E1_TEXT)
    assert f.instance.values == ((2, 1, 3), (1, 2, 1))
    assert f.metadata == {"name": "e1", "seed": 3, "family": "random"}
    assert serialize_instance(f.instance, f.metadata) == E1_TEXT


def test_canonicalize_reorders_and_reformats():
    messy = ('{"valuations": [[2,1,3],[1,2,1]], "goods": 3, "kind": "instance", '
             '"metadata": {"family": "random", "seed": 3, "name": "e1"}, "agents": 2, "schemaVersion": 1}')
    assert canonicalize_instance(messy) == E1_TEXT


@given(instances())
def test_round_trip(inst):
    text = serialize_instance(inst)
    assert parse_instance(text) == inst
    assert serialize_instance(parse_instance(text)) == text


@pytest.mark.parametrize("text, locus", [
    ('{"schemaVersion": 1, "kind": "instance", "agents": 2, "goods": 2, "valuations": [[1, 2], [3]]}',
     "valuations[1]"),
    ('{"schemaVersion": 1, "kind": "instance", "agents": 1, "goods": 2, "valuations": [[1, 2.5]]}',
     "valuations[0][1]"),
    ('{"schemaVersion": 1, "kind": "instance", "agents": 1, "goods": 1, "valuations": [[true]]}',
     "valuations[0][0]"),
    ('{"schemaVersion": 1, "kind": "instance", "agents": 2, "goods": 1, "valuations": [[1]]}', "valuations"),
    ('{"schemaVersion": 2, "kind": "instance", "agents": 1, "goods": 1, "valuations": [[1]]}', "schemaVersion"),
    ('{"schemaVersion": 1, "kind": "result", "agents": 1, "goods": 1, "valuations": [[1]]}', "kind"),
    ('{"schemaVersion": 1, "kind": "instance", "agents": "1", "goods": 1, "valuations": [[1]]}', "agents"),
    ('{"schemaVersion": 1, "kind": "instance", "agents": 1, "goods": 1, "valuations": [[1]], "x": 0}',
     "document"),
    ('[1, 2]', "document"),
])
def test_parse_errors_name_the_locus(text, locus):
    with pytest.raises(ParseError) as info:
        parse_instance(text)
    assert info.value.locus == locus


def test_bad_json_reports_line_and_column():
    with pytest.raises(ParseError) as info:
        parse_instance('{\n  "schemaVersion": 1,\n  "kind": }')
    assert info.value.locus == "line 3 column 11"


def test_semantic_errors_are_validation_errors():
    text = '{"schemaVersion": 1, "kind": "instance", "agents": 2, "goods": 2, "valuations": [[1, 0], [1, 0]]}'
    with pytest.raises(InvalidInstance):
        parse_instance(text)


def test_result_round_trip():
    rf = ResultFile(
        bundles=[[2, 0], [1]],
        prices=(Fraction(3), Fraction(2), Fraction(9, 2)),
        checks={"ef1": {"holds": False, "witness": [0, 1, Fraction(1, 3)]}, "eq1": {"holds": True, "witness": None}},
        stats={"wallTime": 0.5, "transfers": 2, "priceRises": 1, "route": "margin"},
        method="market", fairness="ef1", name="e1",
    )
    text = serialize_result(rf)
    assert '"prices": ["3/1", "2/1", "9/2"]' in text
    assert text.index('"ef1"') < text.index('"eq1"')
    back = parse_result(text)
    assert back.bundles == [[0, 2], [1]]
    assert back.prices == rf.prices
    assert back.checks["ef1"]["witness"] == [0, 1, "1/3"]
    assert list(back.stats) == ["transfers", "priceRises", "wallTime", "route"]
    assert serialize_result(back) == text
    assert back.allocation.bundles[0] == frozenset({0, 2})


@pytest.mark.parametrize("prices", ['["1/0"]', '["1.5"]', '[2]'])
def test_bad_prices(prices):
    text = f'{{"schemaVersion": 1, "kind": "result", "bundles": [[0]], "prices": {prices}}}'
    with pytest.raises(ParseError) as info:
        parse_result(text)
    assert info.value.locus == "prices[0]"


def test_validate_matches_parse():
    assert parse_instance(serialize_instance(validate_instance([[0, 5], [7, 0]]))).values == ((0, 5), (7, 0))
