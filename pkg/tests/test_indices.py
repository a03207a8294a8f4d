import pytest

from nterm.indices import Cube, Pair, Rect, canonical_key, format_index, interval, parse_index


def test_cube_measure_and_support():
    q = Cube(2, (3,))
    assert q.measure == 0.25
    assert q.log2_measure == -2
    assert q.support() == ((0.75, 1.0),)
    q2 = Cube(1, (0, 1))
    assert q2.measure == 0.25
    assert q2.support() == ((0.0, 0.5), (0.5, 1.0))


def test_cubes_nested_or_disjoint():
    cubes = [Cube(j, (k,)) for j in range(4) for k in range(2**j)]
    for a in cubes:
        for b in cubes:
            if a.j <= b.j:
                nested = a.contains(b)
                lo_a, hi_a = a.support()[0]
                lo_b, hi_b = b.support()[0]
                overlap = max(lo_a, lo_b) < min(hi_a, hi_b)
                assert nested == overlap


def test_ancestor():
    q = Cube(3, (5,))
    assert q.ancestor(1) == Cube(1, (1,))
    with pytest.raises(ValueError):
        q.ancestor(4)


def test_canonical_order():
    assert canonical_key(Cube(0, (0,))) < canonical_key(Cube(1, (0,)))
    assert canonical_key(Cube(1, (0,))) < canonical_key(Cube(1, (1,)))
    assert canonical_key(Pair(0, 5)) < canonical_key(Pair(1, 1))
    r1 = Rect((interval(0, 0), interval(1, 0)))
    r2 = Rect((interval(0, 0), interval(1, 1)))
    assert canonical_key(r1) < canonical_key(r2)


@pytest.mark.parametrize(
    "idx,kind,text",
    [
        (7, "integer", "7"),
        (Cube(2, (1,)), "cube", "2:1"),
        (Cube(1, (0, 1)), "cube", "1:0,1"),
        (Rect((interval(1, 0), interval(2, 3))), "rect", "1:0|2:3"),
        (Pair(0, 3), "pair", "a:3"),
        (Pair(1, 2), "pair", "b:2"),
    ],
)
def test_serialization_round_trip(idx, kind, text):
    assert format_index(idx) == text
    assert parse_index(text, kind) == idx


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_index("x:1", "pair")
    with pytest.raises(ValueError):
        parse_index("1,2", "cube")
