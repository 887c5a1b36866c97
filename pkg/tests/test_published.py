import pytest

from miml.published import PUBLISHED, ROWS, TRUTH, lookup, parse_cell


def test_parse_cells():
    c = parse_cell(".62")
    assert c.value == 0.62 and c.unit == pytest.approx(0.01)
    assert parse_cell("1.6E+181").value == 1.6e181 and parse_cell("1.6E+181").unit == pytest.approx(1e180)
    assert parse_cell("76,986").value == 76986 and parse_cell("205*").value == 205
    assert parse_cell("94%").value == 94 and parse_cell("94%").unit == 1
    with pytest.raises(ValueError):
        parse_cell("abc")


def test_table_shapes():
    assert len(PUBLISHED["table1"]) == 3 * 4
    assert len(PUBLISHED["table2"]) == 4 * 4
    assert len(PUBLISHED["table3"]) == 6 * 4
    assert len(PUBLISHED["table4"]) == 5 * 4 and len(PUBLISHED["table5"]) == 5 * 4
    assert all(len(cells) == 9 for t in PUBLISHED.values() for cells in t.values())


def test_spot_values():
    ml = lookup("table1", "ML", 25, "MXN")
    assert ml[1][0].value == 0.5 and ml[1][1].value == 0.51
    assert lookup("table2", "PDMI(D=5,nu=-2)", 25, "MCAR")[2][1].value == 76986
    assert lookup("table3", "ML", 25, "MXN")[0][1].value == 1
    assert lookup("table5", "ML/tstar-bounded", 100, "MCAR")[1][0].value == 0.5
    assert lookup("table4", "ML/normal", 25, "MXN")[2][1].value == 83
    assert TRUTH[2] == 0.75 and ROWS[0] == (25, "MXN")


def test_table3_ranks_are_permutations():
    t = PUBLISHED["table3"]
    keys = sorted({k for k, _, _ in t})
    for n, pattern in ROWS:
        for j in range(9):
            assert sorted(int(t[(k, n, pattern)][j][1].value) for k in keys) == [1, 2, 3, 4, 5, 6]
