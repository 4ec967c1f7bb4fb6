import json

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from chainlambda.figures import Table
from chainlambda.output import read_csv, to_csv, to_json

STAMP = "2020-01-01T00:00:00+00:00"


def test_csv_layout():
    table = Table(["a", "b"], [(1.0, None), (0.1, 2.5)], {"mode": "equal"})
    text = to_csv(table, timestamp=STAMP)
    assert text.splitlines() == [
        f"# generated: {STAMP}",
        '# mode: "equal"',
        "a,b",
        "1,",
        "0.10000000000000001,2.5",
    ]


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_round_trip_is_lossless(values):
    table = Table(["x"], [(v,) for v in values], {"grid": [1, 2, 3], "note": "ok"})
    back = read_csv(to_csv(table, timestamp=STAMP))
    assert back.columns == ["x"]
    assert [r[0] for r in back.rows] == values
    assert back.meta == {"generated": STAMP, "grid": [1, 2, 3], "note": "ok"}


def test_csv_strings_survive():
    table = Table(["state", "v"], [("g1", 1.0), ("e1", None)])
    back = read_csv(to_csv(table, timestamp=STAMP))
    assert back.rows == [("g1", 1.0), ("e1", None)]


def test_json_layout():
    table = Table(["p", "r"], [(0.1, float(np.float64(2.0)))], {"states": 5})
    doc = json.loads(to_json(table, timestamp=STAMP))
    assert doc == {"meta": {"generated": STAMP, "states": 5}, "rows": [{"p": 0.1, "r": 2.0}]}


def test_timestamp_defaults_to_now():
    line = to_csv(Table(["a"], [])).splitlines()[0]
    assert line.startswith("# generated: 20")
