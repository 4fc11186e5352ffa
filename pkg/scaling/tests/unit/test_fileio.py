import io
from textwrap import dedent

import pytest

from rocscale import __version__
from rocscale.bon import bon_profile
from rocscale.fileio import (
    EmptyPool,
    ParseError,
    SpecError,
    load_pool,
    load_roc_spec,
    output_header,
    write_bon_csv,
    write_points_spec,
    write_pool,
    write_rejection_csv,
    write_summary,
    write_table,
)
from rocscale.rejection import profile
from rocscale.roc import binormal_curve, linear_slope_curve, points_curve, power_curve

DIAG = points_curve([(0, 0), (1, 1)])


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(dedent(text))
    return p


# # Pools


def test_load_pool(tmp_path):
    p = write(tmp_path, "pool.csv", "score,label\n0.9,1\n0.1,0\n")
    pool = load_pool(p)
    assert pool.size == 2
    assert pool.pi == 0.5


def test_load_pool_skips_comments(tmp_path, tiny_pool):
    pool = load_pool(tiny_pool)
    assert pool.size == 3
    assert [s.score for s in pool.samples] == [0.9, 0.5, 0.1]


def test_load_pool_bad_score(tmp_path):
    p = write(tmp_path, "pool.csv", "score,label\n1.2,1\n")
    with pytest.raises(ParseError) as e:
        load_pool(p)
    assert e.value.row == 1
    assert "row 1" in str(e.value)


@pytest.mark.parametrize(
    "body,row",
    [
        ("0.5,1\n0.3,2\n", 2),
        ("0.5,1\nabc,0\n", 2),
        ("0.5,1\n0.4\n", 2),
        ("0.5,1\n0.4,1,3\n", 2),
        ("nan,1\n", 1),
    ],
)
def test_load_pool_parse_errors(tmp_path, body, row):
    p = write(tmp_path, "pool.csv", "score,label\n" + body)
    with pytest.raises(ParseError) as e:
        load_pool(p)
    assert e.value.row == row


def test_load_pool_bad_header(tmp_path):
    p = write(tmp_path, "pool.csv", "label,score\n1,0.9\n")
    with pytest.raises(ParseError):
        load_pool(p)


def test_load_pool_header_only(tmp_path):
    p = write(tmp_path, "pool.csv", "score,label\n")
    with pytest.raises(EmptyPool):
        load_pool(p)


def test_load_pool_invalid_utf8(tmp_path):
    p = tmp_path / "pool.csv"
    p.write_bytes(b"score,label\n# comment\n0.5,1\n0.4,\xff0\n")
    with pytest.raises(ParseError) as e:
        load_pool(p)
    assert e.value.row == 2
    assert "UTF-8" in str(e.value)


def test_pool_round_trip(tmp_path, tiny_pool):
    pool = load_pool(tiny_pool)
    out = tmp_path / "copy.csv"
    with out.open("w") as f:
        write_pool(pool, f)
    assert load_pool(out) == pool


# # ROC spec documents


def test_load_linear_slope(tmp_path):
    p = write(tmp_path, "c.json", '{"type": "linear_slope", "alpha": 4}')
    assert load_roc_spec(p).points == ((0.0, 0.0), (0.25, 1.0), (1.0, 1.0))


def test_load_points(tmp_path):
    p = write(tmp_path, "c.json", '{"type": "points", "points": [[0, 0.5], [1, 1]]}')
    c = load_roc_spec(p)
    assert c.points == ((0.0, 0.5), (1.0, 1.0))
    assert c.kind.name == "piecewise"


def test_load_power(tmp_path):
    p = write(tmp_path, "c.json", '{"type": "power", "gamma": 0.5, "grid": 1024}')
    c = load_roc_spec(p)
    assert c.points == power_curve(0.5, grid=1024).points
    assert len(c) == 1025


def test_load_yaml(tmp_path):
    p = write(
        tmp_path,
        "c.yaml",
        """\
        type: binormal
        mu: 1.5
        grid: 64
        """,
    )
    assert load_roc_spec(p).points == binormal_curve(1.5, grid=64).points


def test_load_two_segment(tmp_path):
    p = write(tmp_path, "c.json", '{"type": "two_segment", "knee": [0.2, 0.7], "t0": 0.1}')
    assert load_roc_spec(p).points == ((0.0, 0.1), (0.2, 0.7), (1.0, 1.0))


def test_load_empirical_relative_pool(tmp_path, tiny_pool):
    p = write(tmp_path, "c.json", '{"type": "empirical", "pool_path": "tiny.csv"}')
    assert load_roc_spec(p).points == ((0.0, 1.0), (0.5, 1.0), (1.0, 1.0))


def test_load_empirical_missing_pool(tmp_path):
    p = write(tmp_path, "c.json", '{"type": "empirical", "pool_path": "nope.csv"}')
    with pytest.raises(SpecError) as e:
        load_roc_spec(p)
    assert e.value.field == "pool_path"
    assert "nope.csv" in str(e.value)


def test_load_spec_invalid_utf8(tmp_path):
    p = tmp_path / "c.json"
    p.write_bytes(b'{"type": "linear_slope", "alpha": 4\xff}')
    with pytest.raises(SpecError) as e:
        load_roc_spec(p)
    assert e.value.field == "document"


def test_load_spec_skips_leading_comments(tmp_path):
    p = write(tmp_path, "c.json", '# rocscale\n# more\n{"type": "linear_slope", "alpha": 4}')
    assert load_roc_spec(p).points == linear_slope_curve(4).points


@pytest.mark.parametrize(
    "doc,field",
    [
        ('{"type": "linear_slope", "alpha": 4, "beta": 1}', "beta"),
        ('{"type": "spline"}', "type"),
        ('{"alpha": 4}', "type"),
        ('{"type": "linear_slope"}', "alpha"),
        ('{"type": "linear_slope", "alpha": -1}', "alpha"),
        ('{"type": "linear_slope", "alpha": "4"}', "alpha"),
        ('{"type": "points", "points": [[0.1, 0], [1, 1]]}', "points"),
        ('{"type": "points", "points": [[0, 0, 0], [1, 1]]}', "points"),
        ('{"type": "power", "gamma": 0.5, "grid": 0}', "grid"),
        ('{"type": "power", "gamma": 0.5, "grid": 1.5}', "grid"),
        ('{"type": "two_segment", "knee": [1.5, 0.5]}', "knee"),
        ("[1, 2]", "document"),
        ("{not json", "document"),
    ],
)
def test_load_roc_spec_errors(tmp_path, doc, field):
    p = write(tmp_path, "c.json", doc)
    with pytest.raises(SpecError) as e:
        load_roc_spec(p)
    assert e.value.field == field


def test_points_spec_round_trip(tmp_path):
    for c in (power_curve(0.37, grid=300), binormal_curve(0.8, grid=200), DIAG):
        p = tmp_path / "c.json"
        with p.open("w") as f:
            write_points_spec(c, f, output_header(42, {}))
        assert p.read_text().startswith("# rocscale ")
        assert load_roc_spec(p).points == c.points


# # Result tables


def test_output_header():
    h = output_header(42, {"pool.csv": "0123456789abcdef"})
    assert h == f"# rocscale {__version__} seed=42 inputs=pool.csv:0123456789abcdef\n"
    assert output_header(None, {}).endswith("seed=none inputs=none\n")


def test_write_rejection_csv_omits_infinite_cost():
    f = io.StringIO()
    omitted = write_rejection_csv(f, "# h\n", profile(DIAG, 0.3, [1.0, 0.5]))
    assert omitted == 1
    lines = f.getvalue().splitlines()
    assert lines[0] == "# h"
    assert lines[1] == "F,T,C,A,dA_dC_left,dA_dC_right"
    assert len(lines) == 4
    assert "inf" not in f.getvalue()
    assert "nan" not in f.getvalue()
    F, T, C, A, left, right = lines[2].split(",")
    assert (float(F), float(C)) == (1.0, 1.0)
    assert right == ""


def test_write_bon_csv():
    f = io.StringIO()
    write_bon_csv(f, "# h\n", bon_profile(DIAG, 0.5, [1, 2]))
    lines = f.getvalue().splitlines()
    assert lines[1] == "N,acc_exact,acc_sim,ci_low,ci_high"
    assert lines[2] == "1,0.5,,,"


def test_write_table_17_digits():
    f = io.StringIO()
    write_table(f, "", ["x"], [(0.1,), (1 / 3,)])
    assert f.getvalue().splitlines()[1:] == ["0.10000000000000001", "0.33333333333333331"]


def test_write_table_rejects_non_finite():
    with pytest.raises(ValueError):
        write_table(io.StringIO(), "", ["x"], [(float("inf"),)])


def test_write_summary():
    f = io.StringIO()
    write_summary(f, "", [("concave", True), ("kind", "piecewise"), ("slope", None)])
    assert f.getvalue().splitlines() == ["key,value", "concave,1", "kind,piecewise", "slope,"]
