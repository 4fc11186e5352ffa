"""
Input and output formats.

Pool files are CSV with a `score,label` header. ROC spec documents are JSON
(or YAML) mappings with a `type` key. Result tables are CSV preceded by a
comment line identifying the tool version, the seed and the inputs.
"""

from pathlib import Path
from typing import (
    Any,
    BinaryIO,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    TextIO,
    Tuple,
    Union,
)
import csv
import logging
import math

import ujson  # debdeps: python3-ujson
import yaml  # debdeps: python3-yaml

from rocscale import __version__
from rocscale.bon import BonProfile, ComparisonRow
from rocscale.models import DegeneratePool, DomainError, InvalidCurve, RocCurve, ScorePool
from rocscale.rejection import AccuracyComputeCurve
from rocscale.roc import (
    binormal_curve,
    empirical_roc,
    linear_slope_curve,
    points_curve,
    power_curve,
    two_segment_curve,
)
from rocscale.simulate import SimResult
from rocscale.utils import RocScaleError, fmt_real

log = logging.getLogger("rocscale.fileio")

POOL_HEADER = ["score", "label"]
PathLike = Union[str, Path]

REJECTION_COLUMNS = ["F", "T", "C", "A", "dA_dC_left", "dA_dC_right"]
BON_COLUMNS = ["N", "acc_exact", "acc_sim", "ci_low", "ci_high"]
COMPARE_COLUMNS = ["N", "C", "acc_rs", "acc_bon"]
SUMMARY_COLUMNS = ["key", "value"]
SIMULATION_COLUMNS = [
    "method",
    "param",
    "analytic",
    "analytic_draws",
    "acc_mean",
    "acc_ci_low",
    "acc_ci_high",
    "draws_mean",
    "draws_ci_low",
    "draws_ci_high",
    "trials",
    "truncated",
]

# type -> (required keys, optional keys with defaults)
SPEC_TYPES: Dict[str, Tuple[Tuple[str, ...], Dict[str, Any]]] = {
    "empirical": (("pool_path",), {}),
    "points": (("points",), {}),
    "linear_slope": (("alpha",), {}),
    "power": (("gamma",), {"grid": 1024}),
    "two_segment": (("knee",), {"t0": 0.0}),
    "binormal": (("mu",), {"grid": 1024}),
}


class ParseError(RocScaleError, ValueError):
    def __init__(self, msg: str, row: int):
        super().__init__(f"row {row}: {msg}")
        self.row = row


class EmptyPool(RocScaleError, ValueError):
    pass


class SpecError(RocScaleError, ValueError):
    def __init__(self, msg: str, field: str):
        super().__init__(f"{field}: {msg}")
        self.field = field


# # Pools


def _parse_row(row: List[str], rownum: int) -> Tuple[float, int]:
    if len(row) != 2:
        raise ParseError(f"expected 2 columns, got {len(row)}", rownum)
    try:
        score = float(row[0])
    except ValueError:
        raise ParseError(f"score {row[0]!r} is not a number", rownum)
    if not 0.0 <= score <= 1.0:
        raise ParseError(f"score {row[0]} outside [0, 1]", rownum)
    label = row[1].strip()
    if label not in ("0", "1"):
        raise ParseError(f"label {row[1]!r} is not 0 or 1", rownum)
    return score, int(label)


def _data_lines(fp: BinaryIO) -> Iterator[str]:
    """Decode the non-blank, non-comment lines; the header is row 0"""
    row = -1
    for raw in fp:
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"not valid UTF-8: {e.reason}", row + 1)
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        row += 1
        yield line


def load_pool(path: PathLike) -> ScorePool:
    """Read a `score,label` CSV file. Lines starting with # are skipped and
    rows are numbered from 1 after the header
    """
    path = Path(path)
    with path.open("rb") as f:
        reader = csv.reader(_data_lines(f))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != POOL_HEADER:
            raise ParseError(f"the header must be {','.join(POOL_HEADER)}", 0)
        pairs = [_parse_row(row, n) for n, row in enumerate(reader, 1)]

    if not pairs:
        raise EmptyPool(f"{path} has no samples")
    pool = ScorePool.from_pairs(pairs)
    log.info(
        "Loaded %s: %d samples, %d positive, %d negative, pi=%g",
        path, pool.size, pool.n_pos, pool.n_neg, pool.pi,
    )
    return pool


def write_pool(pool: ScorePool, fp: TextIO) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(POOL_HEADER)
    for s in pool.samples:
        writer.writerow([fmt_real(s.score), s.label])


# # ROC spec documents


def read_document(path: PathLike) -> Mapping[str, Any]:
    """Parse a JSON or YAML mapping. Leading # lines are comments in both"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise SpecError(f"{path} is not valid UTF-8: {e.reason}", "document")
    try:
        if path.suffix in (".yaml", ".yml"):
            doc = yaml.safe_load(text)
        else:
            lines = text.splitlines(keepends=True)
            while lines and lines[0].lstrip().startswith("#"):
                lines.pop(0)
            doc = ujson.loads("".join(lines))
    except (ValueError, yaml.YAMLError) as e:
        raise SpecError(f"cannot parse {path}: {e}", "document")
    if not isinstance(doc, dict):
        raise SpecError(f"{path} must contain a mapping", "document")
    return doc


def _number(doc: Mapping[str, Any], key: str) -> float:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"expected a number, got {v!r}", key)
    return float(v)


def _pair(v: Any, key: str) -> Tuple[float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise SpecError(f"expected an [F, T] pair, got {v!r}", key)
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise SpecError(f"expected numbers, got {v!r}", key)
    return float(v[0]), float(v[1])


def curve_from_spec(doc: Mapping[str, Any], base_dir: PathLike = ".") -> RocCurve:
    """Build the curve a spec document describes. Relative pool paths are
    resolved against base_dir
    """
    kind = doc.get("type")
    if kind not in SPEC_TYPES:
        raise SpecError(f"unknown curve type {kind!r}, expected one of {sorted(SPEC_TYPES)}", "type")
    required, optional = SPEC_TYPES[kind]
    for key in doc:
        if key != "type" and key not in required and key not in optional:
            raise SpecError(f"unexpected key for a {kind} curve", key)
    for key in required:
        if key not in doc:
            raise SpecError(f"missing for a {kind} curve", key)
    doc = {**optional, **doc}

    field = required[0]
    try:
        if kind == "empirical":
            pool_path = Path(base_dir) / doc["pool_path"]
            try:
                pool = load_pool(pool_path)
            except OSError as e:
                raise SpecError(f"cannot read {pool_path}: {e.strerror}", "pool_path")
            return empirical_roc(pool)
        if kind == "points":
            pts = doc["points"]
            if not isinstance(pts, list):
                raise SpecError("expected a list of [F, T] pairs", "points")
            return points_curve([_pair(p, "points") for p in pts])
        if kind == "linear_slope":
            return linear_slope_curve(_number(doc, "alpha"))
        if kind == "two_segment":
            knee_f, knee_t = _pair(doc["knee"], "knee")
            return two_segment_curve(knee_f, knee_t, _number(doc, "t0"))

        grid = doc["grid"]
        if isinstance(grid, bool) or not isinstance(grid, int):
            raise SpecError(f"expected an integer, got {grid!r}", "grid")
        if grid < 1:
            raise SpecError(f"must be >= 1, got {grid}", "grid")
        field = "gamma" if kind == "power" else "mu"
        if kind == "power":
            return power_curve(_number(doc, "gamma"), grid)
        return binormal_curve(_number(doc, "mu"), grid)
    except (DegeneratePool, DomainError, InvalidCurve) as e:
        raise SpecError(str(e), field)


def load_roc_spec(path: PathLike) -> RocCurve:
    path = Path(path)
    curve = curve_from_spec(read_document(path), path.parent)
    log.info("Loaded %s: %s with %d points", path, curve.kind.describe(), len(curve))
    return curve


def points_document(curve: RocCurve) -> Dict[str, Any]:
    return {"type": "points", "points": [[f, t] for f, t in curve.points]}


def write_points_spec(curve: RocCurve, fp: TextIO, header: str = "") -> None:
    """Write the curve as a `points` document after the comment header;
    reloading gives the same points
    """
    fp.write(header)
    fp.write(ujson.dumps(points_document(curve), indent=2))
    fp.write("\n")


# # Result tables


def output_header(seed: Optional[int], inputs: Mapping[str, str]) -> str:
    """Comment line opening every output table"""
    ins = ",".join(f"{name}:{digest}" for name, digest in inputs.items()) or "none"
    s = "none" if seed is None else str(seed)
    return f"# rocscale {__version__} seed={s} inputs={ins}\n"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v} in an output table")
        return fmt_real(v)
    return str(v)


def write_table(
    fp: TextIO, header: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]
) -> int:
    """Write a comment header, column names and rows. Returns the row count"""
    fp.write(header)
    writer = csv.writer(fp, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    n = 0
    for row in rows:
        writer.writerow([_cell(v) for v in row])
        n += 1
    return n


def write_rejection_csv(fp: TextIO, header: str, profile: AccuracyComputeCurve) -> int:
    """Write the finite-cost rows of a rejection profile.

    Returns the number of infinite-cost rows left out.
    """
    rows = (
        (p.F, p.T, p.C, p.A, p.dA_dC_left, p.dA_dC_right) for p in profile.finite()
    )
    write_table(fp, header, REJECTION_COLUMNS, rows)
    omitted = len(profile.infinite())
    if omitted:
        log.info("Left out %d infinite-cost rows of %s", omitted, profile.curve_id)
    return omitted


def write_bon_csv(
    fp: TextIO, header: str, profile: BonProfile, sims: Optional[Mapping[int, SimResult]] = None
) -> int:
    sims = sims or {}
    rows = []
    for p in profile.points:
        sim = sims.get(p.N)
        if sim is None:
            rows.append((p.N, p.acc_exact, None, None, None))
        else:
            a = sim.accuracy
            rows.append((p.N, p.acc_exact, a.mean, a.ci_low, a.ci_high))
    return write_table(fp, header, BON_COLUMNS, rows)


def write_compare_csv(fp: TextIO, header: str, rows: Sequence[ComparisonRow]) -> int:
    return write_table(
        fp, header, COMPARE_COLUMNS, ((r.N, r.C, r.acc_rs, r.acc_bon) for r in rows)
    )


def simulation_row(
    method: str,
    param: float,
    res: SimResult,
    analytic: Optional[float],
    analytic_draws: Optional[float] = None,
) -> Tuple[Any, ...]:
    a, d = res.accuracy, res.mean_draws
    draws = (d.mean, d.ci_low, d.ci_high) if d else (None, None, None)
    return (
        (method, param, analytic, analytic_draws, a.mean, a.ci_low, a.ci_high)
        + draws
        + (res.trials_used, res.truncated)
    )


def write_simulation_csv(fp: TextIO, header: str, rows: Sequence[Sequence[Any]]) -> int:
    return write_table(fp, header, SIMULATION_COLUMNS, rows)


def write_summary(fp: TextIO, header: str, items: Sequence[Tuple[str, Any]]) -> int:
    """Two-column key,value table; booleans are written as 0/1"""
    rows = ((k, int(v) if isinstance(v, bool) else v) for k, v in items)
    return write_table(fp, header, SUMMARY_COLUMNS, rows)
