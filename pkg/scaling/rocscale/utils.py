from hashlib import sha256
from pathlib import Path
from typing import List, Union

SLOPE_TOL = 1e-12


class RocScaleError(Exception):
    """Base class for errors caused by input data rather than by a bug"""


def fmt_real(x: float) -> str:
    """17 significant digits: reals round-trip exactly through text"""
    return f"{x:.17g}"


def file_digest(path: Union[str, Path]) -> str:
    """Short content hash used to identify inputs in output headers"""
    h = sha256(Path(path).read_bytes())
    return h.hexdigest()[:16]


def parse_int_list(s: str) -> List[int]:
    """Parse "1,2,4" or a range "1-8" (inclusive, powers of two with "1-256:pow2")"""
    out: List[int] = []
    for chunk in s.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "-" in chunk:
            rng, _, mode = chunk.partition(":")
            lo, hi = (int(x) for x in rng.split("-", 1))
            if mode == "pow2":
                v = 1
                while v <= hi:
                    if v >= lo:
                        out.append(v)
                    v *= 2
            elif mode == "":
                out.extend(range(lo, hi + 1))
            else:
                raise ValueError(f"Unknown range mode {mode!r}")
        else:
            out.append(int(chunk))
    return sorted(set(out))


def parse_real_list(s: str) -> List[float]:
    return sorted({float(x) for x in s.split(",") if x.strip()})
