"""
File-based input/output - no database needed.
Parses Mueller grids and structured documents, writes reports and tables.

Structured documents are JSON with one of the keys
    "mueller"          row-major 16 reals (or a 4x4 nested list)
    "jones_ensemble"   list of {"weight": w, "jones": 2x2 complex}
    "retarder_family"  list of {"weight": w, "axis": [x, y, z]}
    "kraus"            list of 2x2 complex
    "choi"             4x4 complex
Complex scalars are [re, im] pairs; matrices are row-major.
"""
import csv
import hashlib
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from polarlab.channel_lab import KrausSet, check_choi_hermitian
from polarlab.config import (
    CHOI_HERMITIAN_TOL,
    DEFAULT_OUTPUT_DIR,
    SUPPORTED_INPUT_EXTENSIONS,
    SWEEP_CSV_HEADER,
)
from polarlab.ensemble_lab import JonesEnsemble, VisibilityCurve, retarder_family
from polarlab.errors import NonHermitianError, ParseError
from polarlab.pauli_core import as_spinor, bloch_to_spinor

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ==================== LOW-LEVEL READING ====================

def read_text(path: PathLike) -> str:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"Input file not found: {path}")
    return path.read_text(encoding="utf-8")


def input_digest(path: PathLike) -> str:
    """sha256 of the raw file bytes"""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def document_digest(doc: Dict[str, Any]) -> str:
    """sha256 of a canonical JSON rendering (for in-memory documents)"""
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def is_structured(path: PathLike, text: Optional[str] = None) -> bool:
    if Path(path).suffix.lower() == ".json":
        return True
    text = text if text is not None else read_text(path)
    return text.lstrip().startswith("{")


def parse_document_text(text: str) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Malformed structured document: {e.msg}", row=e.lineno, column=e.colno)
    if not isinstance(doc, dict):
        raise ParseError("Structured document must be an object")
    return doc


def load_document(path: PathLike) -> Dict[str, Any]:
    return parse_document_text(read_text(path))


def require_key(doc: Dict[str, Any], key: str) -> Any:
    if key not in doc:
        raise ParseError(f"Structured document has no '{key}' key (found: {sorted(doc)})")
    return doc[key]


# ==================== REAL VALUES ====================

def parse_real(value: Any, row: Optional[int] = None, column: Optional[int] = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ParseError(f"Expected a real number, got {value!r}", row, column)
    try:
        number = float(value)
    except ValueError:
        raise ParseError(f"Non-real entry {value!r}", row, column)
    if not math.isfinite(number):
        raise ParseError(f"Non-finite entry {value!r}", row, column)
    return number


def parse_mueller_grid(text: str) -> np.ndarray:
    """4 lines of 4 reals, comma and/or whitespace separated; '#' starts a comment"""
    rows: List[List[float]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = [t for t in content.replace(",", " ").split() if t]
        if len(tokens) != 4:
            raise ParseError(f"Expected 4 values per row, got {len(tokens)}", row=line_no)
        rows.append([parse_real(tok, line_no, col) for col, tok in enumerate(tokens, start=1)])
    if len(rows) != 4:
        raise ParseError(f"Expected 4 rows, got {len(rows)}", row=len(rows))
    return np.array(rows, dtype=float)


def parse_mueller_document(doc: Dict[str, Any]) -> np.ndarray:
    data = require_key(doc, "mueller")
    if not isinstance(data, list):
        raise ParseError("'mueller' must be a list")
    if data and all(isinstance(row, list) for row in data):
        flat = [v for row in data for v in row]
    else:
        flat = data
    if len(flat) != 16:
        deficit = 16 - len(flat)
        detail = f"missing {deficit}" if deficit > 0 else f"{-deficit} too many"
        raise ParseError(f"'mueller' needs 16 values, got {len(flat)} ({detail})")
    values = [parse_real(v, row=i // 4 + 1, column=i % 4 + 1) for i, v in enumerate(flat)]
    return np.array(values, dtype=float).reshape(4, 4)


def parse_mueller_text(text: str, structured: bool) -> np.ndarray:
    if structured:
        return parse_mueller_document(parse_document_text(text))
    return parse_mueller_grid(text)


def parse_mueller_file(path: PathLike) -> np.ndarray:
    text = read_text(path)
    return parse_mueller_text(text, is_structured(path, text))


# ==================== COMPLEX VALUES ====================

def parse_complex(value: Any, where: str = "") -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(parse_real(value), 0.0)
    if not isinstance(value, list) or len(value) != 2:
        raise ParseError(f"Complex entries must be [re, im] pairs{where}, got {value!r}")
    return complex(parse_real(value[0]), parse_real(value[1]))


def parse_complex_matrix(data: Any, shape: Tuple[int, int], where: str = "") -> np.ndarray:
    """
    Accepts nested rows of [re, im] pairs or reals, a flat row-major list of pairs,
    or a flat row-major list of interleaved reals.
    """
    rows, cols = shape
    if not isinstance(data, list):
        raise ParseError(f"Expected a {rows}x{cols} complex matrix{where}")

    nested = len(data) == rows and all(
        isinstance(r, list) and r and (isinstance(r[0], list) or len(r) == cols) for r in data
    )
    if nested:
        entries = []
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ParseError(f"Row {i + 1} has {len(row)} entries, expected {cols}{where}")
            entries.extend(row)
    elif all(isinstance(v, list) for v in data):
        entries = data
    else:
        if len(data) % 2:
            raise ParseError(f"Odd number of reals ({len(data)}) cannot form [re, im] pairs{where}")
        entries = [data[i:i + 2] for i in range(0, len(data), 2)]

    if len(entries) != rows * cols:
        raise ParseError(f"Expected {rows * cols} complex entries{where}, got {len(entries)}")
    values = [parse_complex(v, where) for v in entries]
    return np.array(values, dtype=complex).reshape(rows, cols)


def parse_complex_matrix_file(path: PathLike, shape: Tuple[int, int], key: str) -> np.ndarray:
    doc = load_document(path)
    matrix = parse_complex_matrix(require_key(doc, key), shape, f" in '{key}'")
    if key == "choi":
        matrix = ensure_hermitian_choi(matrix)
    return matrix


def ensure_hermitian_choi(matrix: np.ndarray, tol: float = CHOI_HERMITIAN_TOL) -> np.ndarray:
    try:
        return check_choi_hermitian(matrix, tol)
    except NonHermitianError as e:
        raise ParseError(e.message)


# ==================== DOCUMENT TYPES ====================

def parse_kraus_document(doc: Dict[str, Any]) -> KrausSet:
    ops = require_key(doc, "kraus")
    if not isinstance(ops, list) or not ops:
        raise ParseError("'kraus' must be a nonempty list of 2x2 complex matrices")
    kraus = KrausSet([parse_complex_matrix(op, (2, 2), f" in kraus[{i}]") for i, op in enumerate(ops)])
    logger.debug(f"Loaded {len(kraus.ops)} Kraus operators, completeness deviation {kraus.completeness_deviation():.3e}")
    return kraus


def parse_choi_document(doc: Dict[str, Any], tol: float = CHOI_HERMITIAN_TOL) -> np.ndarray:
    return ensure_hermitian_choi(parse_complex_matrix(require_key(doc, "choi"), (4, 4), " in 'choi'"), tol)


def parse_jones_document(doc: Dict[str, Any]) -> np.ndarray:
    return parse_complex_matrix(require_key(doc, "jones"), (2, 2), " in 'jones'")


def parse_member_weight(member: Dict[str, Any], index: int) -> float:
    weight = parse_real(member.get("weight"), row=index + 1)
    if weight <= 0:
        raise ParseError(f"Member {index} has non-positive weight {weight}")
    return weight


def parse_ensemble_document(doc: Dict[str, Any]) -> JonesEnsemble:
    members = require_key(doc, "jones_ensemble")
    if not isinstance(members, list) or not members:
        raise ParseError("'jones_ensemble' must be a nonempty list")
    weights, jones_list = [], []
    for i, member in enumerate(members):
        if not isinstance(member, dict):
            raise ParseError(f"Ensemble member {i} must be an object with 'weight' and 'jones'")
        weights.append(parse_member_weight(member, i))
        jones_list.append(parse_complex_matrix(member.get("jones"), (2, 2), f" in jones_ensemble[{i}]"))
    return JonesEnsemble.from_weights(weights, jones_list)


def parse_retarder_family_document(doc: Dict[str, Any]):
    members = require_key(doc, "retarder_family")
    if not isinstance(members, list) or not members:
        raise ParseError("'retarder_family' must be a nonempty list")
    weights, axes = [], []
    for i, member in enumerate(members):
        if not isinstance(member, dict):
            raise ParseError(f"Family member {i} must be an object with 'weight' and 'axis'")
        weights.append(parse_member_weight(member, i))
        axis = member.get("axis")
        if not isinstance(axis, list) or len(axis) != 3:
            raise ParseError(f"Family member {i} needs a 3-component axis")
        axis = [parse_real(v, row=i + 1, column=j + 1) for j, v in enumerate(axis)]
        if np.linalg.norm(axis) == 0:
            raise ParseError(f"Family member {i} has a zero axis")
        axes.append(axis)
    total = float(sum(weights))
    return retarder_family(axes, [w / total for w in weights])


def parse_probe(values: Sequence[float]) -> np.ndarray:
    """[re, im, re, im] spinor or [x, y, z] Bloch vector -> normalized spinor"""
    values = [float(v) for v in values]
    if len(values) == 4:
        psi = np.array([complex(values[0], values[1]), complex(values[2], values[3])])
        norm = float(np.linalg.norm(psi))
        if norm == 0.0:
            raise ParseError("Probe spinor is zero")
        return as_spinor(psi / norm)
    if len(values) == 3:
        return bloch_to_spinor(values)
    raise ParseError(f"Probe must have 3 (Bloch) or 4 (spinor) components, got {len(values)}")


def parse_probe_text(text: str) -> List[float]:
    tokens = [t for t in text.replace(",", " ").split() if t]
    return [parse_real(t, column=i + 1) for i, t in enumerate(tokens)]


# ==================== SERIALIZATION ====================

def to_jsonable(value: Any) -> Any:
    """numpy -> plain JSON types; complex -> [re, im]; NaN -> None"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def report_to_json(report) -> str:
    return json.dumps(to_jsonable(report.ordered()), indent=2) + "\n"


def flatten(prefix: str, value: Any, rows: List[Tuple[str, str, str]], section: str):
    if isinstance(value, dict):
        for key, item in value.items():
            flatten(f"{prefix}.{key}" if prefix else str(key), item, rows, section)
    elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        for i, item in enumerate(value):
            flatten(f"{prefix}[{i}]" if prefix else f"[{i}]", item, rows, section)
    else:
        rows.append((section, prefix, format_value(value)))


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


def report_to_table(report) -> str:
    """section,key,value rows in fixed section order"""
    rows: List[Tuple[str, str, str]] = []
    for section, value in to_jsonable(report.ordered()).items():
        flatten("", value, rows, section)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["section", "key", "value"])
    writer.writerows(rows)
    return buffer.getvalue()


def curve_rows(curve: VisibilityCurve) -> List[Dict[str, Any]]:
    return [
        {"param": p, "re_v": re_v, "im_v": im_v, "arg_v": arg_v, "abs_v": abs_v}
        for p, re_v, im_v, arg_v, abs_v in curve.to_rows()
    ]


def sweep_to_csv(rows: List[Dict[str, Any]]) -> str:
    """param,re_v,im_v,arg_v,abs_v; an undefined phase leaves arg_v empty"""
    buffer = io.StringIO()
    buffer.write(SWEEP_CSV_HEADER + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    columns = SWEEP_CSV_HEADER.split(",")
    for row in rows:
        writer.writerow([format_value(to_jsonable(row[c])) for c in columns])
    return buffer.getvalue()


def render_report(report, fmt: str) -> str:
    if fmt == "table" and report.sweep is not None and report.error is None:
        return sweep_to_csv(report.sweep)
    if fmt == "table":
        return report_to_table(report)
    return report_to_json(report)


def write_text(content: str, path: Optional[PathLike]) -> Optional[str]:
    """Write to path (creating parents) or return content when no path is given"""
    if path is None:
        return content
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(content)
    return None


# ==================== DIRECTORY SCANNING ====================

def list_input_files(directory: PathLike) -> List[Path]:
    """All supported input files below a directory, sorted by relative path"""
    directory = Path(directory)
    files = []
    for ext in SUPPORTED_INPUT_EXTENSIONS:
        files.extend(p for p in directory.rglob(f"*{ext}") if p.is_file())
    return sorted(set(files), key=lambda p: str(p.relative_to(directory)))


class FileManager:
    """Writes reports next to each other in an output directory."""

    def __init__(self, output_dir: PathLike = DEFAULT_OUTPUT_DIR):
        self.output_dir = Path(output_dir)

    def report_path(self, input_path: PathLike, fmt: str, root: Optional[PathLike] = None) -> Path:
        """<output_dir>/<relative input path>.<json|csv>"""
        input_path = Path(input_path)
        relative = input_path.relative_to(root) if root is not None else Path(input_path.name)
        suffix = ".csv" if fmt == "table" else ".json"
        return self.output_dir / relative.with_suffix(suffix)

    def save_report(self, report, path: Optional[PathLike], fmt: str) -> str:
        content = render_report(report, fmt)
        write_text(content, path)
        if path is not None:
            logger.info(f"Report written to {path}")
        return content


# Singleton instance
file_manager = FileManager()
