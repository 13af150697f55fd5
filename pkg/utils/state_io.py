import re
import math
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from config.messages import ERROR_MESSAGES
from services.evolution_service import DriveCoefficients
from states.families import SequenceFamily, tabulated_family
from utils.errors import ConfigFormatError, InvalidLabelError
from utils.hilbert import BasisLabel, SpaceSpec, Tower, TruncatedState

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_COMMENT = re.compile(r"#.*$")
_KEY_VALUE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+?)\s*$")
_SPACE_HEADER = re.compile(r"^#\s*space\s+(\d+)\s+(half-integer|integer)\s*$")
_DRIVE_KEYS = ("aL", "aL0", "aM", "aM0")


def _fail(kind: str, path: PathLike, detail: str) -> ConfigFormatError:
    return ConfigFormatError(ERROR_MESSAGES["config_format"].format(kind=kind, path=path, detail=detail))


def parse_complex(text: str) -> complex:
    """Accepts 1.5, -2i, 0.3-0.1i, 1+2j, i."""
    if text is None:
        raise ValueError("Empty complex literal")
    cleaned = re.sub(r"\s+", "", text.strip().strip("\"'"))
    if not cleaned or not re.fullmatch(r"[0-9eE.+\-ij]+", cleaned):
        raise ValueError(f"Not a complex literal: {text!r}")
    return complex(cleaned.replace("i", "j"))


def format_complex(value: complex, digits: int = 17) -> str:
    value = complex(value)
    sign = "-" if value.imag < 0 or (value.imag == 0 and math.copysign(1.0, value.imag) < 0) else "+"
    return f"{value.real:.{digits}g}{sign}{abs(value.imag):.{digits}g}i"


def parse_tower(text: str) -> Tower:
    key = text.strip().lower()
    if key in ("half-integer", "half", "1/2"):
        return Tower.HALF_INTEGER
    if key in ("integer", "int", "1"):
        return Tower.INTEGER
    raise ValueError(f"Unknown tower {text!r}")


def _content_lines(path: PathLike) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = _COMMENT.sub("", raw).strip()
        if stripped:
            lines.append((number, stripped))
    return lines


def write_state(state: TruncatedState, path: PathLike) -> Path:
    path = Path(path)
    lines = [f"# space {state.space.two_j_max} {state.space.tower.value}", "# two_j two_k two_m re im"]
    for label in sorted(state.coeffs):
        value = state.coeffs[label]
        lines.append(f"{label.two_j} {label.two_k} {label.two_m} {value.real:.17g} {value.imag:.17g}")
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote {len(state.coeffs)} amplitudes to {path}")
    return path


def read_state(path: PathLike, space: Optional[SpaceSpec] = None) -> TruncatedState:
    header = None
    for raw in Path(path).read_text().splitlines():
        match = _SPACE_HEADER.match(raw.strip())
        if match:
            header = SpaceSpec(int(match.group(1)), parse_tower(match.group(2)))
            break
    coeffs: Dict[BasisLabel, complex] = {}
    for number, line in _content_lines(path):
        fields = line.split()
        if len(fields) != 5:
            raise _fail("state", path, f"line {number} needs 'two_j two_k two_m re im'")
        try:
            label = BasisLabel(int(fields[0]), int(fields[1]), int(fields[2]))
            coeffs[label] = complex(float(fields[3]), float(fields[4]))
        except (ValueError, InvalidLabelError) as e:
            raise _fail("state", path, f"line {number}: {e}") from e
    space = space or header
    if space is None:
        two_j_max = max((label.two_j for label in coeffs), default=0)
        odd = any(label.two_j % 2 for label in coeffs)
        space = SpaceSpec(two_j_max, Tower.HALF_INTEGER if odd else Tower.INTEGER)
    return TruncatedState(space, coeffs)


def read_family(path: PathLike, name: Optional[str] = None) -> SequenceFamily:
    """Family file: header 'tower radius', then 'two_j re im' rows."""
    lines = _content_lines(path)
    if not lines:
        raise _fail("family", path, "empty file")
    header = lines[0][1].split()
    if len(header) != 2:
        raise _fail("family", path, "header must be 'tower radius'")
    try:
        tower = parse_tower(header[0])
        radius = float(header[1])
    except ValueError as e:
        raise _fail("family", path, str(e)) from e
    rows: Dict[int, complex] = {}
    for number, line in lines[1:]:
        fields = line.split()
        if len(fields) != 3:
            raise _fail("family", path, f"line {number} needs 'two_j re im'")
        try:
            two_j = int(fields[0])
            rows[two_j] = complex(float(fields[1]), float(fields[2]))
        except ValueError as e:
            raise _fail("family", path, f"line {number}: {e}") from e
        if two_j < 0 or (tower is Tower.INTEGER and two_j % 2):
            raise _fail("family", path, f"line {number}: two_j={two_j} not in the {tower.value} tower")
    try:
        family = tabulated_family(name or Path(path).stem, tower, rows, domain_radius=radius)
    except InvalidLabelError as e:
        raise _fail("family", path, str(e)) from e
    logger.info(f"Loaded family '{family.name}' with {len(rows)} coefficients from {path}")
    return family


def read_drive(path: PathLike) -> DriveCoefficients:
    """Drive file of 'key = value' lines with keys aL, aL0, aM, aM0; missing keys are zero."""
    values: Dict[str, complex] = {}
    for number, line in _content_lines(path):
        match = _KEY_VALUE.match(line)
        if not match:
            raise _fail("drive", path, f"line {number} is not 'key = value'")
        key, raw = match.groups()
        if key not in _DRIVE_KEYS:
            raise _fail("drive", path, f"line {number}: unknown key '{key}'")
        try:
            values[key] = parse_complex(raw)
        except ValueError as e:
            raise _fail("drive", path, f"line {number}: {e}") from e
    for key in ("aL0", "aM0"):
        if key in values and values[key].imag != 0:
            raise _fail("drive", path, f"{key} must be real")
    return DriveCoefficients(aL=values.get("aL", 0j), aL0=values.get("aL0", 0j).real,
                             aM=values.get("aM", 0j), aM0=values.get("aM0", 0j).real)
