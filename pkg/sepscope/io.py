"""
Text formats for matrices, state specs and reports.

Matrix files:
    # optional comment lines anywhere
    dA dB
    <dA*dB lines of dA*dB whitespace-separated entries "re+imj">

Entries are written with 17 significant digits, so parse(emit(M)) == M.

State spec files are flat key=value lines:
    family=rho_alpha
    alpha=3.5
    dim=8
    r=0.5

Report CSV has the fixed header in REPORT_HEADER.
"""

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .criteria import CriterionReport, DensityMatrix
from .errors import DimensionMismatchError, ParseError
from .matkernel import BipartiteIndex, ComplexMatrix, as_matrix
from .states import StateFamily, StateSpec
from .truncation import SweepResult

REPORT_HEADER = [
    "family",
    "params",
    "dim",
    "realign_trace_norm",
    "ccn",
    "ppt_min_eig",
    "symmetric",
    "rccn_verdict",
    "ppt_verdict",
]


def format_complex(z: complex) -> str:
    """'re+imj' with 17 significant digits per part."""
    return f"{z.real:.17g}{z.imag:+.17g}j"


def emit_matrix(M, dims: BipartiteIndex, comment: Optional[str] = None) -> str:
    """Render a matrix in the matrix-file format."""
    M = as_matrix(M)
    if M.shape != (dims.side, dims.side):
        raise DimensionMismatchError(f"Matrix shape {M.shape} does not match dims {dims.dA}x{dims.dB}")

    lines = []
    if comment:
        lines.extend(f"# {text}" for text in comment.splitlines())
    lines.append(f"{dims.dA} {dims.dB}")
    for row in M:
        lines.append(" ".join(format_complex(complex(z)) for z in row))
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> list[tuple[int, str]]:
    """(1-based line number, line) for every non-blank, non-comment line."""
    return [
        (number, line)
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]


def _tokens(line: str) -> list[tuple[int, str]]:
    """(1-based column, token) pairs of a whitespace-separated line."""
    result = []
    column = 0
    for token in line.split():
        column = line.index(token, column)
        result.append((column + 1, token))
        column += len(token)
    return result


def _parse_complex(token: str, line: int, column: int) -> complex:
    try:
        return complex(token)
    except ValueError:
        raise ParseError(f"'{token}' is not a complex number", line=line, column=column) from None


def parse_matrix(text: str) -> tuple[ComplexMatrix, BipartiteIndex]:
    """
    Parse a matrix file.

    Raises:
        ParseError: Bad header, wrong row or entry count, or a non-numeric token
    """
    lines = _content_lines(text)
    if not lines:
        raise ParseError("missing 'dA dB' header", line=1)

    header_line, header = lines[0]
    header_tokens = _tokens(header)
    if len(header_tokens) != 2:
        raise ParseError("header must be 'dA dB'", line=header_line)
    dims_values = []
    for column, token in header_tokens:
        try:
            value = int(token)
        except ValueError:
            raise ParseError(f"'{token}' is not an integer dimension", line=header_line, column=column) from None
        if value < 1:
            raise ParseError(f"dimension must be >= 1, got {value}", line=header_line, column=column)
        dims_values.append(value)
    dims = BipartiteIndex(*dims_values)

    body = lines[1:]
    if len(body) != dims.side:
        where = body[-1][0] + 1 if body else header_line + 1
        raise ParseError(f"expected {dims.side} matrix rows, got {len(body)}", line=where)

    M = np.zeros((dims.side, dims.side), dtype=np.complex128)
    for r, (number, line) in enumerate(body):
        tokens = _tokens(line)
        if len(tokens) != dims.side:
            raise ParseError(f"expected {dims.side} entries, got {len(tokens)}", line=number)
        for c, (column, token) in enumerate(tokens):
            M[r, c] = _parse_complex(token, number, column)

    return M, dims


def parse_density_matrix(text: str) -> DensityMatrix:
    """
    Parse a matrix file and validate it as a state.

    Raises:
        ParseError: See parse_matrix
        ValidationError: Names the failed invariant (hermitian, trace, positive)
    """
    M, dims = parse_matrix(text)
    return DensityMatrix.from_matrix(M, dims)


def emit_state_spec(spec: StateSpec) -> str:
    """Render a StateSpec as key=value lines."""
    lines = [f"family={spec.family.value}"]
    lines.extend(f"{key}={value!r}" for key, value in spec.params.items())
    if spec.truncation_dim is not None:
        lines.append(f"dim={spec.truncation_dim}")
    if spec.ratio is not None:
        lines.append(f"r={spec.ratio!r}")
    return "\n".join(lines) + "\n"


def parse_state_spec(text: str) -> StateSpec:
    """
    Parse key=value lines into a StateSpec.

    'dim' and 'r' set the truncation dimension and tail ratio; every other
    key except 'family' becomes a parameter.
    """
    family = None
    params: dict[str, float] = {}
    dim = None
    ratio = None

    for number, line in _content_lines(text):
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ParseError("expected key=value", line=number)
        column = line.index("=") + 2

        if key == "family":
            try:
                family = StateFamily(value)
            except ValueError:
                raise ParseError(f"unknown family '{value}'", line=number, column=column) from None
            continue

        try:
            if key == "dim":
                dim = int(value)
            elif key == "r":
                ratio = float(value)
            else:
                params[key] = float(value)
        except ValueError:
            raise ParseError(f"bad value '{value}' for {key}", line=number, column=column) from None

    if family is None:
        raise ParseError("missing 'family=' line", line=1)
    return StateSpec(family=family, params=params, truncation_dim=dim, ratio=ratio)


@dataclass(frozen=True)
class ReportRow:
    """One CSV line."""
    family: str
    params: str
    dim: int
    realign_trace_norm: Optional[float]
    ccn: Optional[float]
    ppt_min_eig: Optional[float]
    symmetric: Optional[bool]
    rccn_verdict: Optional[str]
    ppt_verdict: Optional[str]

    @classmethod
    def from_report(cls, family: str, params: dict, dim: int, report: CriterionReport) -> "ReportRow":
        return cls(
            family=family,
            params=format_params(params),
            dim=dim,
            realign_trace_norm=report.realignment_trace_norm,
            ccn=report.ccn,
            ppt_min_eig=report.ppt_min_eigenvalue,
            symmetric=report.is_symmetric,
            rccn_verdict=report.rccn_verdict.value,
            ppt_verdict=report.ppt_verdict.value,
        )


def format_params(params: dict) -> str:
    """'k=v;k=v' with 12 significant digits."""
    return ";".join(f"{key}={value:.12g}" for key, value in params.items())


def report_rows_from_sweep(result: SweepResult) -> list[ReportRow]:
    """One ReportRow per sweep row; failed rows keep empty scalar cells."""
    return [
        ReportRow(
            family=row.family,
            params=format_params(row.params),
            dim=row.dim,
            realign_trace_norm=row.realignment_trace_norm,
            ccn=row.ccn,
            ppt_min_eig=row.ppt_min_eigenvalue,
            symmetric=row.is_symmetric,
            rccn_verdict=row.rccn_verdict.value if row.rccn_verdict else "error",
            ppt_verdict=row.ppt_verdict.value if row.ppt_verdict else "error",
        )
        for row in result.rows
    ]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_report_csv(rows: Iterable[ReportRow]) -> str:
    """CSV text with REPORT_HEADER and 12-significant-digit floats."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(_cell(getattr(row, name)) for name in REPORT_HEADER)
    return buffer.getvalue()
