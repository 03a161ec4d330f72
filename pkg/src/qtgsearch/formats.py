"""Instance file parsing and serialization.

Three formats are supported:

* canonical JSON, the round-trippable native format (schema shipped in
  ``schema/knapsack_instance.schema.json``),
* ORLIB-style MDKP text: ``n d [optimum]`` then n profits, d rows of n
  weights, d capacities, all whitespace separated. Container files holding
  several problems (leading problem count) are addressed with ``index``,
* QKP text in the style of published benchmark libraries: a name line, n,
  capacity, weights, linear profits, then the strict upper triangle of the
  quadratic matrix row by row. Published dialects disagree on field order
  and on whether the matrix is triangular or full, so the exact layout is a
  small descriptor that callers can override.

Parse errors carry 1-based line numbers for the text formats.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Sequence

from .instances import KnapsackInstance, ProblemKind, ValidationError


class ParseError(ValueError):
    """Input file does not match the expected layout."""


# ---------------------------------------------------------------------------
# tokenizer for the whitespace-separated text formats


class _Tokens:
    """Whitespace token stream that remembers the line of every token."""

    def __init__(self, text: str):
        self.items: list[tuple[str, int]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            for tok in line.split():
                self.items.append((tok, lineno))
        self.pos = 0

    def remaining(self) -> int:
        return len(self.items) - self.pos

    def next_int(self, what: str) -> tuple[int, int]:
        if self.pos >= len(self.items):
            last = self.items[-1][1] if self.items else 1
            raise ParseError(f"line {last}: unexpected end of file while reading {what}")
        tok, lineno = self.items[self.pos]
        self.pos += 1
        try:
            return int(tok), lineno
        except ValueError:
            raise ParseError(f"line {lineno}: expected an integer for {what}, got {tok!r}") from None

    def next_ints(self, count: int, what: str) -> list[int]:
        return [self.next_int(f"{what}[{k}]")[0] for k in range(count)]


def _wrap_validation(err: ValidationError, context: str) -> ParseError:
    return ParseError(f"{context}: {err}")


def _require_normalized(instance: KnapsackInstance, context: str) -> KnapsackInstance:
    violations = instance.normalization_violations()
    if violations:
        raise ParseError(f"{context}: " + "; ".join(violations))
    return instance


# ---------------------------------------------------------------------------
# canonical JSON


def instance_to_dict(instance: KnapsackInstance) -> dict:
    out = {
        "name": instance.name,
        "kind": instance.kind.value,
        "n": instance.n,
        "d": instance.d,
        "capacities": list(instance.capacities),
        "weights": [list(row) for row in instance.weights],
        "profits": [list(row) for row in instance.profits]
        if instance.kind is ProblemKind.QKP
        else list(instance.profits),
    }
    if instance.known_optimum is not None:
        out["known_optimum"] = instance.known_optimum
    return out


def serialize_instance(instance: KnapsackInstance) -> str:
    """Canonical JSON text for an instance, stable across runs."""
    return json.dumps(instance_to_dict(instance), indent=2, sort_keys=True) + "\n"


def instance_from_dict(data: dict, context: str = "instance") -> KnapsackInstance:
    if not isinstance(data, dict):
        raise ParseError(f"{context}: expected a JSON object, got {type(data).__name__}")
    missing = [k for k in ("name", "kind", "n", "d", "capacities", "weights", "profits") if k not in data]
    if missing:
        raise ParseError(f"{context}: missing required fields: {', '.join(missing)}")
    kind_raw = data["kind"]
    try:
        kind = ProblemKind(kind_raw)
    except ValueError:
        raise ParseError(
            f"{context}: kind must be 'qkp' or 'mdkp', got {kind_raw!r}"
        ) from None
    try:
        if kind is ProblemKind.QKP:
            if data["d"] != 1:
                raise ParseError(f"{context}: QKP requires d == 1, got {data['d']}")
            instance = KnapsackInstance.qkp(
                name=str(data["name"]),
                weights=data["weights"][0],
                capacity=data["capacities"][0],
                profit_matrix=data["profits"],
                known_optimum=data.get("known_optimum"),
            )
        else:
            instance = KnapsackInstance.mdkp(
                name=str(data["name"]),
                weights=data["weights"],
                capacities=data["capacities"],
                profits=data["profits"],
                known_optimum=data.get("known_optimum"),
            )
    except ValidationError as err:
        raise _wrap_validation(err, context) from err
    except (TypeError, IndexError) as err:
        raise ParseError(f"{context}: malformed field ({err})") from err
    if instance.n != data["n"] or instance.d != data["d"]:
        raise ParseError(
            f"{context}: declared n={data['n']} d={data['d']} disagree with "
            f"array shapes n={instance.n} d={instance.d}"
        )
    return _require_normalized(instance, context)


def parse_json_instance(text: str, context: str = "instance") -> KnapsackInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{context}: line {err.lineno}: invalid JSON ({err.msg})") from err
    return instance_from_dict(data, context)


# ---------------------------------------------------------------------------
# ORLIB-style MDKP text


def _parse_orlib_problem(toks: _Tokens, name: str, optimum_required: bool) -> KnapsackInstance:
    n, _ = toks.next_int("item count n")
    d, header_line = toks.next_int("dimension count d")
    if n < 1 or d < 1:
        raise ParseError(f"line {header_line}: need n >= 1 and d >= 1, got n={n} d={d}")
    body = n + d * n + d
    if optimum_required:
        has_optimum = True
    elif toks.remaining() == body + 1:
        has_optimum = True
    elif toks.remaining() == body:
        has_optimum = False
    else:
        raise ParseError(
            f"line {header_line}: expected {body} or {body + 1} values after the "
            f"'n d' header, found {toks.remaining()}"
        )
    optimum = None
    if has_optimum:
        value, _ = toks.next_int("known optimum")
        # 0 is the conventional unknown-optimum sentinel
        optimum = value if value > 0 else None
    profits = toks.next_ints(n, "profit")
    weights = [toks.next_ints(n, f"weights[dim {i}]") for i in range(d)]
    capacities = toks.next_ints(d, "capacity")
    try:
        instance = KnapsackInstance.mdkp(
            name=name,
            weights=weights,
            capacities=capacities,
            profits=profits,
            known_optimum=optimum,
        )
    except ValidationError as err:
        raise _wrap_validation(err, name) from err
    return _require_normalized(instance, name)


def parse_orlib_text(text: str, name: str, index: int | None = None) -> KnapsackInstance:
    """Parse MDKP text; index selects a problem from a multi-problem container.

    A container starts with the number of problems on its own; each problem
    then reads ``n d optimum`` followed by profits, weights, capacities.
    With index=None the text must hold a single problem whose optimum token
    is optional (detected from the value count).
    """
    toks = _Tokens(text)
    if index is None:
        instance = _parse_orlib_problem(toks, name, optimum_required=False)
        if toks.remaining():
            tok, lineno = toks.items[toks.pos]
            raise ParseError(
                f"line {lineno}: {toks.remaining()} unread values starting at {tok!r}; "
                "for container files pass an index"
            )
        return instance
    count, lineno = toks.next_int("problem count")
    if count < 1:
        raise ParseError(f"line {lineno}: container declares {count} problems")
    if not 0 <= index < count:
        raise ParseError(f"index {index} out of range for container with {count} problems")
    for k in range(index + 1):
        problem_name = f"{name}#{k}"
        instance = _parse_orlib_problem(toks, problem_name, optimum_required=True)
        if k == index:
            return instance
    raise AssertionError("unreachable")


def count_orlib_problems(text: str) -> int:
    """Number of problems in a container file (1 for a bare single problem)."""
    toks = _Tokens(text)
    first, _ = toks.next_int("first value")
    # A container's first token is the problem count; a bare problem starts
    # with 'n d ...'. Distinguish by trying the single-problem layout first.
    try:
        parse_orlib_text(text, name="probe", index=None)
        return 1
    except ParseError:
        return max(first, 0)


# ---------------------------------------------------------------------------
# QKP text dialects


@dataclass(frozen=True)
class QkpTextDialect:
    """Field layout descriptor for QKP text files.

    sections lists the blocks in file order. Recognized names: ``name``
    (one raw line), ``n``, ``capacity``, ``weights``, ``linear``
    (diagonal profits), ``quadratic`` (strict upper triangle, n-1 rows) and
    ``matrix`` (full n x n profit matrix replacing linear+quadratic).
    """

    sections: tuple[str, ...] = ("name", "n", "capacity", "weights", "linear", "quadratic")

    def __post_init__(self):
        known = {"name", "n", "capacity", "weights", "linear", "quadratic", "matrix"}
        bad = [s for s in self.sections if s not in known]
        if bad:
            raise ValidationError(f"unknown QKP dialect sections: {bad}")
        if "n" not in self.sections or "capacity" not in self.sections or "weights" not in self.sections:
            raise ValidationError("QKP dialect needs n, capacity and weights sections")
        has_tri = "linear" in self.sections and "quadratic" in self.sections
        has_full = "matrix" in self.sections
        if has_tri == has_full:
            raise ValidationError(
                "QKP dialect needs either linear+quadratic sections or a matrix section"
            )


DEFAULT_QKP_DIALECT = QkpTextDialect()
FULL_MATRIX_QKP_DIALECT = QkpTextDialect(
    sections=("name", "n", "capacity", "weights", "matrix")
)


def parse_qkp_text(
    text: str,
    name: str | None = None,
    dialect: QkpTextDialect = DEFAULT_QKP_DIALECT,
) -> KnapsackInstance:
    lines = text.splitlines()
    body_start = 0
    file_name = name
    if dialect.sections and dialect.sections[0] == "name":
        for lineno, line in enumerate(lines):
            if line.strip():
                if file_name is None:
                    file_name = line.strip()
                body_start = lineno + 1
                break
        else:
            raise ParseError("line 1: empty file, expected a name line")
    toks = _Tokens("\n".join(lines[body_start:]))
    # token lines are relative to the body; shift to absolute file lines
    toks.items = [(tok, lineno + body_start) for tok, lineno in toks.items]

    n = None
    capacity = None
    weights = None
    linear = None
    upper = None
    matrix = None
    for section in dialect.sections:
        if section == "name":
            continue
        if section == "n":
            n, lineno = toks.next_int("item count n")
            if n < 1:
                raise ParseError(f"line {lineno}: need n >= 1, got {n}")
        elif n is None:
            raise ValidationError(f"QKP dialect places {section!r} before n")
        elif section == "capacity":
            capacity, _ = toks.next_int("capacity")
        elif section == "weights":
            weights = toks.next_ints(n, "weight")
        elif section == "linear":
            linear = toks.next_ints(n, "linear profit")
        elif section == "quadratic":
            upper = [toks.next_ints(n - m - 1, f"quadratic row {m}") for m in range(n - 1)]
        elif section == "matrix":
            matrix = [toks.next_ints(n, f"matrix row {m}") for m in range(n)]
    if toks.remaining():
        tok, lineno = toks.items[toks.pos]
        raise ParseError(f"line {lineno}: {toks.remaining()} unread values starting at {tok!r}")

    if matrix is not None:
        for m in range(n):
            for mp in range(m + 1, n):
                if matrix[m][mp] != matrix[mp][m]:
                    raise ParseError(
                        f"{file_name or 'instance'}: profit matrix must be symmetric: "
                        f"p[{m}][{mp}]={matrix[m][mp]} != p[{mp}][{m}]={matrix[mp][m]}"
                    )
        profit_matrix = matrix
    else:
        profit_matrix = [[0] * n for _ in range(n)]
        for m in range(n):
            profit_matrix[m][m] = linear[m]
        for m in range(n - 1):
            for k, value in enumerate(upper[m]):
                mp = m + 1 + k
                profit_matrix[m][mp] = value
                profit_matrix[mp][m] = value
    try:
        instance = KnapsackInstance.qkp(
            name=file_name or "qkp",
            weights=weights,
            capacity=capacity,
            profit_matrix=profit_matrix,
        )
    except ValidationError as err:
        raise _wrap_validation(err, file_name or "qkp") from err
    return _require_normalized(instance, file_name or "qkp")


def write_qkp_text(instance: KnapsackInstance, dialect: QkpTextDialect = DEFAULT_QKP_DIALECT) -> str:
    if instance.kind is not ProblemKind.QKP:
        raise ValidationError("QKP text format only holds QKP instances")
    chunks: list[str] = []
    for section in dialect.sections:
        if section == "name":
            chunks.append(instance.name)
        elif section == "n":
            chunks.append(str(instance.n))
        elif section == "capacity":
            chunks.append(str(instance.capacities[0]))
        elif section == "weights":
            chunks.append(" ".join(str(w) for w in instance.weights[0]))
        elif section == "linear":
            chunks.append(" ".join(str(instance.profits[m][m]) for m in range(instance.n)))
        elif section == "quadratic":
            for m in range(instance.n - 1):
                chunks.append(
                    " ".join(str(instance.profits[m][mp]) for mp in range(m + 1, instance.n))
                )
        elif section == "matrix":
            for row in instance.profits:
                chunks.append(" ".join(str(p) for p in row))
    return "\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# entry points


FORMAT_NAMES = ("json", "orlib", "qkplib")


def parse_instance(
    path: str | os.PathLike,
    format: str = "json",
    index: int | None = None,
    dialect: QkpTextDialect = DEFAULT_QKP_DIALECT,
) -> KnapsackInstance:
    """Read one instance from a file in the named format."""
    path = os.fspath(path)
    stem = os.path.splitext(os.path.basename(path))[0]
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        if format == "json":
            return parse_json_instance(text, context=stem)
        if format == "orlib":
            return parse_orlib_text(text, name=stem, index=index)
        if format == "qkplib":
            return parse_qkp_text(text, name=None if "name" in dialect.sections else stem,
                                  dialect=dialect)
    except ParseError as err:
        raise ParseError(f"{path}: {err}") from None
    raise ValidationError(f"unknown format {format!r}, expected one of {FORMAT_NAMES}")


def write_instance(instance: KnapsackInstance, path: str | os.PathLike) -> None:
    """Write canonical JSON."""
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(instance))
