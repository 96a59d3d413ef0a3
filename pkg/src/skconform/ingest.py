"""Text formats for stochastic traces and event logs.

Matrix files are comma-separated::

    # comment lines start with '#'
    activity,e1,e2
    a,0.7,0
    b,0.3,1

Log (and model) files list the alphabet, then one trace per line with an
optional ``xN`` frequency suffix::

    alphabet: a b c d
    trace: a b c d x20
    trace: b a c d x10
"""

from __future__ import annotations

import csv
import io
import re
import xml.etree.ElementTree as ET
from decimal import Decimal
from pathlib import Path
from typing import TextIO

import numpy as np

from .core import Alphabet, DeterministicTrace, EventLog, StochasticTrace, validate_stochastic_trace
from .errors import DimensionMismatch, ParseError, UnknownLabel, ValidationError, ZeroFrequency

_FREQ = re.compile(r"^x(\d+)$")


def _lines(source: str | TextIO) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source.read().splitlines()


def parse_matrix(source: str | TextIO, alphabet: Alphabet | None = None) -> StochasticTrace:
    """Parse matrix text (or an open text stream).

    Row labels define the alphabet unless ``alphabet`` is given, in which case
    rows are reordered to match it and every label must belong to it.
    """
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(_lines(source), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = next(csv.reader([line]))
        rows.append((lineno, [c.strip() for c in cells]))
    if not rows:
        raise ParseError("empty matrix document")

    header_line, header = rows[0]
    if header[0] != "activity":
        raise ParseError(f"first header cell must be 'activity', got {header[0]!r}", header_line, 1)
    m = len(header) - 1
    if m < 1:
        raise ParseError("header declares no events", header_line)
    if len(rows) == 1:
        raise ParseError("matrix has no activity rows", header_line)

    labels: list[str] = []
    values = np.empty((len(rows) - 1, m))
    for r, (lineno, cells) in enumerate(rows[1:]):
        if len(cells) != m + 1:
            raise ParseError(f"expected {m + 1} cells, found {len(cells)}", lineno)
        if not cells[0]:
            raise ParseError("missing activity label", lineno, 1)
        labels.append(cells[0])
        for c, text in enumerate(cells[1:]):
            try:
                values[r, c] = float(text)
            except ValueError:
                raise ParseError(f"not a number: {text!r}", lineno, c + 2) from None

    if len(set(labels)) != len(labels):
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        raise ParseError(f"duplicate activity rows: {dupes}")
    if alphabet is None:
        alphabet = Alphabet(labels)
    else:
        for label in labels:
            alphabet.index(label)
        missing = [x for x in alphabet.labels if x not in labels]
        if missing:
            raise DimensionMismatch(f"matrix lacks rows for activities {missing}")
        order = [labels.index(x) for x in alphabet.labels]
        values = values[order]
    return validate_stochastic_trace(values, alphabet)


def _round_column(col: np.ndarray, precision: int) -> list[Decimal]:
    """Round to ``precision`` decimals so the rounded column still sums to exactly 1.

    Largest-remainder rounding: every entry moves by less than ``10**-precision``.
    """
    scale = 10**precision
    scaled = col * scale
    units = np.floor(scaled).astype(np.int64)
    remainder = scale - int(units.sum())
    if remainder > 0:
        order = sorted(range(len(col)), key=lambda i: (-(scaled[i] - units[i]), i))
        for i in order[:remainder]:
            units[i] += 1
    quantum = Decimal(1).scaleb(-precision)
    return [(Decimal(int(u)) * quantum) for u in units]


def _format_decimal(d: Decimal) -> str:
    text = format(d.normalize(), "f")
    return "0" if text in ("-0", "0") else text


def write_matrix(sk: StochasticTrace, precision: int = 6) -> str:
    """Serialize a trace; each entry is within ``10**-precision`` of the original."""
    if not 1 <= precision <= 15:
        raise ValidationError(f"precision must be an integer in [1, 15], got {precision}")
    for label in sk.alphabet.labels:
        if not label or label != label.strip() or label.startswith("#"):
            raise ValidationError(f"label {label!r} cannot be written in the matrix format")
    columns = [_round_column(sk.matrix[:, j], precision) for j in range(sk.m)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["activity"] + [f"e{j + 1}" for j in range(sk.m)])
    for i, label in enumerate(sk.alphabet.labels):
        writer.writerow([label] + [_format_decimal(col[i]) for col in columns])
    return buf.getvalue()


def parse_log(source: str | TextIO) -> EventLog:
    """Parse a log document. Repeated traces are merged by adding frequencies."""
    alphabet: Alphabet | None = None
    entries: list[tuple[DeterministicTrace, int]] = []
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'alphabet:' or 'trace:', got {line!r}", lineno)
        key = key.strip()
        tokens = rest.split()
        if key == "alphabet":
            if alphabet is not None:
                raise ParseError("alphabet declared twice", lineno)
            if not tokens:
                raise ParseError("alphabet is empty", lineno)
            try:
                alphabet = Alphabet(tokens)
            except ValidationError as exc:
                raise ParseError(str(exc), lineno) from None
        elif key == "trace":
            if alphabet is None:
                raise ParseError("trace before alphabet declaration", lineno)
            freq = 1
            if tokens and (match := _FREQ.match(tokens[-1])):
                freq = int(match.group(1))
                tokens = tokens[:-1]
                if freq == 0:
                    raise ZeroFrequency(f"line {lineno}: frequency must be at least 1")
            for tok in tokens:
                if tok not in alphabet:
                    raise UnknownLabel(f"line {lineno}: label {tok!r} is not in the declared alphabet")
            entries.append((DeterministicTrace(alphabet, tokens), freq))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, 1)
    if alphabet is None:
        raise ParseError("missing alphabet declaration")
    return EventLog(alphabet, entries)


def write_log(log: EventLog) -> str:
    for label in log.alphabet.labels:
        if not label or any(ch.isspace() for ch in label) or _FREQ.match(label) or label.startswith("#"):
            raise ValidationError(f"label {label!r} cannot be written in the log format")
    lines = ["alphabet: " + " ".join(log.alphabet.labels)]
    for trace, freq in log.entries:
        body = " ".join(trace.activities)
        lines.append(f"trace: {body} x{freq}" if body else f"trace: x{freq}")
    return "\n".join(lines) + "\n"


def parse_xes(source: str | TextIO) -> EventLog:
    """Import a deterministic XES log, using ``concept:name`` as the activity.

    The alphabet lists activities in order of first appearance.
    """
    text = source if isinstance(source, str) else source.read()
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(f"malformed XML: {exc}", line, col + 1) from None

    def local(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    sequences: list[list[str]] = []
    for trace_el in root.iter():
        if local(trace_el.tag) != "trace":
            continue
        seq = []
        for event_el in trace_el:
            if local(event_el.tag) != "event":
                continue
            name = None
            for attr in event_el:
                if local(attr.tag) == "string" and attr.get("key") == "concept:name":
                    name = attr.get("value")
            if name is None:
                raise ParseError("event without concept:name")
            seq.append(name)
        sequences.append(seq)
    seen: dict[str, None] = {}
    for seq in sequences:
        for a in seq:
            seen.setdefault(a, None)
    if not seen:
        raise ParseError("XES document contains no events")
    alphabet = Alphabet(seen)
    return EventLog(alphabet, [(DeterministicTrace(alphabet, s), 1) for s in sequences])


def read_matrix(path: str | Path, alphabet: Alphabet | None = None) -> StochasticTrace:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh, alphabet)


def read_log(path: str | Path) -> EventLog:
    with open(path, encoding="utf-8") as fh:
        if str(path).endswith(".xes"):
            return parse_xes(fh)
        return parse_log(fh)


def parse_trace_text(text: str, alphabet: Alphabet) -> DeterministicTrace:
    """Parse whitespace- or comma-separated labels, optionally wrapped in ``<...>``."""
    body = text.strip()
    if body.startswith("<") and body.endswith(">"):
        body = body[1:-1]
    return DeterministicTrace(alphabet, [tok for tok in re.split(r"[\s,]+", body) if tok])


def format_trace(trace: DeterministicTrace) -> str:
    return " ".join(trace.activities)


__all__ = [
    "format_trace",
    "parse_log",
    "parse_matrix",
    "parse_trace_text",
    "parse_xes",
    "read_log",
    "read_matrix",
    "write_log",
    "write_matrix",
]
