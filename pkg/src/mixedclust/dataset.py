"""Schema and dataset containers for mixed categorical/continuous data."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    pass


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class CategoricalAttr:
    name: str
    levels: tuple[str, ...]

    @property
    def m(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class Schema:
    """Attribute layout: ``p`` categorical attributes followed by ``q`` continuous ones.

    Declared levels, not observed ones, define the level counts ``m_j``.
    """

    cat_attrs: tuple[CategoricalAttr, ...] = ()
    cont_attrs: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cat_attrs", tuple(self.cat_attrs))
        object.__setattr__(self, "cont_attrs", tuple(self.cont_attrs))
        if self.p + self.q < 1:
            raise SchemaError("schema declares no attributes")
        names = [a.name for a in self.cat_attrs] + list(self.cont_attrs)
        seen = set()
        for name in names:
            if name in seen:
                raise SchemaError(f"duplicate attribute name {name!r}")
            seen.add(name)
        for attr in self.cat_attrs:
            if len(set(attr.levels)) != len(attr.levels):
                raise SchemaError(f"attribute {attr.name!r} repeats a level")
            if attr.m < 2:
                raise SchemaError(
                    f"categorical attribute {attr.name!r} needs at least 2 levels, got {attr.m}"
                )

    @property
    def p(self) -> int:
        return len(self.cat_attrs)

    @property
    def q(self) -> int:
        return len(self.cont_attrs)

    @property
    def levels(self) -> tuple[int, ...]:
        """Level counts ``m_j`` in attribute order."""
        return tuple(a.m for a in self.cat_attrs)

    @property
    def M(self) -> int:
        """Size of the categorical lattice (product of level counts)."""
        return math.prod(self.levels)

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.cat_attrs] + list(self.cont_attrs)

    def to_dict(self) -> dict:
        return {
            "categorical": [{"name": a.name, "levels": list(a.levels)} for a in self.cat_attrs],
            "continuous": list(self.cont_attrs),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_levels(cls, levels, q: int, cat_prefix="c", cont_prefix="z") -> "Schema":
        """Build a schema with generated names; level labels are ``"0".."m-1"``."""
        cats = tuple(
            CategoricalAttr(f"{cat_prefix}{j + 1}", tuple(str(v) for v in range(m)))
            for j, m in enumerate(levels)
        )
        conts = tuple(f"{cont_prefix}{k + 1}" for k in range(q))
        return cls(cats, conts)


def parse_schema(text: str) -> Schema:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed schema document: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("schema document must be a JSON object")
    unknown = set(doc) - {"categorical", "continuous"}
    if unknown:
        raise SchemaError(f"unknown schema keys: {sorted(unknown)}")
    cats_raw = doc.get("categorical", [])
    conts_raw = doc.get("continuous", [])
    if not isinstance(cats_raw, list) or not isinstance(conts_raw, list):
        raise SchemaError("'categorical' and 'continuous' must be lists")
    cats = []
    for entry in cats_raw:
        if not isinstance(entry, dict) or "name" not in entry or "levels" not in entry:
            raise SchemaError(f"malformed categorical entry: {entry!r}")
        name, levels = entry["name"], entry["levels"]
        if not isinstance(name, str) or not isinstance(levels, list):
            raise SchemaError(f"malformed categorical entry: {entry!r}")
        cats.append(CategoricalAttr(name, tuple(str(v) for v in levels)))
    for name in conts_raw:
        if not isinstance(name, str):
            raise SchemaError(f"continuous attribute names must be strings, got {name!r}")
    if not cats and not conts_raw:
        raise SchemaError("empty attribute list")
    return Schema(tuple(cats), tuple(conts_raw))


def read_schema(path) -> Schema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True, eq=False)
class MixedDataset:
    """``n`` rows of categorical level codes ``codes`` (n, p) and reals ``values`` (n, q).

    Arrays are stored read-only; row order is significant (ties break on it).
    """

    schema: Schema
    codes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64, copy=True)
        values = np.array(self.values, dtype=np.float64, copy=True)
        p, q = self.schema.p, self.schema.q
        if codes.size == 0:
            codes = codes.reshape(len(values) if values.ndim == 2 else 0, p)
        if values.size == 0:
            values = values.reshape(len(codes), q)
        if codes.ndim != 2 or codes.shape[1] != p:
            raise DataError(f"categorical block must have shape (n, {p}), got {codes.shape}")
        if values.ndim != 2 or values.shape[1] != q:
            raise DataError(f"continuous block must have shape (n, {q}), got {values.shape}")
        if codes.shape[0] != values.shape[0]:
            raise DataError("categorical and continuous blocks disagree on row count")
        if p:
            m = np.asarray(self.schema.levels)
            if ((codes < 0) | (codes >= m)).any():
                raise DataError("categorical code outside its declared level set")
        if not np.isfinite(values).all():
            raise DataError("continuous values must be finite (missing values unsupported)")
        codes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def __len__(self):
        return self.n

    def subset(self, rows) -> "MixedDataset":
        rows = np.asarray(rows, dtype=np.int64)
        return MixedDataset(self.schema, self.codes[rows], self.values[rows])

    def equals(self, other: "MixedDataset") -> bool:
        return (
            self.schema == other.schema
            and np.array_equal(self.codes, other.codes)
            and np.array_equal(self.values, other.values)
        )


def load_dataset(table: str, schema: Schema) -> MixedDataset:
    """Parse CSV text with a header row into a dataset.

    Columns may appear in any order but must be exactly the schema's attributes.
    """
    reader = csv.reader(io.StringIO(table))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("data file is empty (no header row)") from None
    header = [h.strip() for h in header]
    if sorted(header) != sorted(schema.names) or len(set(header)) != len(header):
        raise DataError(f"header {header} does not match schema attributes {schema.names}")
    col = {name: i for i, name in enumerate(header)}
    lookup = [{lv: k for k, lv in enumerate(a.levels)} for a in schema.cat_attrs]

    codes, values = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        crow = []
        for attr, table_ in zip(schema.cat_attrs, lookup):
            cell = row[col[attr.name]].strip()
            try:
                crow.append(table_[cell])
            except KeyError:
                raise DataError(
                    f"line {lineno}: unknown level {cell!r} for attribute {attr.name!r}"
                ) from None
        zrow = []
        for name in schema.cont_attrs:
            cell = row[col[name]].strip()
            if not cell:
                raise DataError(
                    f"line {lineno}: missing value in {name!r} (missing values unsupported)"
                )
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"line {lineno}: non-numeric value {cell!r} in {name!r}") from None
            if not math.isfinite(v):
                raise DataError(f"line {lineno}: non-finite value {cell!r} in {name!r}")
            zrow.append(v)
        codes.append(crow)
        values.append(zrow)
    if not codes:
        raise DataError("data file has no rows")
    return MixedDataset(
        schema,
        np.asarray(codes, dtype=np.int64).reshape(len(codes), schema.p),
        np.asarray(values, dtype=np.float64).reshape(len(values), schema.q),
    )


def read_dataset(path, schema: Schema) -> MixedDataset:
    return load_dataset(Path(path).read_text(encoding="utf-8"), schema)


def serialize(ds: MixedDataset) -> str:
    """CSV text that :func:`load_dataset` parses back to an identical dataset."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ds.schema.names)
    for i in range(ds.n):
        cats = [a.levels[c] for a, c in zip(ds.schema.cat_attrs, ds.codes[i])]
        writer.writerow(cats + [repr(float(v)) for v in ds.values[i]])
    return buf.getvalue()


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    level_usage: dict[str, dict[str, int]] = field(default_factory=dict)
    ranges: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(ds: MixedDataset) -> ValidationReport:
    """Check the dataset invariants and summarise attribute usage.

    Never raises; problems are listed in the report. Declared-but-unused
    levels only warn, since they inflate the lattice size without being wrong.
    """
    report = ValidationReport()
    schema = ds.schema
    codes = np.asarray(ds.codes)
    values = np.asarray(ds.values)
    n = codes.shape[0] if codes.ndim == 2 else 0
    if n == 0:
        report.violations.append("empty dataset (n = 0)")
    for j, attr in enumerate(schema.cat_attrs):
        col = codes[:, j] if n else np.empty(0, dtype=np.int64)
        bad = (col < 0) | (col >= attr.m)
        if bad.any():
            report.violations.append(
                f"{attr.name}: {int(bad.sum())} codes outside the declared level set"
            )
        counts = np.bincount(col[~bad], minlength=attr.m)
        report.level_usage[attr.name] = {lv: int(c) for lv, c in zip(attr.levels, counts)}
        used = int((counts > 0).sum())
        if n and used < attr.m:
            report.warnings.append(
                f"{attr.name}: only {used} of {attr.m} declared levels observed; "
                "unused levels inflate the lattice size"
            )
    for k, name in enumerate(schema.cont_attrs):
        col = values[:, k] if n else np.empty(0)
        finite = np.isfinite(col)
        if not finite.all():
            report.violations.append(f"{name}: {int((~finite).sum())} non-finite values")
        if finite.any():
            report.ranges[name] = (float(col[finite].min()), float(col[finite].max()))
            if report.ranges[name][0] == report.ranges[name][1]:
                report.warnings.append(f"{name}: constant column")
    return report
