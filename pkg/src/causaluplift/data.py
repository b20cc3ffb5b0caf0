"""Columnar dataset container with typed columns and treatment/outcome roles.

Columns are binary (0/1 int codes), categorical (int codes plus a label
vocabulary) or continuous (float64). On-disk format is an RFC-style CSV with
a mandatory header plus a JSON schema sidecar carrying column kinds, roles
and category vocabularies. Lines starting with ``#`` before the header are
treated as comments (the CLI uses one to stamp tool version and config hash).
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyColumn,
    LengthMismatch,
    MissingValues,
    NonBinary,
    UnknownColumn,
)

KINDS = ("binary", "categorical", "continuous")
ROLES = ("treatment", "outcome", "covariate", "noise")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    role: str = "covariate"
    categories: tuple = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"bad column kind {self.kind!r}")
        if self.role not in ROLES:
            raise ValueError(f"bad column role {self.role!r}")
        if self.categories is not None:
            object.__setattr__(self, "categories", tuple(self.categories))


class Dataset:
    """Immutable-by-convention table; arrays are not copied on access."""

    def __init__(self, specs, arrays):
        self._specs = {}
        self._values = {}
        n = None
        for spec in specs:
            if spec.name in self._specs:
                raise ValueError(f"duplicate column {spec.name!r}")
            values = np.asarray(arrays[spec.name])
            if spec.kind == "continuous":
                values = values.astype(np.float64)
            else:
                values = values.astype(np.int64)
                if values.size and values.min() < 0:
                    raise MissingValues(spec.name)
                if spec.kind == "binary" and values.size and values.max() > 1:
                    raise NonBinary(spec.name)
            if n is None:
                n = values.shape[0]
            elif values.shape[0] != n:
                raise LengthMismatch(
                    f"column {spec.name!r} has {values.shape[0]} rows, expected {n}"
                )
            self._specs[spec.name] = spec
            self._values[spec.name] = values
        self.n_rows = 0 if n is None else int(n)

    @property
    def columns(self):
        return list(self._specs)

    def __contains__(self, name):
        return name in self._specs

    def spec(self, name):
        if name not in self._specs:
            raise UnknownColumn(name)
        return self._specs[name]

    def values(self, name):
        if name not in self._values:
            raise UnknownColumn(name)
        return self._values[name]

    def arity(self, name):
        spec = self.spec(name)
        if spec.kind == "continuous":
            raise ValueError(f"column {name!r} is continuous; it has no arity")
        if spec.kind == "binary":
            return 2
        if spec.categories is not None:
            return len(spec.categories)
        values = self._values[name]
        return int(values.max()) + 1 if values.size else 0

    def role_of(self, role):
        """Names of columns carrying ``role``, in declaration order."""
        return [n for n, s in self._specs.items() if s.role == role]

    def select(self, names):
        return Dataset([self.spec(n) for n in names], self._values)

    def take(self, row_idx):
        row_idx = np.asarray(row_idx)
        return Dataset(
            list(self._specs.values()),
            {n: v[row_idx] for n, v in self._values.items()},
        )

    def replace(self, spec, values):
        """New dataset with one column's spec/values swapped in place."""
        specs = [spec if s.name == spec.name else s for s in self._specs.values()]
        arrays = dict(self._values)
        arrays[spec.name] = values
        return Dataset(specs, arrays)

    # ------------------------------------------------------------- schema io

    def schema_dict(self):
        cols = []
        for spec in self._specs.values():
            entry = {"name": spec.name, "kind": spec.kind, "role": spec.role}
            if spec.categories is not None:
                entry["categories"] = list(spec.categories)
            cols.append(entry)
        return {"format": "causaluplift-schema", "version": 1, "columns": cols}

    # ---------------------------------------------------------------- csv io

    def write_csv(self, path, meta=None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if meta:
                fh.write(f"# {meta}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            cells = []
            for name in self.columns:
                spec = self._specs[name]
                values = self._values[name]
                if spec.kind == "continuous":
                    cells.append([repr(float(v)) for v in values])
                elif spec.kind == "categorical" and spec.categories is not None:
                    cats = spec.categories
                    cells.append([cats[v] for v in values])
                else:
                    cells.append([str(int(v)) for v in values])
            for row in zip(*cells):
                writer.writerow(row)

    @classmethod
    def read_csv(cls, path, schema):
        """Load a CSV against a schema dict (or path to a schema JSON)."""
        if isinstance(schema, (str,)) or hasattr(schema, "read_text"):
            with open(schema, "r", encoding="utf-8") as fh:
                schema = json.load(fh)
        by_name = {c["name"]: c for c in schema["columns"]}

        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        reader = csv.reader(io.StringIO("\n".join(lines)))
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyColumn("CSV has no header row") from None
        unknown = [h for h in header if h not in by_name]
        if unknown:
            raise UnknownColumn(unknown[0])

        raw = {h: [] for h in header}
        for row in reader:
            if len(row) != len(header):
                raise LengthMismatch(f"row with {len(row)} cells, expected {len(header)}")
            for h, cell in zip(header, row):
                raw[h].append(cell)

        specs = []
        arrays = {}
        for h in header:
            entry = by_name[h]
            kind = entry["kind"]
            role = entry.get("role", "covariate")
            cells = raw[h]
            if any(c == "" for c in cells):
                raise MissingValues(h)
            if kind == "continuous":
                arrays[h] = np.array([float(c) for c in cells], dtype=np.float64)
                specs.append(ColumnSpec(h, kind, role))
            elif kind == "binary":
                values = []
                for c in cells:
                    if c not in ("0", "1"):
                        raise NonBinary(h)
                    values.append(int(c))
                arrays[h] = np.array(values, dtype=np.int64)
                specs.append(ColumnSpec(h, kind, role))
            else:
                cats = entry.get("categories")
                if cats is None:
                    cats = sorted(set(cells))
                index = {c: i for i, c in enumerate(cats)}
                try:
                    arrays[h] = np.array([index[c] for c in cells], dtype=np.int64)
                except KeyError as exc:
                    raise UnknownColumn(
                        f"value {exc.args[0]!r} not in categories of {h!r}"
                    ) from None
                specs.append(ColumnSpec(h, kind, role, tuple(cats)))
        return cls(specs, arrays)


def write_schema(path, dataset, extra=None):
    payload = dataset.schema_dict()
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
