"""Sampled phase-space fields and their CSV / JSON file formats."""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

REGISTERED_ROUTES = {
    "wigner_integral",
    "wigner_parity",
    "wigner_from_charfn",
    "kr_direct",
    "kr_from_charfn",
    "kr_vacuum_form",
    "kr_from_p",
    "q_function",
    "char_fn",
    "cohen_unity",
    "cohen_dirac_pair",
    "cohen_custom",
}


def _num(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise InvalidInputError(f"axis needs at least 2 points, got {self.count}")
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or not self.max > self.min:
            raise InvalidInputError(f"axis needs max > min, got [{self.min}, {self.max}]")

    @property
    def points(self):
        return np.linspace(self.min, self.max, self.count)

    @property
    def step(self):
        return (self.max - self.min) / (self.count - 1)

    @classmethod
    def parse(cls, text):
        lo, hi, n = text.split(",")
        return cls(float(lo), float(hi), int(n))


@dataclass(frozen=True)
class DistributionGrid:
    """Complex field on a (q, p) lattice; ``values[i, j]`` sits at (q_i, p_j)."""

    q_axis: Axis
    p_axis: Axis
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True)
        if v.shape != (self.q_axis.count, self.p_axis.count):
            raise InvalidInputError(
                f"values shape {v.shape} does not match axes "
                f"({self.q_axis.count}, {self.p_axis.count})"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("grid values must be finite")
        route = self.metadata.get("route")
        if route is not None and route not in REGISTERED_ROUTES:
            raise InvalidInputError(f"unregistered route {route!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def cell_area(self):
        return self.q_axis.step * self.p_axis.step

    def total(self):
        return complex(self.values.sum() * self.cell_area)

    def q_marginal(self):
        """Sum over p times dp, one value per q."""
        return self.values.sum(axis=1) * self.p_axis.step

    def p_marginal(self):
        return self.values.sum(axis=0) * self.q_axis.step

    def nearest(self, q, p):
        i = int(np.argmin(np.abs(self.q_axis.points - q)))
        j = int(np.argmin(np.abs(self.p_axis.points - p)))
        return complex(self.values[i, j])

    # -- serialisation ------------------------------------------------------

    def to_csv(self):
        qs, ps = self.q_axis.points, self.p_axis.points
        lines = ["q,p,re,im"]
        for i, q in enumerate(qs):
            for j, p in enumerate(ps):
                z = self.values[i, j]
                lines.append(f"{_num(q)},{_num(p)},{_num(z.real)},{_num(z.imag)}")
        return "\n".join(lines) + "\n"

    def to_json(self, timestamp=True):
        meta = dict(self.metadata)
        if not timestamp:
            meta.pop("timestamp", None)
        rows = []
        for row in self.values:
            rows.append("[" + ",".join(f"[{_num(z.real)},{_num(z.imag)}]" for z in row) + "]")
        axis = lambda a: '{"min": %s, "max": %s, "count": %d}' % (_num(a.min), _num(a.max), a.count)
        return (
            '{"metadata": %s, "q": %s, "p": %s, "values": [%s]}\n'
            % (json.dumps(meta, sort_keys=True), axis(self.q_axis), axis(self.p_axis), ",".join(rows))
        )

    def write(self, path, fmt="csv", timestamp=True):
        text = self.to_csv() if fmt == "csv" else self.to_json(timestamp=timestamp)
        with open(path, "w", newline="") as fh:
            fh.write(text)


def read_csv(text, metadata=None):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if [h.strip() for h in header] != ["q", "p", "re", "im"]:
        raise InvalidInputError(f"unexpected CSV header {header}")
    rows = [tuple(float(x) for x in r) for r in reader if r]
    qs = sorted({r[0] for r in rows})
    ps = sorted({r[1] for r in rows})
    if len(rows) != len(qs) * len(ps):
        raise InvalidInputError("CSV rows do not form a full lattice")
    values = np.array([complex(r[2], r[3]) for r in rows]).reshape(len(qs), len(ps))
    return DistributionGrid(
        Axis(qs[0], qs[-1], len(qs)), Axis(ps[0], ps[-1], len(ps)), values, dict(metadata or {})
    )


def read_json(text):
    data = json.loads(text)
    q = Axis(float(data["q"]["min"]), float(data["q"]["max"]), int(data["q"]["count"]))
    p = Axis(float(data["p"]["min"]), float(data["p"]["max"]), int(data["p"]["count"]))
    v = np.array(data["values"], dtype=float)
    return DistributionGrid(q, p, v[..., 0] + 1j * v[..., 1], data["metadata"])


def read_grid(path):
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return read_json(text)
    return read_csv(text)
