"""Panel data representation: long-format ingestion, reverse coding and
complete-case crossing into person x item x occasion cubes."""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import DataError, DesignError, DuplicateRecordError, ConfigError

CSV_HEADER = ("group", "person", "occasion", "item", "response")
MISSING_TOKENS = {"", "na", "nan", "dk", "refused", "."}


@dataclass(frozen=True)
class LongRecord:
    group_label: str
    person_id: str
    occasion_index: int
    item_index: int
    response: float

    def __post_init__(self):
        if self.occasion_index < 1 or self.item_index < 1:
            raise DataError(
                f"occasion and item indices must be >= 1, got "
                f"occasion={self.occasion_index}, item={self.item_index}")
        if not math.isfinite(self.response):
            raise DataError(f"non-finite response for person {self.person_id!r}")


@dataclass(frozen=True)
class CodingConfig:
    reverse_coded_items: frozenset[int] = frozenset()
    scale_min: float = 1.0
    scale_max: float = 7.0

    def __post_init__(self):
        if not self.scale_min < self.scale_max:
            raise ConfigError(
                f"scale_min ({self.scale_min}) must be below scale_max ({self.scale_max})")
        object.__setattr__(self, "reverse_coded_items",
                           frozenset(int(i) for i in self.reverse_coded_items))

    def reverse(self, x):
        """Mirror a score inside the scale bounds. Applying it twice is a no-op."""
        return self.scale_min + self.scale_max - x

    def recode(self, item: int, x: float) -> float:
        return self.reverse(x) if item in self.reverse_coded_items else x

    def in_range(self, x: float) -> bool:
        return self.scale_min <= x <= self.scale_max

    def as_dict(self) -> dict:
        return {"reverse_coded_items": sorted(self.reverse_coded_items),
                "scale_min": self.scale_min, "scale_max": self.scale_max}


@dataclass(frozen=True, eq=False)
class ResponseCube:
    """Complete fully crossed score array, indexed ``scores[person, item, occasion]``."""

    group_label: str
    persons: tuple[str, ...]
    items: tuple[int, ...]
    occasions: tuple[int, ...]
    scores: np.ndarray

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        object.__setattr__(self, "persons", tuple(str(p) for p in self.persons))
        object.__setattr__(self, "items", tuple(int(i) for i in self.items))
        object.__setattr__(self, "occasions", tuple(int(o) for o in self.occasions))
        shape = (len(self.persons), len(self.items), len(self.occasions))
        if scores.shape != shape:
            raise DataError(f"scores shape {scores.shape} does not match labels {shape}")
        if not np.all(np.isfinite(scores)):
            raise DataError("cube must be complete: every (person, item, occasion) cell filled")
        for name, labels in (("person", self.persons), ("item", self.items),
                             ("occasion", self.occasions)):
            if len(set(labels)) != len(labels):
                raise DataError(f"duplicate {name} labels in cube")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.scores.shape

    @property
    def n_p(self) -> int:
        return self.scores.shape[0]

    @property
    def n_i(self) -> int:
        return self.scores.shape[1]

    @property
    def n_o(self) -> int:
        return self.scores.shape[2]

    def gstudy_problems(self) -> list[str]:
        """Reasons the cube cannot support a two-facet G-study (empty if usable)."""
        problems = []
        for facet, n in (("persons", self.n_p), ("items", self.n_i), ("occasions", self.n_o)):
            if n < 2:
                problems.append(f"need at least 2 {facet}, have {n}")
        return problems

    @property
    def usable_for_gstudy(self) -> bool:
        return not self.gstudy_problems()

    def occasion_slice(self, occasion: int) -> np.ndarray:
        """Persons x items matrix for one occasion label."""
        try:
            o = self.occasions.index(int(occasion))
        except ValueError:
            raise DesignError(f"occasion {occasion} not present in cube "
                              f"(have {list(self.occasions)})") from None
        return self.scores[:, :, o]

    def __eq__(self, other):
        if not isinstance(other, ResponseCube):
            return NotImplemented
        return (self.group_label == other.group_label and self.persons == other.persons
                and self.items == other.items and self.occasions == other.occasions
                and np.array_equal(self.scores, other.scores))

    __hash__ = None


@dataclass
class GroupIngest:
    persons_seen: int = 0
    persons_retained: int = 0
    persons_dropped: int = 0
    missing_cells: int = 0
    out_of_range: list[dict] = field(default_factory=list)
    usable: bool = True
    problems: list[str] = field(default_factory=list)


@dataclass
class IngestReport:
    groups: dict[str, GroupIngest] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {g: vars(r) for g, r in sorted(self.groups.items())}

    @property
    def unusable_groups(self) -> list[str]:
        return sorted(g for g, r in self.groups.items() if not r.usable)


def ingest(records: Iterable[LongRecord], coding: CodingConfig | None = None
           ) -> tuple[dict[str, ResponseCube], IngestReport]:
    """Build one complete-case cube per group.

    A person is retained only when every item x occasion cell observed anywhere
    in the group is present for them. Out-of-range responses (checked after
    reverse coding) are reported and treated as missing.
    """
    coding = coding or CodingConfig()
    cells: dict[str, dict[tuple[str, int, int], float]] = defaultdict(dict)
    report = IngestReport()
    n_records = 0
    for rec in records:
        n_records += 1
        group = cells[rec.group_label]
        rep = report.groups.setdefault(rec.group_label, GroupIngest())
        key = (rec.person_id, rec.occasion_index, rec.item_index)
        if key in group:
            raise DuplicateRecordError(
                f"duplicate record in group {rec.group_label!r}: person={key[0]!r}, "
                f"occasion={key[1]}, item={key[2]}", key=(rec.group_label, *key))
        x = coding.recode(rec.item_index, rec.response)
        if not coding.in_range(x):
            rep.out_of_range.append({"person": rec.person_id, "occasion": rec.occasion_index,
                                     "item": rec.item_index, "response": rec.response})
            group[key] = math.nan
            continue
        group[key] = x
    if n_records == 0:
        raise DataError("no records to ingest")

    cubes = {}
    for label, group in cells.items():
        rep = report.groups[label]
        persons = sorted({k[0] for k in group}, key=_natural_key)
        occasions = sorted({k[1] for k in group})
        items = sorted({k[2] for k in group})
        rep.persons_seen = len(persons)
        full = len(occasions) * len(items)
        kept = []
        for p in persons:
            present = sum(1 for o in occasions for i in items
                          if not math.isnan(group.get((p, o, i), math.nan)))
            if present == full:
                kept.append(p)
            else:
                rep.missing_cells += full - present
        rep.persons_retained = len(kept)
        rep.persons_dropped = len(persons) - len(kept)
        if not kept:
            rep.usable = False
            rep.problems.append("no complete-case persons")
            continue
        scores = np.array([[[group[(p, o, i)] for o in occasions] for i in items]
                           for p in kept])
        cube = ResponseCube(label, tuple(kept), tuple(items), tuple(occasions), scores)
        if not cube.usable_for_gstudy:
            rep.usable = False
            rep.problems.extend(cube.gstudy_problems())
        cubes[label] = cube
    return cubes, report


def _natural_key(s: str):
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


def parse_records(lines: Iterable[str], source: str = "<input>") -> Iterator[LongRecord]:
    """Parse CSV text in ``group,person,occasion,item,response`` layout.

    Lines starting with ``#`` are comments. Blank or "don't know"-style
    responses are skipped (missing); anything else that fails to parse raises a
    ``DataError`` carrying the line number.
    """
    # comments become empty lines so reader.line_num still matches the file
    reader = csv.reader("\n" if line.startswith("#") else line for line in lines)
    header = None
    for header in reader:
        if header:
            break
    if not header:
        raise DataError(f"{source}: empty file")
    if tuple(h.strip().lower() for h in header) != CSV_HEADER:
        raise DataError(f"{source}:{reader.line_num}: expected header "
                        f"{','.join(CSV_HEADER)!r}, got {','.join(header)!r}")
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 5:
            raise DataError(f"{source}:{lineno}: expected 5 fields, got {len(row)}")
        group, person, occ, item, resp = (c.strip() for c in row)
        if resp.lower() in MISSING_TOKENS:
            continue
        try:
            occ_i, item_i, value = int(occ), int(item), float(resp)
        except ValueError:
            raise DataError(f"{source}:{lineno}: could not parse row {row!r}") from None
        if not math.isfinite(value):
            continue
        try:
            yield LongRecord(group, person, occ_i, item_i, value)
        except DataError as exc:
            raise DataError(f"{source}:{lineno}: {exc}") from None


def read_csv(path, coding: CodingConfig | None = None
             ) -> tuple[dict[str, ResponseCube], IngestReport]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        return ingest(parse_records(fh, source=str(path)), coding)


def cube_records(cube: ResponseCube) -> Iterator[LongRecord]:
    for a, p in enumerate(cube.persons):
        for c, o in enumerate(cube.occasions):
            for b, i in enumerate(cube.items):
                yield LongRecord(cube.group_label, p, o, i, float(cube.scores[a, b, c]))


def to_csv_text(cubes: Iterable[ResponseCube]) -> str:
    """Serialize cubes to the long CSV format (full float precision)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for cube in cubes:
        for r in cube_records(cube):
            w.writerow([r.group_label, r.person_id, r.occasion_index, r.item_index,
                        repr(r.response)])
    return buf.getvalue()


def load_coding(path) -> CodingConfig:
    """Read a ``key = value`` coding file.

    Recognised keys: ``reverse_coded_items`` (comma separated item indices),
    ``scale_min`` and ``scale_max``. ``#`` starts a comment.
    """
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    unknown = set(values) - {"reverse_coded_items", "scale_min", "scale_max"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        rev = [int(v) for v in values.get("reverse_coded_items", "").split(",") if v.strip()]
        return CodingConfig(frozenset(rev), float(values.get("scale_min", 1.0)),
                            float(values.get("scale_max", 7.0)))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class Description:
    """Per (item, occasion) summaries; arrays are shaped ``(n_i, n_o)``."""

    items: tuple[int, ...]
    occasions: tuple[int, ...]
    n: int
    mean: np.ndarray
    sd: np.ndarray | None
    ci_half_width: np.ndarray | None

    def rows(self) -> list[dict]:
        out = []
        for b, i in enumerate(self.items):
            for c, o in enumerate(self.occasions):
                out.append({
                    "item": i, "occasion": o, "n": self.n,
                    "mean": float(self.mean[b, c]),
                    "sd": None if self.sd is None else float(self.sd[b, c]),
                    "ci95_half_width": (None if self.ci_half_width is None
                                        else float(self.ci_half_width[b, c])),
                })
        return out


def describe(cube: ResponseCube) -> Description:
    """Mean, sd (n-1 denominator) and 95% CI half-width 1.96*sd/sqrt(n)."""
    x = cube.scores
    mean = x.mean(axis=0)
    if cube.n_p < 2:
        return Description(cube.items, cube.occasions, cube.n_p, mean, None, None)
    sd = np.sqrt(((x - mean) ** 2).sum(axis=0) / (cube.n_p - 1))
    return Description(cube.items, cube.occasions, cube.n_p, mean, sd,
                       1.96 * sd / math.sqrt(cube.n_p))
