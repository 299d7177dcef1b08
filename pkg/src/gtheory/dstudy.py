"""Decision-study projections: reliability for hypothetical numbers of items
and occasions, computed from truncated variance components."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateMeasurementError, DesignError
from .gstudy import EFFECTS, LABELS, REPORT_ORDER, VarianceComponents


@dataclass(frozen=True)
class DStudyCell:
    n_occasions: int
    n_items: int
    attenuated: dict[str, float]
    g_coefficient: float
    dependability: float

    def as_dict(self) -> dict:
        return {"n_occasions": self.n_occasions, "n_items": self.n_items,
                "attenuated": dict(self.attenuated),
                "g_coefficient": self.g_coefficient, "dependability": self.dependability}


def _check_sizes(n_occasions, n_items):
    for name, n in (("n_occasions", n_occasions), ("n_items", n_items)):
        if int(n) != n or n < 1:
            raise DesignError(f"{name} must be a positive integer, got {n!r}")


def _components(vc) -> dict[str, float]:
    est = vc.estimate if isinstance(vc, VarianceComponents) else dict(vc)
    for e in EFFECTS:
        if est[e] < 0:
            raise DesignError(f"component {e} is negative ({est[e]}); "
                              "reliability projection assumes nonnegative variances")
    return est


def attenuate(vc, n_occasions: int, n_items: int) -> dict[str, float]:
    """Each component divided by the number of facet levels it is averaged over."""
    _check_sizes(n_occasions, n_items)
    s = _components(vc)
    no, ni = n_occasions, n_items
    return {
        "p": s["p"],
        "i": s["i"] / ni,
        "o": s["o"] / no,
        "pi": s["pi"] / ni,
        "po": s["po"] / no,
        "io": s["io"] / (ni * no),
        "pio": s["pio"] / (ni * no),
    }


def _ratio(p: float, err: float) -> float:
    if p + err <= 0:
        raise DegenerateMeasurementError(
            "person variance and error variance are both zero; reliability undefined")
    return p / (p + err)


def g_coefficient(vc, n_occasions: int, n_items: int) -> float:
    """Generalizability coefficient: person variance over person plus relative error.

    Only person-crossed terms (pi, po, pio) enter the error; the item, occasion
    and item x occasion main effects shift everyone equally and drop out.
    """
    a = attenuate(vc, n_occasions, n_items)
    return _ratio(a["p"], a["pi"] + a["po"] + a["pio"])


def dependability(vc, n_occasions: int, n_items: int) -> float:
    """Absolute-error companion (phi): every non-person component counts as error."""
    a = attenuate(vc, n_occasions, n_items)
    return _ratio(a["p"], sum(v for e, v in a.items() if e != "p"))


def cell(vc, n_occasions: int, n_items: int) -> DStudyCell:
    return DStudyCell(int(n_occasions), int(n_items), attenuate(vc, n_occasions, n_items),
                      g_coefficient(vc, n_occasions, n_items),
                      dependability(vc, n_occasions, n_items))


def dstudy_grid(vc, occasions: Sequence[int], items: Sequence[int],
                paired: bool = False) -> list[DStudyCell]:
    """Cells for the cross product of ``occasions`` and ``items`` (occasions vary slowest).

    With ``paired=True`` the two lists are zipped instead, which is how the
    published tables lay out their columns.
    """
    if not occasions or not items:
        raise DesignError("occasions and items lists must be nonempty")
    if paired:
        if len(occasions) != len(items):
            raise DesignError("paired grids need equally long occasions and items lists")
        pairs = list(zip(occasions, items))
    else:
        pairs = [(o, i) for o in occasions for i in items]
    return [cell(vc, o, i) for o, i in pairs]


GRID_COLUMNS = ("n_occasions", "n_items") + tuple(f"{e}_attenuated" for e in EFFECTS) + (
    "g_coefficient", "dependability")


def grid_rows(cells: Iterable[DStudyCell]) -> list[dict]:
    rows = []
    for c in cells:
        row = {"n_occasions": c.n_occasions, "n_items": c.n_items}
        row.update({f"{e}_attenuated": c.attenuated[e] for e in EFFECTS})
        row.update(g_coefficient=c.g_coefficient, dependability=c.dependability)
        rows.append(row)
    return rows


def grid_csv(cells: Iterable[DStudyCell]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=GRID_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in grid_rows(cells):
        w.writerow({k: (v if isinstance(v, int) else repr(float(v))) for k, v in row.items()})
    return buf.getvalue()


def format_table(vc: VarianceComponents, cells: Sequence[DStudyCell],
                 title: str | None = None) -> str:
    """Estimate, Std. Error and one attenuated column per cell, then reliability.

    The two header rows give occasions then items for each projected column;
    the first reliability value is the single-item, single-occasion coefficient.
    """
    est = vc.estimate
    w = 8
    lines = [title] if title else []
    lines.append(f"{'':<22}{'Estimate':>10}{'Std. Error':>12}"
                 + "".join(f"{c.n_occasions:>{w}d}" for c in cells) + "   <- occasions")
    lines.append(f"{'':<44}" + "".join(f"{c.n_items:>{w}d}" for c in cells) + "   <- items")
    for e in REPORT_ORDER:
        se = vc.std_error[e]
        se_txt = "" if se != se else f"{se:.3f}"
        lines.append(f"{LABELS[e]:<22}{est[e]:>10.3f}{se_txt:>12}"
                     + "".join(f"{c.attenuated[e]:>{w}.3f}" for c in cells))
    try:
        base = f"{g_coefficient(vc, 1, 1):>10.3f}"
    except DegenerateMeasurementError:
        base = f"{'--':>10}"
    lines.append(f"{'Reliability':<22}{base}{'':>12}"
                 + "".join(f"{c.g_coefficient:>{w}.3f}" for c in cells))
    lines.append(f"{'Dependability':<22}{'':>22}"
                 + "".join(f"{c.dependability:>{w}.3f}" for c in cells))
    if vc.n_p is not None:
        lines.append(f"{'N':<22}{vc.n_p:>10d}")
    return "\n".join(lines)
