"""Variance components of the random p x i x o design by ANOVA
(expected-mean-square) estimation."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import ResponseCube
from .errors import DesignError

EFFECTS = ("p", "i", "o", "pi", "po", "io", "pio")
LABELS = {
    "p": "Person",
    "o": "Occasion",
    "i": "Item",
    "po": "Person Occasion",
    "pi": "Person Item",
    "io": "Occasion Item",
    "pio": "Person Occasion Item",
}
# Row order used in printed reports.
REPORT_ORDER = ("p", "o", "i", "po", "pi", "io", "pio")


def ems_matrix(n_p: int, n_i: int, n_o: int) -> np.ndarray:
    """Coefficients of E[MS_q] in terms of the seven components (rows/cols in EFFECTS order)."""
    #              p            i            o            pi   po   io   pio
    return np.array([
        [n_i * n_o,   0,           0,           n_o, n_i, 0,   1],   # MS_p
        [0,           n_p * n_o,   0,           n_o, 0,   n_p, 1],   # MS_i
        [0,           0,           n_p * n_i,   0,   n_i, n_p, 1],   # MS_o
        [0,           0,           0,           n_o, 0,   0,   1],   # MS_pi
        [0,           0,           0,           0,   n_i, 0,   1],   # MS_po
        [0,           0,           0,           0,   0,   n_p, 1],   # MS_io
        [0,           0,           0,           0,   0,   0,   1],   # MS_pio
    ], dtype=float)


def estimator_matrix(n_p: int, n_i: int, n_o: int) -> np.ndarray:
    """Row q gives the mean-square weights c of the estimator for component q."""
    a, b, c = n_p, n_i, n_o
    return np.array([
        [1 / (b * c), 0, 0, -1 / (b * c), -1 / (b * c), 0, 1 / (b * c)],
        [0, 1 / (a * c), 0, -1 / (a * c), 0, -1 / (a * c), 1 / (a * c)],
        [0, 0, 1 / (a * b), 0, -1 / (a * b), -1 / (a * b), 1 / (a * b)],
        [0, 0, 0, 1 / c, 0, 0, -1 / c],
        [0, 0, 0, 0, 1 / b, 0, -1 / b],
        [0, 0, 0, 0, 0, 1 / a, -1 / a],
        [0, 0, 0, 0, 0, 0, 1],
    ])


@dataclass(frozen=True)
class MeanSquaresTable:
    n_p: int
    n_i: int
    n_o: int
    grand_mean: float
    ss: dict[str, float]
    df: dict[str, int]
    total_ss: float

    @property
    def ms(self) -> dict[str, float]:
        return {e: self.ss[e] / self.df[e] for e in EFFECTS}

    def vector(self) -> np.ndarray:
        ms = self.ms
        return np.array([ms[e] for e in EFFECTS])

    def as_dict(self) -> dict:
        ms = self.ms
        return {
            "n_p": self.n_p, "n_i": self.n_i, "n_o": self.n_o,
            "grand_mean": self.grand_mean, "total_ss": self.total_ss,
            "effects": {e: {"ss": self.ss[e], "df": self.df[e], "ms": ms[e]} for e in EFFECTS},
        }


def degrees_of_freedom(n_p: int, n_i: int, n_o: int) -> dict[str, int]:
    a, b, c = n_p - 1, n_i - 1, n_o - 1
    return {"p": a, "i": b, "o": c, "pi": a * b, "po": a * c, "io": b * c, "pio": a * b * c}


def mean_squares(cube: ResponseCube | np.ndarray) -> MeanSquaresTable:
    """Sums of squares from marginal means (two-pass, deviations from means)."""
    x = np.asarray(cube.scores if isinstance(cube, ResponseCube) else cube, dtype=float)
    if x.ndim != 3:
        raise DesignError(f"expected a 3-d person x item x occasion array, got {x.ndim}-d")
    n_p, n_i, n_o = x.shape
    for facet, n in (("persons", n_p), ("items", n_i), ("occasions", n_o)):
        if n < 2:
            raise DesignError(f"G-study needs at least 2 {facet}, have {n}")

    m = x.mean()
    m_p = x.mean(axis=(1, 2))
    m_i = x.mean(axis=(0, 2))
    m_o = x.mean(axis=(0, 1))
    m_pi = x.mean(axis=2)
    m_po = x.mean(axis=1)
    m_io = x.mean(axis=0)

    ss = {
        "p": n_i * n_o * np.sum((m_p - m) ** 2),
        "i": n_p * n_o * np.sum((m_i - m) ** 2),
        "o": n_p * n_i * np.sum((m_o - m) ** 2),
        "pi": n_o * np.sum((m_pi - m_p[:, None] - m_i[None, :] + m) ** 2),
        "po": n_i * np.sum((m_po - m_p[:, None] - m_o[None, :] + m) ** 2),
        "io": n_p * np.sum((m_io - m_i[:, None] - m_o[None, :] + m) ** 2),
    }
    total = float(np.sum((x - m) ** 2))
    # Residual taken as the remainder; clip the rounding-level negatives of exact fits.
    ss["pio"] = max(total - sum(ss.values()), 0.0)
    ss = {e: float(ss[e]) for e in EFFECTS}
    return MeanSquaresTable(n_p, n_i, n_o, float(m), ss,
                            degrees_of_freedom(n_p, n_i, n_o), total)


@dataclass(frozen=True)
class VarianceComponents:
    """Seven components with raw (possibly negative) and truncated estimates."""

    raw: dict[str, float]
    std_error: dict[str, float]
    n_p: int | None = None
    n_i: int | None = None
    n_o: int | None = None

    @property
    def estimate(self) -> dict[str, float]:
        return {e: max(self.raw[e], 0.0) for e in EFFECTS}

    def __getitem__(self, effect: str) -> float:
        return self.estimate[effect]

    @classmethod
    def from_values(cls, values: dict[str, float], std_error: dict[str, float] | None = None,
                    n_p=None, n_i=None, n_o=None) -> "VarianceComponents":
        missing = set(EFFECTS) - set(values)
        if missing:
            raise ValueError(f"missing components: {sorted(missing)}")
        se = std_error or {e: float("nan") for e in EFFECTS}
        return cls({e: float(values[e]) for e in EFFECTS},
                   {e: float(se[e]) for e in EFFECTS}, n_p, n_i, n_o)

    def total(self) -> float:
        return sum(self.estimate.values())

    def as_dict(self) -> dict:
        est = self.estimate
        return {
            "n_p": self.n_p, "n_i": self.n_i, "n_o": self.n_o,
            "components": {e: {"label": LABELS[e], "raw_estimate": self.raw[e],
                               "estimate": est[e], "std_error": self.std_error[e]}
                           for e in EFFECTS},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "VarianceComponents":
        comps = d["components"]
        raw = {e: float(comps[e].get("raw_estimate", comps[e]["estimate"])) for e in EFFECTS}
        se = {e: float(comps[e].get("std_error") if comps[e].get("std_error") is not None
                       else "nan") for e in EFFECTS}
        return cls(raw, se, d.get("n_p"), d.get("n_i"), d.get("n_o"))


def estimate_components(ms: MeanSquaresTable) -> VarianceComponents:
    """Invert the expected mean squares of the random crossed design.

    Standard errors use the normal-theory approximation
    ``Var = 2 * sum_q (c_q * MS_q)**2 / (df_q + 2)`` for the estimator
    ``sum_q c_q * MS_q``.
    """
    k = estimator_matrix(ms.n_p, ms.n_i, ms.n_o)
    msv = ms.vector()
    dfv = np.array([ms.df[e] for e in EFFECTS], dtype=float)
    raw = k @ msv
    var = 2.0 * ((k * msv[None, :]) ** 2 / (dfv[None, :] + 2.0)).sum(axis=1)
    return VarianceComponents(
        {e: float(v) for e, v in zip(EFFECTS, raw)},
        {e: float(s) for e, s in zip(EFFECTS, np.sqrt(var))},
        ms.n_p, ms.n_i, ms.n_o,
    )


def gstudy(cube: ResponseCube | np.ndarray) -> VarianceComponents:
    return estimate_components(mean_squares(cube))


def expected_mean_squares(vc: VarianceComponents, use_raw: bool = True) -> dict[str, float]:
    if vc.n_p is None:
        raise DesignError("G-study sample sizes are needed to rebuild mean squares")
    vals = vc.raw if use_raw else vc.estimate
    sigma = np.array([vals[e] for e in EFFECTS])
    return dict(zip(EFFECTS, ems_matrix(vc.n_p, vc.n_i, vc.n_o) @ sigma))


def format_components(vc: VarianceComponents, title: str | None = None) -> str:
    """Aligned Estimate / Std. Error table, three decimals."""
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'':<22}{'Estimate':>10}{'Std. Error':>12}")
    est = vc.estimate
    for e in REPORT_ORDER:
        se = vc.std_error[e]
        se_txt = "" if np.isnan(se) else f"{se:.3f}"
        lines.append(f"{LABELS[e]:<22}{est[e]:>10.3f}{se_txt:>12}")
    if vc.n_p is not None:
        lines.append(f"{'N':<22}{vc.n_p:>10d}")
    return "\n".join(lines)
