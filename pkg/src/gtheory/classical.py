"""Classical test theory: true-score decomposition, coefficient alpha,
Spearman-Brown projection, cross-wave correlations and scree eigenvalues."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import ResponseCube
from .errors import DegenerateMeasurementError, DesignError


@dataclass(frozen=True)
class TrueScoreDecomposition:
    """Observed variance split into true-score and error parts (uncorrelated)."""

    sigma2_T: float
    sigma2_E: float
    covariance_TE: float = 0.0

    def __post_init__(self):
        if self.sigma2_T < 0 or self.sigma2_E < 0:
            raise ValueError("variances must be nonnegative")
        if self.covariance_TE != 0.0:
            raise ValueError("true score and error are assumed uncorrelated")

    @property
    def sigma2_X(self) -> float:
        return self.sigma2_T + self.sigma2_E

    def reliability(self, n_items: int = 1) -> float:
        """True variance over true variance plus error averaged over ``n_items``."""
        if n_items < 1:
            raise ValueError("n_items must be >= 1")
        denom = self.sigma2_T + self.sigma2_E / n_items
        if denom == 0:
            raise DegenerateMeasurementError("zero observed variance")
        return self.sigma2_T / denom


def spearman_brown(rho_single: float, n_items: float) -> float:
    """Reliability of an ``n_items`` composite from single-item reliability."""
    if not 0.0 < rho_single < 1.0:
        raise ValueError(f"single-item reliability must lie in (0, 1), got {rho_single}")
    if n_items < 1:
        raise ValueError(f"n_items must be >= 1, got {n_items}")
    return n_items * rho_single / (1.0 + (n_items - 1.0) * rho_single)


def alpha_asymptotic_variance(cov: np.ndarray) -> float:
    """n * Var(alpha) for item covariance matrix ``cov`` under multivariate normality
    (van Zyl, Neudecker & Nel, 2000)::

        Q = 2 k^2 / ((k-1)^2 (1'V1)^3) * [(1'V1)(tr V^2 + (tr V)^2) - 2 tr V (1'V^2 1)]
    """
    v = np.asarray(cov, dtype=float)
    k = v.shape[0]
    total = v.sum()
    tr = np.trace(v)
    v2 = v @ v
    return float(2 * k**2 / ((k - 1) ** 2 * total**3)
                 * (total * (np.trace(v2) + tr**2) - 2 * tr * v2.sum()))


def alpha_from_matrix(x: np.ndarray) -> tuple[float, float]:
    """Coefficient alpha and its large-sample standard error for a persons x items matrix."""
    x = np.asarray(x, dtype=float)
    n, k = x.shape
    if k < 2:
        raise DesignError(f"alpha needs at least 2 items, have {k}")
    if n < 3:
        raise DesignError(f"alpha needs at least 3 persons, have {n}")
    v = np.cov(x, rowvar=False, ddof=1)
    total = v.sum()
    if total <= 0:
        raise DegenerateMeasurementError("sum scores have zero variance; alpha undefined")
    alpha = k / (k - 1) * (1.0 - np.trace(v) / total)
    q = alpha_asymptotic_variance(v)
    return float(alpha), float(math.sqrt(max(q, 0.0) / n))


def internal_consistency(cube: ResponseCube, occasion: int) -> tuple[float, float]:
    return alpha_from_matrix(cube.occasion_slice(occasion))


@dataclass(frozen=True)
class ScaleReliabilityReport:
    group_label: str
    per_wave: dict[int, tuple[float, float]]
    n_items_used: int
    n_persons: int

    @property
    def average(self) -> float:
        return float(np.mean([r for r, _ in self.per_wave.values()]))

    def as_dict(self) -> dict:
        return {"group": self.group_label, "n_items_used": self.n_items_used,
                "n_persons": self.n_persons,
                "per_wave": {str(o): {"rho": r, "std_error": s}
                             for o, (r, s) in self.per_wave.items()},
                "average": self.average}


def scale_reliability(cube: ResponseCube) -> ScaleReliabilityReport:
    """Alpha for every wave of the cube plus the across-wave mean."""
    per_wave = {o: internal_consistency(cube, o) for o in cube.occasions}
    return ScaleReliabilityReport(cube.group_label, per_wave, cube.n_i, cube.n_p)


def format_scale_table(reports: list[ScaleReliabilityReport]) -> str:
    """Rows are groups, columns per-wave alpha with SE in parentheses, then the mean."""
    occasions = sorted({o for r in reports for o in r.per_wave})
    head = f"{'':<12}" + "".join(f"{'rho_w' + str(o):>14}" for o in occasions) + f"{'mean':>8}"
    lines = [head]
    for r in reports:
        cells = []
        for o in occasions:
            if o in r.per_wave:
                rho, se = r.per_wave[o]
                cells.append(f"{rho:.3f} ({se:.3f})".rjust(14))
            else:
                cells.append(f"{'--':>14}")
        lines.append(f"{r.group_label:<12}" + "".join(cells) + f"{r.average:>8.3f}")
    return "\n".join(lines)


def correlation_matrix(x: np.ndarray) -> np.ndarray:
    """Pearson correlations between columns; pairs involving a constant column are NaN."""
    x = np.asarray(x, dtype=float)
    d = x - x.mean(axis=0)
    ss = np.sqrt((d**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (d.T @ d) / np.outer(ss, ss)
    r = np.clip(r, -1.0, 1.0)
    bad = ss == 0
    r[bad, :] = np.nan
    r[:, bad] = np.nan
    np.fill_diagonal(r, np.where(bad, np.nan, 1.0))
    return r


def cross_wave_correlations(panel: np.ndarray) -> np.ndarray:
    """Occasion x occasion correlation matrix of a persons x occasions single-item panel."""
    panel = np.asarray(panel, dtype=float)
    if panel.ndim != 2:
        raise DesignError("expected a persons x occasions matrix")
    if panel.shape[0] < 3:
        raise DesignError(f"need at least 3 persons, have {panel.shape[0]}")
    if not np.all(np.isfinite(panel)):
        raise DesignError("panel must be complete across occasions")
    return correlation_matrix(panel)


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps continue until the off-diagonal Frobenius norm falls below
    ``tol`` times the matrix norm. Returned in the original diagonal order.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("jacobi_eigenvalues needs a symmetric square matrix")
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    off_diag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if math.sqrt(np.sum(a[off_diag] ** 2)) <= tol * scale:
            return np.diag(a).copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) Givens rotation
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    raise ArithmeticError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def scree_eigenvalues(cube: ResponseCube, occasion: int) -> np.ndarray:
    """Descending eigenvalues of the item correlation matrix at one occasion."""
    x = cube.occasion_slice(occasion)
    sd = x.std(axis=0)
    flat = [cube.items[j] for j in np.flatnonzero(sd == 0)]
    if flat:
        raise DegenerateMeasurementError(f"items with zero variance at occasion {occasion}: {flat}")
    return sorted_eigenvalues(correlation_matrix(x))


def sorted_eigenvalues(r: np.ndarray) -> np.ndarray:
    vals = jacobi_eigenvalues(r)
    # stable sort on the negated values keeps ties in original index order
    return vals[np.argsort(-vals, kind="stable")]
