"""Synthetic crossed panels with known variance components, estimator
recovery experiments, and bootstrap item-resampling reliability."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import ResponseCube
from .errors import DesignError
from .gstudy import EFFECTS, VarianceComponents, gstudy


def _rng(seed: int, *key: int) -> np.random.Generator:
    # Philox is counter-based; spawn keys give independent reproducible substreams.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class GeneratorSpec:
    n_p: int
    n_i: int
    n_o: int
    true_components: dict[str, float]
    grand_mean: float = 4.0
    seed: int = 0
    discretize: bool = False
    scale_min: int = 1
    scale_max: int = 7
    group_label: str = "sim"

    def __post_init__(self):
        missing = set(EFFECTS) - set(self.true_components)
        if missing:
            raise ValueError(f"missing true components: {sorted(missing)}")
        for e in EFFECTS:
            v = self.true_components[e]
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"true variance of {e} must be finite and >= 0, got {v}")
        if min(self.n_p, self.n_i, self.n_o) < 1:
            raise ValueError("dimensions must be positive")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.n_p, self.n_i, self.n_o, dict(self.true_components),
                             self.grand_mean, seed, self.discretize, self.scale_min,
                             self.scale_max, self.group_label)


def draw_effects(spec: GeneratorSpec) -> dict[str, np.ndarray]:
    """Independent zero-mean normal effect arrays, shaped to broadcast over (p, i, o)."""
    rng = _rng(spec.seed)
    n_p, n_i, n_o = spec.n_p, spec.n_i, spec.n_o
    shapes = {"p": (n_p, 1, 1), "i": (1, n_i, 1), "o": (1, 1, n_o),
              "pi": (n_p, n_i, 1), "po": (n_p, 1, n_o), "io": (1, n_i, n_o),
              "pio": (n_p, n_i, n_o)}
    # fixed draw order keeps the stream layout independent of which variances are zero
    return {e: rng.standard_normal(shapes[e]) * math.sqrt(spec.true_components[e])
            for e in EFFECTS}


def generate(spec: GeneratorSpec) -> ResponseCube:
    """X_pio = grand mean + sum of the seven random effects."""
    effects = draw_effects(spec)
    x = np.full((spec.n_p, spec.n_i, spec.n_o), float(spec.grand_mean))
    for e in EFFECTS:
        x = x + effects[e]
    if spec.discretize:
        x = np.clip(np.rint(x), spec.scale_min, spec.scale_max)
    return ResponseCube(spec.group_label,
                        tuple(str(p + 1) for p in range(spec.n_p)),
                        tuple(range(1, spec.n_i + 1)),
                        tuple(range(1, spec.n_o + 1)), x)


@dataclass(frozen=True)
class ComponentRecovery:
    truth: float
    mean_raw: float
    empirical_sd: float
    mean_std_error: float
    coverage: float

    @property
    def bias(self) -> float:
        return self.mean_raw - self.truth

    @property
    def se_ratio(self) -> float:
        """Mean normal-theory SE over the empirical SD of the raw estimates."""
        if self.empirical_sd == 0:
            return math.nan
        return self.mean_std_error / self.empirical_sd


@dataclass(frozen=True)
class RecoveryReport:
    spec: GeneratorSpec
    replications: int
    components: dict[str, ComponentRecovery]

    def as_dict(self) -> dict:
        return {
            "n_p": self.spec.n_p, "n_i": self.spec.n_i, "n_o": self.spec.n_o,
            "seed": self.spec.seed, "replications": self.replications,
            "components": {e: {"truth": c.truth, "mean_raw": c.mean_raw, "bias": c.bias,
                               "empirical_sd": c.empirical_sd,
                               "mean_std_error": c.mean_std_error,
                               "se_ratio": c.se_ratio, "coverage95": c.coverage}
                           for e, c in self.components.items()},
        }


def replicate_seeds(seed: int, replications: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(child.generate_state(1, np.uint64)[0]) for child in ss.spawn(replications)]


def recovery_experiment(spec: GeneratorSpec, replications: int) -> RecoveryReport:
    """Simulate, estimate, and compare raw estimates with the generating truth.

    Coverage counts replications whose raw estimate lies within 1.96 normal-theory
    standard errors of the truth.
    """
    if replications < 2:
        raise ValueError("replications must be >= 2")
    raws = np.empty((replications, len(EFFECTS)))
    ses = np.empty_like(raws)
    for r, s in enumerate(replicate_seeds(spec.seed, replications)):
        vc = gstudy(generate(spec.with_seed(s)))
        raws[r] = [vc.raw[e] for e in EFFECTS]
        ses[r] = [vc.std_error[e] for e in EFFECTS]
    truth = np.array([spec.true_components[e] for e in EFFECTS])
    covered = np.abs(raws - truth) <= 1.96 * ses
    out = {}
    for j, e in enumerate(EFFECTS):
        out[e] = ComponentRecovery(float(truth[j]), float(raws[:, j].mean()),
                                   float(raws[:, j].std(ddof=1)), float(ses[:, j].mean()),
                                   float(covered[:, j].mean()))
    return RecoveryReport(spec, replications, out)


def components_from_truth(spec: GeneratorSpec) -> VarianceComponents:
    return VarianceComponents.from_values(spec.true_components, n_p=spec.n_p,
                                          n_i=spec.n_i, n_o=spec.n_o)


@dataclass(frozen=True)
class BootstrapSpec:
    k_values: Sequence[int]
    replications: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.k_values:
            raise ValueError("k_values must be nonempty")
        if any(k < 1 for k in self.k_values):
            raise ValueError("every k must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


@dataclass(frozen=True)
class BootstrapSummary:
    k: int
    median: float
    q25: float
    q75: float
    undefined_count: int
    correlations: np.ndarray = field(repr=False)


def _rowwise_corr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pearson correlation of matching rows; NaN where either row is constant."""
    da = a - a.mean(axis=1, keepdims=True)
    db = b - b.mean(axis=1, keepdims=True)
    va = (da * da).sum(axis=1)
    vb = (db * db).sum(axis=1)
    # constant up to rounding, relative to the row's magnitude
    flat = (va <= 1e-24 * (a * a).sum(axis=1)) | (vb <= 1e-24 * (b * b).sum(axis=1))
    out = np.full(a.shape[0], np.nan)
    ok = ~flat
    out[ok] = np.clip((da * db).sum(axis=1)[ok] / np.sqrt(va[ok] * vb[ok]), -1.0, 1.0)
    return out


def bootstrap_correlations(x: np.ndarray, k: int, replications: int, seed: int) -> np.ndarray:
    """Correlations of two independent k-item composites drawn with replacement.

    ``x`` is persons x items. Each replication draws two multisets of k item
    indices, averages each person's responses over them, and correlates the two
    composites across persons. NaN marks replications with a constant composite.
    """
    n_p, n_i = x.shape
    rng = _rng(seed, int(k))
    draws = rng.integers(0, n_i, size=(2, replications, k))
    counts = np.zeros((2, replications, n_i))
    for side in range(2):
        np.add.at(counts[side], (np.arange(replications)[:, None], draws[side]), 1.0)
    comp_a = counts[0] @ x.T / k
    comp_b = counts[1] @ x.T / k
    return _rowwise_corr(comp_a, comp_b)


def bootstrap_scale_reliability(cube: ResponseCube, occasion: int,
                                spec: BootstrapSpec) -> list[BootstrapSummary]:
    """Median and quartiles of composite correlations for each k.

    Every k uses its own substream keyed on (seed, k), so its summary does not
    depend on which other k values are requested or in what order.
    """
    x = cube.occasion_slice(occasion)
    if x.shape[1] < 2:
        raise DesignError("bootstrap needs at least 2 items")
    out = []
    for k in spec.k_values:
        r = bootstrap_correlations(x, k, spec.replications, spec.seed)
        valid = r[~np.isnan(r)]
        if valid.size:
            q25, med, q75 = np.percentile(valid, [25, 50, 75])
        else:
            q25 = med = q75 = math.nan
        out.append(BootstrapSummary(int(k), float(med), float(q25), float(q75),
                                    int(r.size - valid.size), r))
    return out


def bootstrap_csv(summaries: Sequence[BootstrapSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "median", "q25", "q75", "undefined_count"])
    for s in summaries:
        w.writerow([s.k, repr(s.median), repr(s.q25), repr(s.q75), s.undefined_count])
    return buf.getvalue()


def one_factor_wave(n_p: int, n_i: int, alpha: float, seed: int,
                    mean: float = 4.0) -> ResponseCube:
    """Single-occasion cube of parallel items whose population alpha equals ``alpha``.

    Per-item reliability r solves alpha = k r / (1 + (k - 1) r); true-score
    variance is 1 and each item's error variance (1 - r) / r.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    r = alpha / (n_i - (n_i - 1) * alpha)
    err = (1 - r) / r
    spec = GeneratorSpec(n_p, n_i, 1, dict(p=1.0, i=0.0, o=0.0, pi=0.0, po=0.0, io=0.0,
                                           pio=err), grand_mean=mean, seed=seed)
    return generate(spec)
