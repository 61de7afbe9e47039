"""Parameter selection by exhaustive 2-D grid sweep or a real-coded GA."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, TextIO

import numpy as np

from .color_image import RasterImage
from .metrics import BlockSpec
from .pipeline import Method, PipelineConfig, Prepared
from .rooting import RootingParams

log = logging.getLogger(__name__)

PARAM_NAMES = ("alpha", "beta", "lambda")

DEFAULT_BOUNDS = {"alpha": (0.01, 1.0), "beta": (0.0, 3.0), "lambda": (0.01, 3.0)}


def make_params(values: dict) -> RootingParams:
    return RootingParams(alpha=float(values["alpha"]), beta=float(values["beta"]),
                         lam=float(values["lambda"]))


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(x: float) -> str:
    return f"{x:.10g}"


# --- grid sweep ------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.name not in PARAM_NAMES:
            raise ValueError(f"unknown parameter {self.name!r}; expected one of {PARAM_NAMES}")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ValueError(f"empty range {self.start}..{self.stop}")

    @classmethod
    def parse(cls, text: str) -> Axis:
        """Parse ``name:start:stop:step``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis must look like alpha:0.5:1:0.02, got {text!r}")
        return cls(parts[0], float(parts[1]), float(parts[2]), float(parts[3]))

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(n), 10)


@dataclass(frozen=True)
class SweepSpec:
    fixed: tuple[str, float]
    vary1: Axis
    vary2: Axis
    method: Method = Method.QDFT
    blocks: BlockSpec = field(default_factory=BlockSpec)

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        names = [self.fixed[0], self.vary1.name, self.vary2.name]
        if sorted(names) != sorted(PARAM_NAMES):
            raise ValueError(f"alpha, beta and lambda must each appear exactly once, got {names}")
        for axis in (self.vary1, self.vary2):
            for v in axis.values()[[0, -1]]:
                self.params_at(**{axis.name: v, self.other(axis).name: self.other(axis).start})

    def other(self, axis: Axis) -> Axis:
        return self.vary2 if axis is self.vary1 else self.vary1

    def params_at(self, **values) -> RootingParams:
        values = dict(values)
        values[self.fixed[0]] = self.fixed[1]
        return make_params(values)


class SweepError(RuntimeError):
    pass


@dataclass
class MetricSurface:
    """Metric values over a 2-parameter grid.

    ``values`` has shape ``(n1, n2)`` for CEME or ``(n1, n2, C)`` for
    per-channel EME; ``metric_names`` labels the last axis.
    """

    axis1: str
    values1: np.ndarray
    axis2: str
    values2: np.ndarray
    values: np.ndarray
    fixed: tuple[str, float]
    metric_names: list[str]

    def _stack(self) -> np.ndarray:
        return self.values if self.values.ndim == 3 else self.values[..., None]

    def argmax(self) -> list[tuple[float, float, float]]:
        """``(v1, v2, metric)`` at the maximum of each metric column."""
        out = []
        stack = self._stack()
        for k in range(stack.shape[2]):
            i, j = np.unravel_index(np.argmax(stack[..., k]), stack.shape[:2])
            out.append((float(self.values1[i]), float(self.values2[j]), float(stack[i, j, k])))
        return out

    def write_csv(self, fh: TextIO) -> None:
        name, value = self.fixed
        fh.write(f"# fixed: {name}={_fmt(value)}\n")
        fh.write(",".join([self.axis1, self.axis2, *self.metric_names]) + "\n")
        stack = self._stack()
        for i, v1 in enumerate(self.values1):
            for j, v2 in enumerate(self.values2):
                cells = [_fmt(v1), _fmt(v2)] + [f"{x:.12g}" for x in stack[i, j]]
                fh.write(",".join(cells) + "\n")


def sweep(img: RasterImage, spec: SweepSpec, config: Optional[PipelineConfig] = None,
          workers: int = 1, include_post: bool = False) -> MetricSurface:
    """Score every grid point of ``spec``.

    qdft mode scores CEME; dft-channel mode scores each channel's EME with
    that channel rooted and rescaled on its own.
    """
    base = config or PipelineConfig()
    rooting = RootingParams() if spec.method is Method.QDFT else (RootingParams(),) * 3
    app = base.post_application if base.method is spec.method else None
    base = replace(base, method=spec.method, blocks=spec.blocks, rooting=rooting, post_application=app)
    prepared = Prepared(img, base)
    v1s, v2s = spec.vary1.values(), spec.vary2.values()
    points = [(float(a), float(b)) for a in v1s for b in v2s]

    def evaluate(point):
        a, b = point
        try:
            params = spec.params_at(**{spec.vary1.name: a, spec.vary2.name: b})
            if spec.method is Method.QDFT:
                return [prepared.score(params, include_post)]
            return prepared.channel_scores(params, include_post)
        except Exception as exc:
            raise SweepError(f"{spec.vary1.name}={a:g}, {spec.vary2.name}={b:g}: {exc}") from exc

    scores = np.array(_map(evaluate, points, workers), dtype=float)
    if not np.all(np.isfinite(scores)):
        raise SweepError("non-finite metric in sweep surface")
    grid = scores.reshape(len(v1s), len(v2s), -1)
    if spec.method is Method.QDFT:
        names, grid = ["metric"], grid[..., 0]
    else:
        names = [f"eme_{c}" for c in "rgba"[: grid.shape[2]]]
    return MetricSurface(spec.vary1.name, v1s, spec.vary2.name, v2s, grid, spec.fixed, names)


# --- genetic algorithm -----------------------------------------------------


@dataclass(frozen=True)
class GAConfig:
    """Real-coded GA settings.

    ``mutation_sigma`` is the Gaussian step as a fraction of each bound's
    width; ``blend`` is the BLX extension factor of crossover.
    """

    population: int = 30
    generations: int = 40
    crossover_rate: float = 0.9
    mutation_rate: float = 0.15
    mutation_sigma: float = 0.05
    elitism: int = 2
    rng_seed: int = 0
    tournament: int = 2
    blend: float = 0.5

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("population must be >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not (0 <= self.crossover_rate <= 1 and 0 <= self.mutation_rate <= 1):
            raise ValueError("crossover and mutation rates must lie in [0, 1]")
        if not self.mutation_sigma > 0:
            raise ValueError("mutation_sigma must be positive")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must satisfy 0 <= elitism < population")


@dataclass
class GAResult:
    params: RootingParams
    fitness: float
    history: list[tuple[int, float, float]]  # (generation, best, mean)
    evaluations: int

    def write_log(self, fh: TextIO) -> None:
        fh.write("generation,best,mean\n")
        for gen, best, mean in self.history:
            fh.write(f"{gen},{best:.12g},{mean:.12g}\n")


def check_bounds(bounds: Optional[dict]) -> np.ndarray:
    merged = dict(DEFAULT_BOUNDS)
    merged.update(bounds or {})
    unknown = set(merged) - set(PARAM_NAMES)
    if unknown:
        raise ValueError(f"unknown parameters in bounds: {sorted(unknown)}")
    arr = np.array([merged[n] for n in PARAM_NAMES], dtype=float)
    if np.any(arr[:, 0] > arr[:, 1]):
        raise ValueError(f"empty bounds: {merged}")
    # both corners must be valid parameters
    make_params(dict(zip(PARAM_NAMES, arr[:, 0])))
    make_params(dict(zip(PARAM_NAMES, arr[:, 1])))
    return arr


def _quantize(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.clip(np.round(x, 9), lo, hi)


def genetic_search(fitness: Callable[[RootingParams], float], bounds: Optional[dict] = None,
                   cfg: GAConfig = GAConfig(), workers: int = 1) -> GAResult:
    """Maximise ``fitness`` over (alpha, beta, lambda) within ``bounds``.

    Tournament selection, BLX-blend crossover, Gaussian mutation clipped to
    the bounds, and elitism.  All random draws happen between evaluations,
    so results depend only on ``cfg.rng_seed`` and not on ``workers``.
    """
    box = check_bounds(bounds)
    lo, hi = box[:, 0], box[:, 1]
    width = hi - lo
    rng = np.random.default_rng(cfg.rng_seed)
    cache: dict[tuple, float] = {}

    def evaluate(pop: np.ndarray) -> np.ndarray:
        keys = [tuple(row) for row in pop]
        todo = list(dict.fromkeys(k for k in keys if k not in cache))

        def one(key):
            try:
                value = float(fitness(make_params(dict(zip(PARAM_NAMES, key)))))
            except (ArithmeticError, ValueError) as exc:
                log.warning("fitness failed at %s: %s", key, exc)
                return -math.inf
            if not math.isfinite(value):
                log.warning("non-finite fitness %r at %s; treated as -inf", value, key)
                return -math.inf
            return value

        for key, value in zip(todo, _map(one, todo, workers)):
            cache[key] = value
        return np.array([cache[k] for k in keys])

    def tournament(pop, fit):
        idx = rng.integers(0, len(pop), size=cfg.tournament)
        return pop[idx[np.argmax(fit[idx])]]

    pop = _quantize(lo + rng.random((cfg.population, 3)) * width, lo, hi)
    history = []
    best_x, best_f = None, -math.inf
    for gen in range(cfg.generations):
        fit = evaluate(pop)
        i = int(np.argmax(fit))
        if best_x is None or fit[i] > best_f:
            best_x, best_f = pop[i].copy(), float(fit[i])
        finite = fit[np.isfinite(fit)]
        history.append((gen, float(fit[i]), float(finite.mean()) if finite.size else -math.inf))
        if gen == cfg.generations - 1:
            break

        order = np.argsort(-fit, kind="stable")
        children = [pop[k].copy() for k in order[: cfg.elitism]]
        while len(children) < cfg.population:
            p1, p2 = tournament(pop, fit), tournament(pop, fit)
            if rng.random() < cfg.crossover_rate:
                span = np.abs(p1 - p2)
                low = np.minimum(p1, p2) - cfg.blend * span
                high = np.maximum(p1, p2) + cfg.blend * span
                kids = [rng.uniform(low, high), rng.uniform(low, high)]
            else:
                kids = [p1.copy(), p2.copy()]
            for kid in kids:
                mask = rng.random(3) < cfg.mutation_rate
                kid = kid + mask * rng.normal(0.0, cfg.mutation_sigma * width)
                children.append(_quantize(kid, lo, hi))
        pop = np.array(children[: cfg.population])

    params = make_params(dict(zip(PARAM_NAMES, best_x)))
    return GAResult(params, best_f, history, len(cache))


def ga_optimize(img: RasterImage, bounds: Optional[dict] = None, cfg: GAConfig = GAConfig(),
                config: Optional[PipelineConfig] = None, include_post: bool = False,
                workers: int = 1) -> GAResult:
    """GA maximising the CEME of the qdft pipeline on ``img``."""
    config = config or PipelineConfig()
    if config.method is not Method.QDFT:
        raise ValueError("the GA optimises qdft mode; use sweep() for dft-channel")
    prepared = Prepared(img, config)
    return genetic_search(lambda p: prepared.score(p, include_post), bounds, cfg, workers)


def grid_best(fitness: Callable[[RootingParams], float], bounds: Optional[dict] = None,
              points: int = 5) -> tuple[RootingParams, float]:
    """Best of an evenly spaced ``points``³ grid over the bounds."""
    box = check_bounds(bounds)
    axes = [np.linspace(l, h, points) for l, h in box]
    best = (None, -math.inf)
    for a in axes[0]:
        for b in axes[1]:
            for c in axes[2]:
                p = make_params({"alpha": a, "beta": b, "lambda": c})
                f = fitness(p)
                if f > best[1]:
                    best = (p, f)
    return best

