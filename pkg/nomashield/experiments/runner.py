from typing import Any, Dict, List, Tuple
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor
import math
import os
import time

import torch

from .task import Task, OUTPUT_GROUPS, quantities_of
from .tasks import TASKS
from .logging import Logger
from .seeding import split, make_generator
from ..models.config import SystemConfig
from ..errors import ConfigError, AlignmentError, IllConditionedError, NumericalError


THREADS_ENV   = 'NOMA_SHIELD_THREADS'
MAX_ATTEMPTS  = 16
RESAMPLE_RATE = 0.01


def worker_count(workers:int | None=None) -> int:
    if workers is not None: return max(1, int(workers))
    raw = os.environ.get(THREADS_ENV, '').strip()
    if not raw: return 1
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(THREADS_ENV, f'expected an integer, got {raw!r}')
    if count < 1:
        raise ConfigError(THREADS_ENV, 'must be at least 1')
    return count


@dataclass
class SweepSpec:
    cfg:               SystemConfig
    sweep_variable:    str='eve_distance'
    grid:              List[float]=field(
        default_factory=lambda: [float(d) for d in range(2, 15)])
    trials_per_point:  int=1000
    outputs_requested: Tuple[str, ...]=tuple(OUTPUT_GROUPS)
    legit_near:        float | None=3.
    legit_far:         float | None=8.
    gamma:             float | None=None

    def __post_init__(self):
        if self.sweep_variable not in TASKS:
            raise ConfigError('sweep_variable', (
                f'unsupported `{self.sweep_variable}`, '
                f'expected one of {sorted(TASKS)}'))
        self.grid = [float(v) for v in self.grid]
        if not self.grid:
            raise ConfigError('grid', 'must not be empty')
        if any(not math.isfinite(v) for v in self.grid):
            raise ConfigError('grid', 'values must be finite')
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError('grid', 'must be strictly increasing')
        if isinstance(self.trials_per_point, bool) or not isinstance(self.trials_per_point, int):
            raise ConfigError('trials_per_point', 'expected an integer')
        if self.trials_per_point < 1:
            raise ConfigError('trials_per_point', 'must be at least 1')
        self.outputs_requested = tuple(self.outputs_requested)
        unknown = set(self.outputs_requested) - set(OUTPUT_GROUPS)
        if unknown or not self.outputs_requested:
            raise ConfigError('outputs_requested', (
                f'expected a nonempty subset of {list(OUTPUT_GROUPS)}, '
                f'got {list(self.outputs_requested)}'))
        if self.gamma is not None and not 0.5 < self.gamma <= 1:
            raise ConfigError('gamma', 'must lie in (0.5, 1]')

    def build_task(self) -> Task:
        return TASKS[self.sweep_variable](
            cfg=self.cfg,
            outputs=self.outputs_requested,
            legit_near=self.legit_near,
            legit_far=self.legit_far,
            gamma=self.gamma,
        )

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            sweep_variable=self.sweep_variable,
            grid=list(self.grid),
            trials_per_point=self.trials_per_point,
            outputs_requested=list(self.outputs_requested),
            legit_near=self.legit_near,
            legit_far=self.legit_far,
            gamma=self.gamma,
        )


@dataclass
class QuantityStats:
    mean: float
    se:   float
    p5:   float
    p95:  float

    @classmethod
    def from_values(cls, values:torch.Tensor) -> 'QuantityStats':
        n = values.numel()
        mean = values.mean().item()
        se = (values.std() / math.sqrt(n)).item() if n > 1 else 0.
        p5, p95 = torch.quantile(
            values, torch.tensor([0.05, 0.95], dtype=values.dtype)).tolist()
        return cls(mean, se, p5, p95)


@dataclass
class GridPoint:
    value:     float
    trials:    int
    resamples: int
    stats:     Dict[str, QuantityStats]


@dataclass
class SweepResult:
    sweep_variable: str
    master_seed:    int
    points:         List[GridPoint]
    elapsed:        float=field(default=0., compare=False)

    def quantity(self, key:str) -> List[QuantityStats]:
        return [point.stats[key] for point in self.points]

    def means(self, key:str) -> List[float]:
        return [stat.mean for stat in self.quantity(key)]

    @property
    def total_resamples(self) -> int:
        return sum(point.resamples for point in self.points)

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            sweep_variable=self.sweep_variable,
            master_seed=self.master_seed,
            points=[dict(
                value=point.value,
                trials=point.trials,
                resamples=point.resamples,
                stats={k: vars(s) for k, s in point.stats.items()},
            ) for point in self.points],
        )


@dataclass
class Runner:
    spec:      SweepSpec
    output:    str | None=None
    workers:   int | None=None
    show_step: int=0

    def _dump_progress(
            self,
            index: int,
            trial: int,
        ) -> str:

        return (
            f'grid: {index + 1}/{len(self.spec.grid)}, '
            f'trial: {trial + 1}/{self.spec.trials_per_point}'
        )

    def initialize(self):
        spec = self.spec
        self.task = spec.build_task()
        for value in spec.grid:
            self.task.trial_config(value)
        self.num_workers = worker_count(self.workers)
        self.quantities = quantities_of(spec.outputs_requested)
        self.max_resamples = math.floor(
            RESAMPLE_RATE * spec.trials_per_point * len(spec.grid))
        self.logger = None
        if self.output is not None:
            self.logger = Logger.create_by_output(self.output)
        if self.show_step > 0:
            print('Preparing ...')
            print('sweep:', spec.sweep_variable, spec.grid)
            print('trials per point:', spec.trials_per_point)
            print('workers:', self.num_workers)

    def _run_one(
            self,
            index: int,
            value: float,
            trial: int,
        ) -> Tuple[Dict[str, float], int]:

        master_seed = self.spec.cfg.master_seed
        for attempt in range(MAX_ATTEMPTS):
            key = (index, trial) if attempt == 0 else (index, trial, attempt)
            rng = make_generator(split(master_seed, *key))
            try:
                return self.task.run_trial(value, rng), attempt
            except (AlignmentError, IllConditionedError):
                continue
        raise NumericalError(
            f'trial {trial} at grid index {index} failed after {MAX_ATTEMPTS} draws')

    def _run_point(
            self,
            index: int,
            value: float,
        ) -> GridPoint:

        trials = range(self.spec.trials_per_point)
        fn = lambda trial: self._run_one(index, value, trial)
        if self.num_workers > 1:
            with ThreadPoolExecutor(max_workers=self.num_workers) as pool:
                outcomes = list(pool.map(fn, trials))
        else:
            outcomes = [fn(trial) for trial in trials]

        resamples = 0
        columns = {key: [] for key in self.quantities}
        for trial, (values, attempts) in enumerate(outcomes):
            resamples += attempts > 0
            for key in self.quantities:
                columns[key].append(values[key])
            if self.logger is not None:
                self.logger.update('trial', values)
            if (self.show_step > 0) and ((trial + 1) % self.show_step == 0):
                print(self._dump_progress(index, trial))

        stats = {
            key: QuantityStats.from_values(
                torch.tensor(column, dtype=torch.float64))
            for key, column in columns.items()}
        return GridPoint(value, len(outcomes), resamples, stats)

    def run(self) -> SweepResult:
        spec = self.spec
        start = time.perf_counter()
        points = []
        resamples = 0
        for index, value in enumerate(spec.grid):
            if self.logger is not None:
                self.logger.reset()
            point = self._run_point(index, value)
            points.append(point)

            resamples += point.resamples
            if resamples > self.max_resamples:
                raise NumericalError((
                    f'{resamples} trials needed resampling, more than '
                    f'{RESAMPLE_RATE:.0%} of {spec.trials_per_point * len(spec.grid)}'))

            if self.logger is not None:
                self.logger.update('point', dict(
                    index=index, value=value, resamples=point.resamples))
                dump_str = self.logger.dumpf()
                if self.show_step > 0:
                    print(dump_str)

        return SweepResult(
            sweep_variable=spec.sweep_variable,
            master_seed=spec.cfg.master_seed,
            points=points,
            elapsed=time.perf_counter() - start,
        )


def run_sweep(
        spec:      SweepSpec,
        output:    str | None=None,
        workers:   int | None=None,
        show_step: int=0,
    ) -> SweepResult:

    runner = Runner(spec, output=output, workers=workers, show_step=show_step)
    runner.initialize()
    return runner.run()
