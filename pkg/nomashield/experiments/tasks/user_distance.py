from dataclasses import dataclass

from ..task import Task
from ...models.config import SystemConfig
from ...models.channel import UserPopulation
from ...errors import ConfigError


@dataclass
class UserDistance(Task):
    '''Far user of the attacked pair at the grid distance, eavesdropper fixed.'''

    def trial_config(self, value:float) -> SystemConfig:
        cfg = self.cfg
        if not cfg.r1 < value <= cfg.r2:
            raise ConfigError('grid', (
                f'user distance {value} outside the far-user annulus '
                f'({cfg.r1}, {cfg.r2}]'))
        return cfg

    def adjust_population(
            self,
            pop:   UserPopulation,
            cfg:   SystemConfig,
            value: float,
        ):
        pop.d_far[cfg.target_pair] = float(value)
