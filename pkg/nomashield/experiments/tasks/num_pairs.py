from dataclasses import dataclass
import math

from ..task import Task
from ...models.config import SystemConfig
from ...errors import ConfigError


@dataclass
class NumPairs(Task):
    '''Grid values are M; N = ceil(gamma M) when gamma is set.'''

    def trial_config(self, value:float) -> SystemConfig:
        M = int(value)
        if M != value or M < 1:
            raise ConfigError('grid', f'number of pairs must be a positive integer, got {value}')
        N = self.cfg.antennas_per_user
        if self.gamma is not None:
            N = math.ceil(self.gamma * M)
        return self.cfg.replace(num_pairs=M, antennas_per_user=N)
