from dataclasses import dataclass

from ..task import Task
from ...models.config import SystemConfig
from ...models.channel import UserPopulation


@dataclass
class EveDistance(Task):
    '''Eavesdropper at the grid distance, legitimate geometry pinned.

    The reference legitimate receiver sits at the grid distance too: it
    keeps the far user's fading and detector and takes L(grid distance).
    '''

    legit_near: float | None=3.
    legit_far:  float | None=8.

    def trial_config(self, value:float) -> SystemConfig:
        changes = dict()
        if self.legit_near is not None:
            changes['near_distance'] = self.legit_near
        if self.legit_far is not None:
            changes['far_distance'] = self.legit_far
        return self.cfg.replace(**changes)

    def eve_distance(self, cfg:SystemConfig, value:float) -> float:
        return value

    def reference_distance(
            self,
            pop:   UserPopulation,
            cfg:   SystemConfig,
            value: float,
        ) -> float:
        return value
