from typing import Dict, Tuple
from dataclasses import dataclass

import torch

from ..models.config import SystemConfig
from ..models.channel import (
    UserPopulation,
    path_loss,
    sample_population,
    sample_eve_channel,
)
from ..models.alignment import build_precoder
from ..models.sinr import legit_sinr_zf, legit_sinr_opt
from ..models.bounds import analyze_realization
from .seeding import split, make_generator


OUTPUT_GROUPS = {
    'eve_opt':    ('eve_opt', ),
    'eve_bounds': ('bound_eval', 'bound_dist', 'bound_jensen', 'lambda_min'),
    'legit_zf':   ('legit_zf_far', 'legit_zf_near', 'legit_ref_zf_far'),
    'legit_opt':  ('legit_opt_far', 'legit_opt_near', 'legit_ref_far'),
    'secrecy':    ('secrecy_far', 'secrecy_near'),
}


def quantities_of(outputs:Tuple[str, ...]) -> Tuple[str, ...]:
    keys = []
    for group in OUTPUT_GROUPS:
        if group in outputs:
            keys.extend(OUTPUT_GROUPS[group])
    return tuple(keys)


@dataclass
class Task:
    '''One trial of one grid point: draw a realization and measure it.

    Subclasses decide how the grid value enters the configuration, the
    population and the eavesdropper placement.
    '''

    cfg:        SystemConfig
    outputs:    Tuple[str, ...]=tuple(OUTPUT_GROUPS)
    legit_near: float | None=None
    legit_far:  float | None=None
    gamma:      float | None=None

    def trial_config(self, value:float) -> SystemConfig:
        assert not 'this is an empty func'

    def adjust_population(
            self,
            pop:   UserPopulation,
            cfg:   SystemConfig,
            value: float,
        ):
        pass

    def eve_distance(self, cfg:SystemConfig, value:float) -> float:
        return cfg.eve_distance

    def reference_distance(
            self,
            pop:   UserPopulation,
            cfg:   SystemConfig,
            value: float,
        ) -> float:
        return pop.d_far[cfg.target_pair]

    def run_trial(
            self,
            value: float,
            rng:   torch.Generator,
        ) -> Dict[str, float]:

        cfg = self.trial_config(value)
        pop = sample_population(cfg, rng)
        self.adjust_population(pop, cfg, value)
        pre = build_precoder(pop)
        eve = sample_eve_channel(cfg, rng, self.eve_distance(cfg, value))

        report = analyze_realization(cfg, pop, pre, eve)
        m = cfg.target_pair
        ref_loss = path_loss(self.reference_distance(pop, cfg, value), cfg)
        # the reference receiver uses its optimal detector, like the eavesdropper
        legit_ref_far, _ = legit_sinr_opt(pre, pop, m, cfg, far_loss=ref_loss)
        legit_ref_zf_far, _ = legit_sinr_zf(pre, pop, m, cfg, far_loss=ref_loss)
        bound_eval, bound_dist, bound_jensen = report.bounds

        values = dict(
            eve_opt=report.sinr_eve_opt,
            bound_eval=bound_eval,
            bound_dist=bound_dist,
            bound_jensen=bound_jensen,
            lambda_min=report.lambda_min,
            legit_zf_far=report.sinr_far_legit,
            legit_zf_near=report.sinr_near_legit,
            legit_ref_far=legit_ref_far,
            legit_ref_zf_far=legit_ref_zf_far,
            legit_opt_far=report.sinr_far_opt,
            legit_opt_near=report.sinr_near_opt,
            secrecy_far=report.secrecy_capacity_far,
            secrecy_near=report.secrecy_capacity_near,
        )
        return {key: values[key] for key in quantities_of(self.outputs)}


def draw_realization(cfg:SystemConfig):
    '''Population, precoder and eavesdropper of `cfg.master_seed`, in that draw order.'''

    rng = make_generator(split(cfg.master_seed))
    pop = sample_population(cfg, rng)
    pre = build_precoder(pop)
    eve = sample_eve_channel(cfg, rng)
    return pop, pre, eve
