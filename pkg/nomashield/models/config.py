from typing import Any, Dict, Mapping
from dataclasses import dataclass, asdict, fields, replace
import math

from ..errors import ConfigError


SEED_LIMIT = 2**64


@dataclass(frozen=True)
class SystemConfig:
    '''Scalar parameters of the aligned MIMO-NOMA downlink.

    Args:
        num_pairs: Base-station antennas M, equal to the number of user pairs.
        antennas_per_user: Receive antennas N of every user and of the eavesdropper.
        transmit_snr: Linear transmit SNR rho.
        noise_var: Receiver noise variance sigma^2.
        alpha_near: Power-allocation amplitude of the near user.
        alpha_far: Power-allocation amplitude of the far user.
        pathloss_exp: Path-loss exponent, within [2, 6].
        r0: Path-loss threshold distance.
        r1: Outer radius of the near-user disc.
        r2: Outer radius of the far-user annulus.
        master_seed: Root of every random stream.
        near_distance: Pins every near user to this distance when set.
        far_distance: Pins every far user to this distance when set.
        eve_distance: Eavesdropper distance from the base station.
        target_pair: Index of the pair the eavesdropper listens to.
    '''

    num_pairs:         int=7
    antennas_per_user: int=5
    transmit_snr:      float=5.
    noise_var:         float=1.
    alpha_near:        float=math.sqrt(0.2)
    alpha_far:         float=math.sqrt(0.8)
    pathloss_exp:      float=3.
    r0:                float=1.
    r1:                float=5.
    r2:                float=15.
    master_seed:       int=0
    near_distance:     float | None=None
    far_distance:      float | None=None
    eve_distance:      float=8.
    target_pair:       int=0

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if value is None and item.name in ('near_distance', 'far_distance'):
                continue
            if item.type is int or item.type == 'int':
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(item.name, f'expected an integer, got {value!r}')
            elif isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(item.name, f'expected a number, got {value!r}')
            elif not math.isfinite(value):
                raise ConfigError(item.name, f'expected a finite number, got {value!r}')

        M, N = self.num_pairs, self.antennas_per_user
        if M < 1:
            raise ConfigError('num_pairs', 'must be a positive integer')
        if N < 1:
            raise ConfigError('antennas_per_user', 'must be a positive integer')
        if 2 * N <= M:
            raise ConfigError('antennas_per_user', (
                f'requires N > M/2 so the alignment null space is nonempty '
                f'(got N={N}, M={M})'))
        if N > M:
            raise ConfigError('antennas_per_user', (
                f'requires N <= M, a restriction beyond N > M/2: for N > M '
                f'alignment vectors with g_m = 0 exist (got N={N}, M={M})'))
        if self.transmit_snr <= 0:
            raise ConfigError('transmit_snr', 'must be positive')
        if self.noise_var <= 0:
            raise ConfigError('noise_var', 'must be positive')

        if not 0 <= self.alpha_near < 1:
            raise ConfigError('alpha_near', 'must lie in [0, 1)')
        if not 0 < self.alpha_far <= 1:
            raise ConfigError('alpha_far', 'must lie in (0, 1]')
        if abs(self.alpha_near**2 + self.alpha_far**2 - 1) > 1e-12:
            raise ConfigError('alpha_far', (
                'alpha_near^2 + alpha_far^2 must equal 1 '
                '(use "power_split" to give alpha_far^2 directly)'))
        if self.alpha_far <= self.alpha_near:
            raise ConfigError('alpha_far', 'the far user must get more power than the near user')

        if not 2 <= self.pathloss_exp <= 6:
            raise ConfigError('pathloss_exp', 'must lie in [2, 6]')
        if self.r0 <= 0:
            raise ConfigError('r0', 'must be positive')
        if self.r0 > self.r1:
            raise ConfigError('r1', 'requires r0 <= r1')
        if self.r1 >= self.r2:
            raise ConfigError('r2', 'requires r1 < r2')

        if self.near_distance is not None and not self.r0 <= self.near_distance <= self.r1:
            raise ConfigError('near_distance', f'must lie in [r0, r1] = [{self.r0}, {self.r1}]')
        if self.far_distance is not None and not self.r1 < self.far_distance <= self.r2:
            raise ConfigError('far_distance', f'must lie in (r1, r2] = ({self.r1}, {self.r2}]')
        if self.eve_distance < 0:
            raise ConfigError('eve_distance', 'must be non-negative')
        if not 0 <= self.target_pair < M:
            raise ConfigError('target_pair', f'must index a pair in [0, {M})')
        if not 0 <= self.master_seed < SEED_LIMIT:
            raise ConfigError('master_seed', 'must be an unsigned 64-bit integer')

    @property
    def alpha_ceiling(self) -> float:
        if self.alpha_near == 0: return math.inf
        return self.alpha_far**2 / self.alpha_near**2

    def replace(self, **changes:Any) -> 'SystemConfig':
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data:Mapping[str, Any]) -> 'SystemConfig':
        data = dict(data)
        known = {item.name for item in fields(cls)}

        power_split = data.pop('power_split', None)
        if power_split is not None:
            if isinstance(power_split, bool) or not isinstance(power_split, (int, float)):
                raise ConfigError('power_split', f'expected a number, got {power_split!r}')
            if not 0.5 < power_split <= 1:
                raise ConfigError('power_split', 'alpha_far^2 must lie in (0.5, 1]')
            if 'alpha_near' in data or 'alpha_far' in data:
                raise ConfigError('power_split', 'cannot be combined with alpha_near/alpha_far')
            data['alpha_far'] = math.sqrt(power_split)
            data['alpha_near'] = math.sqrt(1 - power_split)

        for key in data:
            if key not in known:
                raise ConfigError(key, 'unknown configuration field')
        return cls(**data)
