"""
Tests for the Monte Carlo harness: seeding, sweeps, scaling and logging.
"""

# xxxxxxxxxx Add the parent folder to the python path. xxxxxxxxxxxxxxxxxxxx
import sys
import os

try:
    parent_dir = os.path.split(os.path.abspath(os.path.dirname(__file__)))[0]
    sys.path.append(parent_dir)
except NameError:  # pragma: no cover
    sys.path.append('../')
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx

import json
import math
import tempfile
import unittest
from unittest import mock

import torch

from nomashield.models.config import SystemConfig
from nomashield.experiments.seeding import split, make_generator
from nomashield.experiments.task import OUTPUT_GROUPS, quantities_of
from nomashield.experiments.tasks import TASKS
from nomashield.experiments.logging import Logger
from nomashield.experiments.runner import (
    THREADS_ENV,
    SweepSpec,
    QuantityStats,
    run_sweep,
    worker_count,
)
from nomashield.experiments.scaling import (
    fit_loglog_slope,
    check_m_list,
    antenna_scaling,
    mp_lambda_min,
)
from nomashield.errors import ConfigError, NumericalError, IllConditionedError


class SeedingTestCase(unittest.TestCase):
    def test_split(self):
        self.assertEqual(split(1, 2, 3), split(1, 2, 3))
        self.assertNotEqual(split(1, 2, 3), split(1, 3, 2))
        self.assertNotEqual(split(1, 2, 3), split(2, 2, 3))
        self.assertNotEqual(split(1), split(1, 0))
        self.assertTrue(0 <= split(2**64 - 1, 5) < 2**64)

    def test_generator(self):
        a = torch.rand(3, generator=make_generator(split(0, 1)))
        b = torch.rand(3, generator=make_generator(split(0, 1)))
        self.assertTrue(torch.equal(a, b))


class SweepSpecTestCase(unittest.TestCase):
    def test_validation(self):
        cfg = SystemConfig()
        with self.assertRaises(ConfigError):
            SweepSpec(cfg, grid=[])
        with self.assertRaises(ConfigError):
            SweepSpec(cfg, grid=[3., 2.])
        with self.assertRaises(ConfigError):
            SweepSpec(cfg, grid=[2., 2.])
        with self.assertRaises(ConfigError):
            SweepSpec(cfg, trials_per_point=0)
        with self.assertRaises(ConfigError):
            SweepSpec(cfg, sweep_variable='noise')
        with self.assertRaises(ConfigError):
            SweepSpec(cfg, outputs_requested=('eve_opt', 'plots'))

    def test_defaults(self):
        spec = SweepSpec(SystemConfig())
        self.assertEqual(spec.grid, [float(d) for d in range(2, 15)])
        self.assertEqual(set(spec.outputs_requested), set(OUTPUT_GROUPS))
        self.assertIsInstance(spec.build_task(), TASKS['eve_distance'])

    def test_quantities(self):
        self.assertEqual(quantities_of(('eve_opt', )), ('eve_opt', ))
        self.assertEqual(
            quantities_of(('secrecy', 'eve_opt')), ('eve_opt', 'secrecy_far', 'secrecy_near'))

    def test_worker_count(self):
        with mock.patch.dict(os.environ, {THREADS_ENV: '3'}):
            self.assertEqual(worker_count(), 3)
            self.assertEqual(worker_count(2), 2)
        with mock.patch.dict(os.environ, {THREADS_ENV: 'many'}):
            with self.assertRaises(ConfigError):
                worker_count()
        with mock.patch.dict(os.environ, {THREADS_ENV: ''}):
            self.assertEqual(worker_count(), 1)


class QuantityStatsTestCase(unittest.TestCase):
    def test_from_values(self):
        stats = QuantityStats.from_values(torch.arange(1., 101., dtype=torch.float64))
        self.assertAlmostEqual(stats.mean, 50.5)
        self.assertAlmostEqual(stats.se, torch.arange(1., 101., dtype=torch.float64).std().item() / 10, places=9)
        self.assertLess(stats.p5, stats.mean)
        self.assertGreater(stats.p95, stats.mean)

        stats = QuantityStats.from_values(torch.tensor([2.], dtype=torch.float64))
        self.assertEqual((stats.mean, stats.se, stats.p5, stats.p95), (2., 0., 2., 2.))


class EveDistanceSweepTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.spec = SweepSpec(
            SystemConfig(master_seed=17),
            grid=[2., 5., 8., 11., 14.],
            trials_per_point=150)
        cls.result = run_sweep(cls.spec)

    def test_bookkeeping(self):
        self.assertEqual(self.result.sweep_variable, 'eve_distance')
        self.assertEqual(self.result.master_seed, 17)
        self.assertEqual([p.value for p in self.result.points], self.spec.grid)
        for point in self.result.points:
            self.assertEqual(point.trials, 150)
            self.assertEqual(point.resamples, 0)
            for stats in point.stats.values():
                self.assertLessEqual(stats.p5, stats.p95)
        eve = self.result.quantity('eve_opt')
        for stats in eve:
            self.assertTrue(stats.p5 <= stats.mean <= stats.p95)

    def test_eve_decays_with_distance(self):
        eve = self.result.quantity('eve_opt')
        violations = 0
        for a, b in zip(eve, eve[1:]):
            if b.mean >= a.mean:
                violations += 1
                self.assertLess(b.mean - a.mean, a.se + b.se)
        self.assertLessEqual(violations, 1)

    def test_jensen_bound_curve(self):
        for point in self.result.points:
            eve = point.stats['eve_opt']
            self.assertLessEqual(eve.mean, point.stats['bound_jensen'].mean + 3 * eve.se)
            self.assertLessEqual(
                point.stats['bound_eval'].mean, point.stats['bound_dist'].mean + 1e-12)

    def test_legit_geometry_pinned(self):
        # the reference receiver takes the grid distance, the attacked pair stays put
        far = self.result.means('legit_zf_far')
        self.assertTrue(all(math.isfinite(v) and v > 0 for v in far))
        ref = self.result.means('legit_ref_far')
        for a, b in zip(ref, ref[1:]):
            self.assertGreater(a, b)

    def test_legit_reference_not_behind_eve(self):
        eve = self.result.quantity('eve_opt')
        legit = self.result.quantity('legit_ref_far')
        for e, l in zip(eve, legit):
            # ahead on average; far out the gap is within the noise of 150 trials
            self.assertGreater(l.mean, e.mean - 3 * math.hypot(e.se, l.se))

        # the optimal detector never loses to the alignment detector
        zf = self.result.means('legit_ref_zf_far')
        for opt_mean, zf_mean in zip(self.result.means('legit_ref_far'), zf):
            self.assertGreaterEqual(opt_mean, zf_mean * (1 - 1e-12))

    def test_to_dict(self):
        data = json.loads(json.dumps(self.result.to_dict()))
        self.assertEqual(len(data['points']), 5)
        self.assertIn('eve_opt', data['points'][0]['stats'])


class LegitAdvantageTestCase(unittest.TestCase):
    def test_nearest_point(self):
        spec = SweepSpec(
            SystemConfig(master_seed=19),
            grid=[2.],
            trials_per_point=500,
            outputs_requested=('eve_opt', 'legit_opt'))
        point = run_sweep(spec).points[0]
        eve, legit = point.stats['eve_opt'], point.stats['legit_ref_far']
        self.assertGreater(legit.mean - eve.mean, 3 * math.hypot(eve.se, legit.se))


class DeterminismTestCase(unittest.TestCase):
    def test_repeat_and_threads(self):
        spec = SweepSpec(SystemConfig(master_seed=23), grid=[3., 9.], trials_per_point=8)
        a = run_sweep(spec, workers=1)
        b = run_sweep(spec, workers=1)
        c = run_sweep(spec, workers=4)
        self.assertEqual(a, b)
        self.assertEqual(a, c)

    def test_single_trial(self):
        spec = SweepSpec(SystemConfig(master_seed=29), grid=[4.], trials_per_point=1)
        self.assertEqual(run_sweep(spec), run_sweep(spec))

    def test_seed_matters(self):
        a = run_sweep(SweepSpec(SystemConfig(master_seed=1), grid=[4.], trials_per_point=4))
        b = run_sweep(SweepSpec(SystemConfig(master_seed=2), grid=[4.], trials_per_point=4))
        self.assertNotEqual(a.means('eve_opt'), b.means('eve_opt'))


class ResamplingTestCase(unittest.TestCase):
    def test_abort(self):
        spec = SweepSpec(SystemConfig(), grid=[4.], trials_per_point=2)
        error = IllConditionedError(1e13, 1e12)
        with mock.patch('nomashield.experiments.task.build_precoder', side_effect=error):
            with self.assertRaises(NumericalError):
                run_sweep(spec)


class OtherSweepsTestCase(unittest.TestCase):
    def test_user_distance(self):
        spec = SweepSpec(
            SystemConfig(master_seed=31),
            sweep_variable='user_distance',
            grid=[6., 14.],
            trials_per_point=20,
            outputs_requested=('legit_zf', ))
        result = run_sweep(spec)
        near, far = result.means('legit_zf_far')
        self.assertGreater(near, far)
        self.assertEqual(set(result.points[0].stats), set(OUTPUT_GROUPS['legit_zf']))

    def test_user_distance_outside_annulus(self):
        spec = SweepSpec(SystemConfig(), sweep_variable='user_distance', grid=[3.], trials_per_point=1)
        with self.assertRaises(ConfigError):
            run_sweep(spec)

    def test_num_pairs(self):
        spec = SweepSpec(
            SystemConfig(master_seed=37),
            sweep_variable='num_pairs',
            grid=[4., 8.],
            trials_per_point=5,
            outputs_requested=('eve_opt', ),
            gamma=0.75)
        result = run_sweep(spec)
        self.assertEqual(len(result.points), 2)
        with self.assertRaises(ConfigError):
            run_sweep(SweepSpec(
                SystemConfig(), sweep_variable='num_pairs', grid=[4.5], trials_per_point=1))


class ScalingTestCase(unittest.TestCase):
    def test_slope(self):
        xs = [8., 16., 32., 64.]
        self.assertAlmostEqual(fit_loglog_slope(xs, [3. / x for x in xs]), -1., places=9)
        self.assertAlmostEqual(fit_loglog_slope(xs, [x**0.5 for x in xs]), 0.5, places=9)
        with self.assertRaises(ConfigError):
            fit_loglog_slope([8.], [1.])

    def test_m_list(self):
        self.assertEqual(check_m_list(0.75, (8, 16, 32, 64)), [8, 16, 32, 64])
        with self.assertRaises(ConfigError):
            check_m_list(0.75, [8])
        with self.assertRaises(ConfigError):
            check_m_list(0.75, [8, 16, 24])
        with self.assertRaises(ConfigError):
            check_m_list(0.75, [16, 8, 64])
        with self.assertRaises(ConfigError):
            check_m_list(0.4, [8, 16, 32])

    def test_antenna_scaling(self):
        table = antenna_scaling(SystemConfig(master_seed=41), 0.75, [4, 8, 16], trials=10)
        self.assertEqual([row.N for row in table.rows], [3, 6, 12])
        self.assertTrue(math.isnan(table.rows[0].slope_so_far))
        self.assertTrue(math.isfinite(table.slope))
        self.assertEqual(table.slope, table.rows[-1].slope_so_far)
        for row in table.rows:
            self.assertGreater(row.mean_eve_sinr, 0.)
            self.assertGreaterEqual(row.lambda_min_over_M, 0.)
        self.assertEqual(len(table.to_dict()['rows']), 3)

    def test_mp_lambda_min(self):
        table = mp_lambda_min(0.75, [4, 8, 16], trials=10)
        self.assertEqual(len(table.rows), 3)
        for row in table.rows:
            self.assertGreater(row.mean_lambda, 0.)
            self.assertAlmostEqual(row.ratio, row.mean_lambda / row.M)
            self.assertGreater(row.c_implied, 0.)
        self.assertTrue(math.isfinite(table.stabilization))

    def test_observed_scaling_trend(self):
        # unit-column precoders: E||w_t||^2 = N grows with M and cond(G) worsens,
        # so the eavesdropper SINR does not decay and lambda_min/M keeps falling
        table = antenna_scaling(SystemConfig(master_seed=43), 0.75, [8, 16, 32], trials=40)
        self.assertGreater(table.slope, -0.6)
        ratios = [row.lambda_min_over_M for row in table.rows]
        for a, b in zip(ratios, ratios[1:]):
            self.assertLess(b, 0.75 * a)

        lambdas = mp_lambda_min(0.75, [8, 16, 32], trials=40)
        ratios = [row.ratio for row in lambdas.rows]
        for a, b in zip(ratios, ratios[1:]):
            self.assertLess(b, a)
        self.assertGreater(lambdas.stabilization, 0.25)


class LoggerTestCase(unittest.TestCase):
    def test_dump(self):
        with tempfile.TemporaryDirectory() as folder:
            logger = Logger.create_by_output(os.path.join(folder, 'fig4.csv'))
            self.assertEqual(os.path.dirname(logger.dump_path), os.path.join(folder, 'logs'))
            self.assertTrue(os.path.basename(logger.dump_path).startswith('FIG4-LOG-'))

            logger.update('trial', dict(eve_opt=1.))
            logger.update('trial', dict(eve_opt=2.))
            logger.update('point', dict(index=0, value=2.))
            self.assertEqual(logger.compute('trial'), dict(eve_opt=1.5))
            self.assertEqual(logger.compute('point', mean=False), dict(index=0., value=2.))

            line = logger.dumpf()
            with open(logger.dump_path) as f:
                self.assertEqual(f.read(), line + '\n')
            logger.reset()
            self.assertEqual(logger.compute('trial'), dict())


if __name__ == '__main__':
    unittest.main()
