#!/usr/bin/python
#-*- coding: utf-8 -*-

# ======================================================================
# Copyright 2017 Julien LE CLEACH
# 
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# 
#     http://www.apache.org/licenses/LICENSE-2.0
# 
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ======================================================================

import csv
import io
import json
import os
import shutil
import sys
import tempfile
import unittest

from decoykey.tests.configurations import (EmptyConfiguration, InvertedIntensitiesConfiguration, TalliesFile,
    ZeroTalliesFile)


# one second at 200 MHz
OneSecondConfiguration = """
[session]
total_pulses = 200000000
"""


class ControllerTest(unittest.TestCase):
    """ Test case for the decoykeyctl module. """

    def setUp(self):
        """ Create a temporary directory with configuration files. """
        self.tempdir = tempfile.mkdtemp()
        self.config = self.write('decoykey.ini', EmptyConfiguration)
        self.short_config = self.write('short.ini', OneSecondConfiguration)

    def tearDown(self):
        """ Delete the temporary directory. """
        shutil.rmtree(self.tempdir)

    def write(self, name, text):
        path = os.path.join(self.tempdir, name)
        with open(path, 'w') as stream:
            stream.write(text)
        return path

    def run_command(self, *args):
        """ Run decoykeyctl and return the exit code and the outputs. """
        from decoykey.decoykeyctl import main
        stdout, stderr = io.StringIO(), io.StringIO()
        code = main(list(args), stdout, stderr)
        return code, stdout.getvalue(), stderr.getvalue()

    @staticmethod
    def parse_lines(output):
        """ Return the name / value lines of the output as a dictionary. """
        return dict(line.split(None, 1) for line in output.splitlines() if line.strip())

    def test_keyrate(self):
        """ Test the keyrate command on the expected tallies of the experiment. """
        code, stdout, stderr = self.run_command('keyrate', '--config', self.config)
        self.assertEqual(0, code)
        self.assertEqual('', stderr)
        values = self.parse_lines(stdout)
        self.assertGreater(int(values['ell']), 0)
        self.assertEqual('false', values['aborted'])
        self.assertAlmostEqual(50.4, float(values['distance_km']), places=6)
        self.assertIn('phi1_zz_upper', values)
        self.assertIn('n_omega_x', values)

    def test_keyrate_tallies(self):
        """ Test the keyrate command on tallies files. """
        code, stdout, _ = self.run_command('keyrate', '--config', self.config,
            '--tallies', self.write('tallies.txt', TalliesFile))
        self.assertEqual(0, code)
        self.assertEqual('600', self.parse_lines(stdout)['m_omega_x'])
        code, stdout, _ = self.run_command('keyrate', '--config', self.config,
            '--tallies', self.write('zero.txt', ZeroTalliesFile))
        self.assertEqual(2, code)
        self.assertIn('insufficient statistics', stdout)
        self.assertEqual('0', self.parse_lines(stdout)['ell'])

    def test_input_errors(self):
        """ Test the exit code and message of invalid inputs. """
        code, _, stderr = self.run_command('keyrate', '--config',
            self.write('inverted.ini', InvertedIntensitiesConfiguration))
        self.assertEqual(1, code)
        self.assertTrue(stderr.startswith('ERROR (protocol.nu'))
        self.assertIn('mu > nu', stderr)
        code, _, stderr = self.run_command('keyrate', '--config', os.path.join(self.tempdir, 'missing.ini'))
        self.assertEqual(1, code)
        code, _, stderr = self.run_command('scan', '--config', self.config)
        self.assertEqual(1, code)
        self.assertTrue(stderr.startswith('ERROR (arguments'))
        code, _, stderr = self.run_command('scan', '--config', self.config, '--loss-min', '10', '--loss-max', '5',
            '--steps', '3')
        self.assertEqual(1, code)
        code, _, stderr = self.run_command('optimize', '--config', self.config, '--budget', '1', '--fixed', 'eps')
        self.assertEqual(1, code)

    def test_scan(self):
        """ Test the scan command over a range of losses. """
        code, stdout, _ = self.run_command('scan', '--config', self.config, '--loss-min', '0', '--loss-max', '30',
            '--steps', '31')
        self.assertEqual(0, code)
        rows = list(csv.reader(io.StringIO(stdout)))
        self.assertListEqual(['loss_db', 'ell', 'rate_per_second', 'phi_upper', 's1_lower'], rows[0])
        self.assertEqual(32, len(rows))
        losses = [float(row[0]) for row in rows[1:]]
        rates = [float(row[2]) for row in rows[1:]]
        self.assertEqual(0.0, losses[0])
        self.assertEqual(30.0, losses[-1])
        self.assertListEqual(sorted(rates, reverse=True), rates)
        self.assertGreater(rates[0], 0)

    def test_scan_single_point(self):
        """ Test that a scan with one point gives the key rate of the keyrate command. """
        code, stdout, _ = self.run_command('keyrate', '--config', self.config)
        rate = float(self.parse_lines(stdout)['rate_per_second'])
        out = os.path.join(self.tempdir, 'scan.csv')
        code, stdout, _ = self.run_command('--jobs', '2', 'scan', '--config', self.config, '--loss-min', '9.4',
            '--loss-max', '9.4', '--steps', '1', '--out', out)
        self.assertEqual(0, code)
        self.assertEqual('', stdout)
        with open(out) as stream:
            rows = list(csv.reader(stream))
        self.assertEqual(2, len(rows))
        self.assertEqual(rate, float(rows[1][2]))

    def test_simulate(self):
        """ Test the simulate command. """
        code, first, _ = self.run_command('simulate', '--config', self.short_config, '--seed', '12', '--reps', '3')
        self.assertEqual(0, code)
        _, second, _ = self.run_command('simulate', '--config', self.short_config, '--seed', '12', '--reps', '3')
        _, parallel, _ = self.run_command('--jobs', '3', 'simulate', '--config', self.short_config, '--seed', '12',
            '--reps', '3')
        self.assertEqual(first, second)
        self.assertEqual(first, parallel)
        lines = [json.loads(line) for line in first.splitlines()]
        self.assertEqual(3, len(lines))
        self.assertEqual(3, len({line['seed'] for line in lines}))
        for line in lines:
            self.assertIn('n_mu_z', line['tallies'])
            self.assertIn('ell', line['report'])
        _, other, _ = self.run_command('simulate', '--config', self.short_config, '--seed', '13', '--reps', '3')
        self.assertNotEqual(first, other)

    def test_simulation_seeds(self):
        """ Test the derivation of the session seeds. """
        from decoykey.decoykeyctl import simulation_seeds
        seeds = simulation_seeds(12, 5)
        self.assertEqual(5, len(seeds))
        self.assertEqual(seeds[:3], simulation_seeds(12, 3))
        for seed in seeds:
            self.assertTrue(0 <= seed < 2 ** 64)

    def test_optimize(self):
        """ Test the optimize command with a budget of one evaluation. """
        code, stdout, _ = self.run_command('optimize', '--config', self.short_config, '--budget', '1')
        self.assertEqual(0, code)
        values = self.parse_lines(stdout)
        self.assertEqual('0.35', values['mu'])
        self.assertEqual('0.0', values['improvement'])
        self.assertEqual('1', values['evaluations'])

    def test_optimize_write_back(self):
        """ Test that the written-back configuration reproduces the reported key rate. """
        from decoykey.decoykeyctl import Controller
        from decoykey.options import load_config
        code, stdout, _ = self.run_command('optimize', '--config', self.short_config, '--budget', '24',
            '--seed', '4', '--write-back', '--fixed', 'nu,omega')
        self.assertEqual(0, code)
        values = self.parse_lines(stdout)
        self.assertGreaterEqual(float(values['improvement']), 0)
        config = load_config(self.short_config)
        self.assertEqual(200000000, config.session.total_pulses)
        self.assertEqual(repr(config.protocol.mu), values['mu'])
        _, report = Controller(config, io.StringIO()).evaluate()
        self.assertEqual(float(values['rate_per_second']), report.rate_per_second)


def test_suite():
    return unittest.findTestCases(sys.modules[__name__])

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
