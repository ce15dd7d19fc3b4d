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

import os
import shutil
import sys
import tempfile
import unittest

from supervisor.loggers import LevelsByName

from decoykey.tests.configurations import (EmptyConfiguration, FullConfiguration,
    InvertedIntensitiesConfiguration, NotANumberConfiguration, TalliesFile, UnknownOptionConfiguration,
    UnknownSectionConfiguration, ZeroTalliesFile)


class ConfigLoaderTest(unittest.TestCase):
    """ Test case for the ConfigLoader class of the options module. """

    def test_empty(self):
        """ Test that a configuration without options gives the default values. """
        from decoykey.options import ConfigLoader, RunConfig
        config = ConfigLoader().read_string(EmptyConfiguration)
        self.assertEqual(RunConfig(), config)
        self.assertEqual(0.35, config.protocol.mu)
        self.assertEqual(12000000000, config.session.total_pulses)
        self.assertIsNone(config.logger.logfile)
        self.assertEqual(LevelsByName.WARN, config.logger.loglevel)

    def test_full(self):
        """ Test a configuration where all options are set. """
        from decoykey.options import ConfigLoader
        from decoykey.ttypes import SimulationModes
        config = ConfigLoader().read_string(FullConfiguration)
        self.assertEqual(12.5, config.channel.total_loss_db)
        self.assertEqual(2, config.channel.dead_time_channels_z)
        self.assertFalse(config.channel.sync_blanking)
        self.assertEqual(1.0, config.channel.blanking_factor())
        self.assertEqual(0.2, config.channel.fiber_db_per_km)
        self.assertEqual(0.4, config.protocol.mu)
        self.assertEqual(0.8, config.protocol.q_z)
        self.assertEqual(1e-9, config.security.eps_sec)
        self.assertEqual(0.1, config.security.phi_tol)
        self.assertEqual(1000000000, config.session.total_pulses)
        self.assertEqual(2 ** 64 - 1, config.session.rng_seed)
        self.assertEqual(SimulationModes.STOCHASTIC, config.session.mode)
        self.assertEqual(1.16, config.session.ec_inefficiency)
        self.assertEqual(10240, config.logger.logfile_maxbytes)
        self.assertEqual(3, config.logger.logfile_backups)
        self.assertEqual(LevelsByName.DEBG, config.logger.loglevel)

    def test_round_trip(self):
        """ Test that a serialized configuration parses to the same configuration. """
        from decoykey.options import ConfigLoader
        config = ConfigLoader().read_string(FullConfiguration)
        text = config.to_ini()
        self.assertIn('loglevel = debug', text)
        self.assertIn('mode = STOCHASTIC', text)
        self.assertIn('sync_blanking = false', text)
        self.assertEqual(config, ConfigLoader().read_string(text))
        self.assertEqual(text, ConfigLoader().read_string(text).to_ini())

    def test_errors(self):
        """ Test the field paths of the configuration errors. """
        from decoykey.options import ConfigLoader
        from decoykey.ttypes import InvalidParameter
        for text, field in [(UnknownOptionConfiguration, 'security.eps_pe'),
                (UnknownSectionConfiguration, 'detector'),
                (InvertedIntensitiesConfiguration, 'protocol.nu'),
                (NotANumberConfiguration, 'channel.dark_cps'),
                ('[session]\nmode = RANDOM\n', 'session.mode'),
                ('[session]\ntotal_pulses = 1.5\n', 'session.total_pulses'),
                ('[channel]\nsync_blanking = maybe\n', 'channel.sync_blanking'),
                ('[protocol]\nmu = inf\n', 'protocol.mu'),
                ('[logger]\nloglevel = verbose\n', 'logger.loglevel'),
                ('[logger]\nlogfile = /no/such/directory/decoykey.log\n', 'logger.logfile'),
                ('mu = 0.35\n', 'config')]:
            with self.assertRaises(InvalidParameter) as exc:
                ConfigLoader().read_string(text)
            self.assertEqual(field, exc.exception.field)

    def test_converters(self):
        """ Test the conversion utils. """
        from decoykey.options import ConfigLoader
        from decoykey.ttypes import SimulationModes
        self.assertEqual(12000000000, ConfigLoader.to_count('1.2e10'))
        self.assertEqual(12, ConfigLoader.to_count('12'))
        self.assertEqual(SimulationModes.EXPECTED, ConfigLoader.to_mode('expected'))
        self.assertIsNone(ConfigLoader.to_logfile(''))
        for value in ['nan', '-inf', 'abc']:
            with self.assertRaises(ValueError):
                ConfigLoader.to_float(value)


class FilesTest(unittest.TestCase):
    """ Test case for the file readers of the options module. """

    def setUp(self):
        """ Create a temporary directory. """
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        """ Delete the temporary directory. """
        shutil.rmtree(self.tempdir)

    def write(self, name, text):
        path = os.path.join(self.tempdir, name)
        with open(path, 'w') as stream:
            stream.write(text)
        return path

    def test_load_config(self):
        """ Test the reading of a configuration file. """
        from decoykey.options import RunConfig, load_config
        from decoykey.ttypes import InvalidParameter
        self.assertEqual(RunConfig(), load_config())
        logfile = os.path.join(self.tempdir, 'decoykey.log')
        path = self.write('decoykey.ini', FullConfiguration + 'logfile = {}\n'.format(logfile))
        config = load_config(path)
        self.assertEqual(12.5, config.channel.total_loss_db)
        self.assertEqual(logfile, config.logger.logfile)
        with self.assertRaises(InvalidParameter) as exc:
            load_config(os.path.join(self.tempdir, 'missing.ini'))
        self.assertEqual('config', exc.exception.field)

    def test_tallies(self):
        """ Test the reading of a tallies file. """
        from decoykey.options import parse_tallies, read_tallies
        from decoykey.ttypes import InvalidParameter
        tallies = read_tallies(self.write('tallies.txt', TalliesFile))
        self.assertEqual(1200000, tallies.n_mu_z)
        self.assertEqual(600, tallies.m_omega_x)
        self.assertEqual(90000.5, tallies.lambda_ec)
        self.assertEqual(0, parse_tallies(ZeroTalliesFile).n_omega_x)
        for text, field in [(TalliesFile.replace('n_0_x = 25\n', ''), 'tallies.n_0_x'),
                (TalliesFile + 'n_vac_x = 2\n', 'tallies.n_vac_x'),
                (TalliesFile.replace('n_0_x = 25', 'n_0_x = some'), 'tallies.n_0_x')]:
            with self.assertRaises(InvalidParameter) as exc:
                parse_tallies(text)
            self.assertEqual(field, exc.exception.field)
        with self.assertRaises(InvalidParameter) as exc:
            read_tallies(os.path.join(self.tempdir, 'missing.txt'))
        self.assertEqual('tallies', exc.exception.field)


def test_suite():
    return unittest.findTestCases(sys.modules[__name__])

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
