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

import io
import sys
import unittest

from mock import patch

from supervisor.loggers import LevelsByName


class UtilsTest(unittest.TestCase):
    """ Test case for the utils module. """

    def test_enum(self):
        """ Test the enumeration tools. """
        from decoykey.utils import enumeration_tools
        @enumeration_tools
        class DummyEnum:
            ENUM_1, ENUM_2, ENUM_3 = range(3)
        # test _to_string
        self.assertEqual('ENUM_1', DummyEnum._to_string(DummyEnum.ENUM_1))
        self.assertEqual('ENUM_3', DummyEnum._to_string(2))
        self.assertIsNone(DummyEnum._to_string(-1))
        # test _from_string
        self.assertEqual(DummyEnum.ENUM_2, DummyEnum._from_string('ENUM_2'))
        self.assertIsNone(DummyEnum._from_string('ENUM_0'))
        self.assertIsNone(DummyEnum._from_string('_to_string'))
        # test _values
        self.assertListEqual([DummyEnum.ENUM_1, DummyEnum.ENUM_2, DummyEnum.ENUM_3], DummyEnum._values())
        # test _strings
        self.assertListEqual(['ENUM_1', 'ENUM_2', 'ENUM_3'], DummyEnum._strings())

    def test_stats(self):
        """ Test the statistics of a series of values. """
        from decoykey.utils import get_stats
        self.assertEqual((2.0, None), get_stats([2]))
        avg, dev = get_stats([1, 2, 3, 4])
        self.assertEqual(2.5, avg)
        self.assertAlmostEqual(1.118034, dev, places=6)
        # key lengths of simulated sessions come as integers
        avg, dev = get_stats([0, 0, 90, 110])
        self.assertIsInstance(avg, float)
        self.assertIsInstance(dev, float)
        self.assertEqual(50.0, avg)
        self.assertAlmostEqual(50.497525, dev, places=6)

    def test_default_logger(self):
        """ Test the logger created without options. """
        from decoykey.utils import create_logger
        stream = io.StringIO()
        logger = create_logger(stream=stream)
        self.assertEqual(LevelsByName.WARN, logger.level)
        logger.info('hidden')
        logger.warn('shown')
        self.assertNotIn('hidden', stream.getvalue())
        self.assertIn('WARN shown', stream.getvalue())

    def test_file_logger(self):
        """ Test the logger created with a logfile. """
        from decoykey.options import LoggerOptions
        from decoykey.utils import LOGGER_FORMAT, create_logger
        options = LoggerOptions(logfile='/tmp/decoykey.log', logfile_maxbytes=1024, logfile_backups=2,
            loglevel=LevelsByName.DEBG)
        with patch('decoykey.utils.handle_file') as mocked_file:
            logger = create_logger(options)
        self.assertEqual(LevelsByName.DEBG, logger.level)
        mocked_file.assert_called_once_with(logger, '/tmp/decoykey.log', LOGGER_FORMAT, True, 1024, 2)
        # no logfile: stderr or stream
        stream = io.StringIO()
        with patch('decoykey.utils.handle_file') as mocked_file:
            logger = create_logger(LoggerOptions(loglevel=LevelsByName.INFO), stream)
        self.assertFalse(mocked_file.called)
        logger.info('session done')
        self.assertIn('INFO session done', stream.getvalue())

    def test_silent_logger(self):
        """ Test the logger used when no logger is provided. """
        from decoykey.utils import silent_logger
        logger = silent_logger()
        self.assertEqual(LevelsByName.CRIT, logger.level)
        self.assertListEqual([], logger.handlers)


def test_suite():
    return unittest.findTestCases(sys.modules[__name__])

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
