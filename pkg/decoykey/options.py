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

import dataclasses
import io

from dataclasses import dataclass

from supervisor.datatypes import boolean, byte_size, existing_dirpath, integer, logging_level
from supervisor.loggers import LevelsByDescription, LevelsByName
from supervisor.options import UnhosedConfigParser

from decoykey.channelsim import ChannelModel, SessionPlan
from decoykey.keyengine import ObservedTallies, ProtocolParams, SecuritySettings
from decoykey.ttypes import InvalidParameter, SimulationModes
from decoykey.utils import enum_to_string


@dataclass(frozen=True)
class LoggerOptions:
    """ Holder of the logger options.

    Attributes are:

        - logfile: absolute or relative path of the log file, None to log on stderr,
        - logfile_maxbytes: maximum size of the log file,
        - logfile_backups: number of backup log files,
        - loglevel: logging level.
    """

    logfile: str = None
    logfile_maxbytes: int = 50 * 1024 * 1024
    logfile_backups: int = 10
    loglevel: int = LevelsByName.WARN


@dataclass(frozen=True)
class RunConfig:
    """ Complete configuration of a decoykeyctl run. """

    channel: ChannelModel = dataclasses.field(default_factory=ChannelModel)
    protocol: ProtocolParams = dataclasses.field(default_factory=ProtocolParams)
    security: SecuritySettings = dataclasses.field(default_factory=SecuritySettings)
    session: SessionPlan = dataclasses.field(default_factory=SessionPlan)
    logger: LoggerOptions = dataclasses.field(default_factory=LoggerOptions)

    def to_ini(self):
        """ Serialize the configuration so that parsing the result gives the same configuration. """
        return ConfigLoader.to_ini(self)


class ConfigLoader(object):
    """ Class used to parse the ini configuration file of decoykeyctl.

    Each section is converted into the corresponding type.
    An option that is not set takes the default value of its type.
    Unknown sections and options are rejected.
    """

    # converter per option of each section
    _Sections = {
        'channel': {'total_loss_db': 'to_float', 'det_eff_z': 'to_float', 'det_eff_x': 'to_float',
            'extra_loss_z_db': 'to_float', 'extra_loss_x_db': 'to_float', 'dark_cps': 'to_float',
            'misalignment_z': 'to_float', 'misalignment_x': 'to_float', 'dead_time_z': 'to_float',
            'dead_time_x': 'to_float', 'dead_time_channels_z': 'to_integer', 'dead_time_channels_x': 'to_integer',
            'clock_hz': 'to_float', 'gate_fraction': 'to_float', 'sync_blanking': 'to_boolean',
            'sync_rate_hz': 'to_float', 'sync_guard_s': 'to_float', 'fiber_db_per_km': 'to_float'},
        'protocol': {'mu': 'to_float', 'nu': 'to_float', 'omega': 'to_float', 'p_mu': 'to_float',
            'p_nu': 'to_float', 'p_omega': 'to_float', 'p_0': 'to_float', 'q_z': 'to_float'},
        'security': {'eps_sec': 'to_float', 'eps_cor': 'to_float', 'phi_tol': 'to_float'},
        'session': {'total_pulses': 'to_count', 'rng_seed': 'to_integer', 'mode': 'to_mode',
            'ec_inefficiency': 'to_float'},
        'logger': {'logfile': 'to_logfile', 'logfile_maxbytes': 'to_byte_size', 'logfile_backups': 'to_integer',
            'loglevel': 'to_logging_level'}}

    _Types = {'channel': ChannelModel, 'protocol': ProtocolParams, 'security': SecuritySettings,
        'session': SessionPlan, 'logger': LoggerOptions}

    def __init__(self):
        """ Initialization of the attributes. """
        self.source = None

    def read(self, filename):
        """ Parse the configuration file. """
        parser = UnhosedConfigParser()
        try:
            read_ok = parser.read(filename)
        except Exception as exc:
            raise InvalidParameter('config', 'could not parse {}: {}'.format(filename, exc))
        if not read_ok:
            raise InvalidParameter('config', 'could not read {}'.format(filename))
        self.source = filename
        return self.from_parser(parser)

    def read_string(self, text):
        """ Parse a configuration provided as a string. """
        parser = UnhosedConfigParser()
        try:
            parser.read_string(text)
        except Exception as exc:
            raise InvalidParameter('config', 'could not parse configuration: {}'.format(exc))
        self.source = '<string>'
        return self.from_parser(parser)

    def from_parser(self, parser):
        """ Build a RunConfig from a parser. """
        unknown = [section for section in parser.sections() if section not in self._Sections]
        if unknown:
            raise InvalidParameter(unknown[0], 'unknown section in {}'.format(self.source))
        return RunConfig(**{section: self.section_from_parser(parser, section) for section in self._Sections})

    def section_from_parser(self, parser, section):
        """ Convert the options of a section into its type. """
        converters = self._Sections[section]
        values = {}
        if parser.has_section(section):
            for option in parser.options(section):
                field_path = '{}.{}'.format(section, option)
                if option not in converters:
                    raise InvalidParameter(field_path, 'unknown option')
                value = parser.saneget(section, option, None)
                try:
                    values[option] = getattr(self, converters[option])(value)
                except InvalidParameter:
                    raise
                except ValueError as exc:
                    raise InvalidParameter(field_path, str(exc))
        return self._Types[section](**values)

    # conversion utils (completion of supervisor.datatypes)
    @staticmethod
    def to_float(value):
        """ Convert a string into a finite float. """
        try:
            result = float(value)
        except (TypeError, ValueError):
            raise ValueError('invalid value {}. expected float'.format(value))
        if result != result or result in (float('inf'), float('-inf')):
            raise ValueError('invalid value {}. expected finite float'.format(value))
        return result

    @staticmethod
    def to_integer(value):
        """ Convert a string into an integer. """
        return integer(value)

    @staticmethod
    def to_count(value):
        """ Convert a string into a count, accepting the scientific notation of integral values. """
        try:
            return integer(value)
        except ValueError:
            result = ConfigLoader.to_float(value)
            if not result.is_integer():
                raise ValueError('invalid value {}. expected integer'.format(value))
            return int(result)

    @staticmethod
    def to_boolean(value):
        return boolean(value)

    @staticmethod
    def to_mode(value):
        """ Convert a string into a SimulationModes enum. """
        mode = SimulationModes._from_string(value.upper())
        if mode is None:
            raise ValueError('invalid value {}. expected in {}'.format(value, SimulationModes._strings()))
        return mode

    @staticmethod
    def to_logfile(value):
        """ Convert a string into a logfile path. An empty value means stderr. """
        return existing_dirpath(value) if value else None

    @staticmethod
    def to_byte_size(value):
        return byte_size(value)

    @staticmethod
    def to_logging_level(value):
        return logging_level(value)

    # serialization
    @staticmethod
    def to_ini(config):
        """ Write a RunConfig in the ini format. Floats are written with repr. """
        output = io.StringIO()
        for section in ConfigLoader._Sections:
            output.write('[{}]\n'.format(section))
            item = getattr(config, section)
            for option in ConfigLoader._Sections[section]:
                output.write('{} = {}\n'.format(option, ConfigLoader._format(section, option,
                    getattr(item, option))))
            output.write('\n')
        return output.getvalue()

    @staticmethod
    def _format(section, option, value):
        """ Return the ini representation of an option value. """
        if section == 'session' and option == 'mode':
            return SimulationModes._to_string(value)
        if section == 'logger':
            if option == 'logfile':
                return value or ''
            if option == 'loglevel':
                return enum_to_string(LevelsByDescription.__dict__, value)
        if isinstance(value, bool):
            return 'true' if value else 'false'
        return repr(value)


def load_config(filename=None):
    """ Return the RunConfig of the file, or the default configuration when no file is given. """
    if filename is None:
        return RunConfig()
    return ConfigLoader().read(filename)


def to_number(value):
    """ Convert a string into an integer when possible, otherwise into a float. """
    try:
        return integer(value)
    except ValueError:
        return ConfigLoader.to_float(value)


def read_tallies(filename):
    """ Read a flat key-value tallies file. """
    try:
        with open(filename) as stream:
            text = stream.read()
    except (IOError, OSError) as exc:
        raise InvalidParameter('tallies', 'could not read {}: {}'.format(filename, exc))
    return parse_tallies(text)


def parse_tallies(text):
    """ Parse the content of a tallies file. """
    parser = UnhosedConfigParser()
    try:
        parser.read_string('[tallies]\n' + text)
    except Exception as exc:
        raise InvalidParameter('tallies', 'could not parse tallies: {}'.format(exc))
    values = {}
    for option in parser.options('tallies'):
        try:
            values[option] = to_number(parser.saneget('tallies', option, None))
        except ValueError as exc:
            raise InvalidParameter('tallies.' + option, str(exc))
    return ObservedTallies.from_mapping(values)
