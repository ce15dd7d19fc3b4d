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

import sys

import numpy as np

from supervisor.loggers import LevelsByName, StreamHandler, getLogger, handle_file


# logger output
LOGGER_FORMAT = '%(asctime)s %(levelname)s %(message)s\n'


# used to convert enumeration-like value to string and vice-versa
def enum_to_string(dico, idx_enum):
    """ Convert an enumeration value to a string. """
    return next((name for name, value in dico.items() if value == idx_enum and not name.startswith('_')), None)

def string_to_enum(dico, str_enum):
    """ Convert a string to an enumeration value. """
    return next((value for name, value in dico.items() if name == str_enum and not name.startswith('_')), None)

def enum_values(dico):
    """ Get all the values of an enumeration. """
    return [y for x, y in dico.items() if not x.startswith('_')]


def enumeration_tools(cls):
    """ Decorator for enumeration classes.
    Add class methods for conversion between string and enum, for listing enumeration values and strings. """
    def _to_string(cls, value):
        """ Convert the enum value into a string. """
        return enum_to_string(cls.__dict__, value)
    def _from_string(cls, str_enum):
        """ Convert a string into an enum value. """
        return string_to_enum(cls.__dict__, str_enum)
    def _values(cls):
        """ Return all enum values. """
        return sorted(enum_values(cls.__dict__))
    def _strings(cls):
        """ Return all enum values as string. """
        return [enum_to_string(cls.__dict__, value) for value in _values(cls)]
    setattr(cls, '_to_string', classmethod(_to_string))
    setattr(cls, '_from_string', classmethod(_from_string))
    setattr(cls, '_values', classmethod(_values))
    setattr(cls, '_strings', classmethod(_strings))
    return cls


# logger creation
def create_logger(logger_options=None, stream=None):
    """ Create a supervisor logger from the [logger] options.
    A file handler is used when a logfile is configured, otherwise log traces go to stderr
    so that stdout stays available for CSV / JSON output. """
    if logger_options is None:
        logger = getLogger(LevelsByName.WARN)
        handle_stderr(logger, stream)
        return logger
    logger = getLogger(logger_options.loglevel)
    if logger_options.logfile:
        handle_file(logger, logger_options.logfile, LOGGER_FORMAT, True,
            logger_options.logfile_maxbytes, logger_options.logfile_backups)
    else:
        handle_stderr(logger, stream)
    return logger

def handle_stderr(logger, stream=None):
    """ Same as supervisor handle_stdout, on stderr or on the stream provided. """
    handler = StreamHandler(stream or sys.stderr)
    handler.setFormat(LOGGER_FORMAT)
    handler.setLevel(logger.level)
    logger.addHandler(handler)

def silent_logger():
    """ Return a logger without handler, used when the caller does not provide one. """
    return getLogger(LevelsByName.CRIT)


# get statistics from data
def get_stats(lst):
    """ Calculate the following statistics from a series of values:
    - the mean value,
    - the standard deviation (None if there is only one value). """
    values = np.asarray(lst, dtype=float)
    avg = float(np.mean(values))
    dev = float(np.std(values)) if values.size > 1 else None
    return avg, dev
