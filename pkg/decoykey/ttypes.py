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

from decoykey.utils import enumeration_tools


# all enumerations
@enumeration_tools
class Intensities:
    """ Enumeration class for the intensities prepared by the source. """
    MU, NU, OMEGA, VACUUM = range(4)

@enumeration_tools
class Bases:
    """ Enumeration class for the measurement bases of the receiver. """
    Z, X = range(2)

@enumeration_tools
class SimulationModes:
    """ Way a session is turned into tallies: exact expected values or seeded random draws. """
    EXPECTED, STOCHASTIC = range(2)

@enumeration_tools
class AbortReasons:
    """ Reasons for which a key length evaluation produces no key. """
    INSUFFICIENT_STATISTICS, PHASE_ERROR_ABOVE_TOLERANCE, PHASE_ERROR_TOO_HIGH, NON_POSITIVE_KEY, \
        EVALUATION_FAILED = range(5)


def abort_message(reason):
    """ Return a human readable form of an AbortReasons value. """
    name = AbortReasons._to_string(reason)
    return name.lower().replace('_', ' ') if name else None


# Exceptions
class InvalidParameter(ValueError):
    """ Exception used for a value that breaks an invariant of a domain type.
    The field is given as a path, e.g. protocol.nu. """
    def __init__(self, field, message):
        ValueError.__init__(self, field, message)
        self.field = field
        self.message = message

    def __str__(self):
        return '{}: {}'.format(self.field, self.message)


class InsufficientStatistics(Exception):
    """ Exception used when the single-photon statistics are too poor to bound the phase error rate. """
    def __init__(self, value):
        Exception.__init__(self, value)
        self.value = value

    def __str__(self):
        return self.value


class EstimationError(Exception):
    """ Exception used for any failure in a stage of the parameter estimation pipeline. """
    def __init__(self, stage, cause):
        Exception.__init__(self, stage, cause)
        self.stage = stage
        self.cause = cause

    def __str__(self):
        return '{} failed: {}'.format(self.stage, self.cause)
