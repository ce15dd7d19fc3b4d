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

"""
Concentration bounds used by the parameter estimation.

Three conversions are provided:

    - expected_upper / expected_lower: from an observed count to the bounds of its expected value
      (variant of the Chernoff bound),
    - observed_upper / observed_lower: from an expected value to the bounds of the observed count
      (Chernoff bound),
    - gamma_u: correction applied to an error rate observed on a sample, to bound the error rate
      of the unsampled population (random sampling without replacement).

All of them share the same failure weight beta = ln(22 / eps_sec).
"""

import math

from decoykey.ttypes import InvalidParameter


# number of error terms composing the secrecy parameter
ERROR_TERMS = 22


class FailureBudget(object):
    """ Holder of the log-inverse failure weight applied to every bound.

    Attributes are:

        - beta: ln(ERROR_TERMS / eps_sec), strictly positive and finite.
    """

    __slots__ = ('beta', )

    def __init__(self, beta):
        """ Initialization of the attributes. """
        beta = float(beta)
        if not math.isfinite(beta) or beta <= 0:
            raise InvalidParameter('beta', 'invalid value {}. expected finite and > 0'.format(beta))
        self.beta = beta

    @classmethod
    def from_eps_sec(cls, eps_sec):
        """ Create the budget corresponding to a secrecy failure probability. """
        if not 0 < eps_sec < 1:
            raise InvalidParameter('eps_sec', 'invalid value {}. expected in ]0;1['.format(eps_sec))
        return cls(math.log(ERROR_TERMS / eps_sec))

    def __eq__(self, other):
        return isinstance(other, FailureBudget) and self.beta == other.beta

    def __hash__(self):
        return hash(self.beta)

    def __repr__(self):
        return 'FailureBudget(beta={!r})'.format(self.beta)


def _check_count(value, name):
    """ Reject negative or non-finite counts. """
    if not math.isfinite(value) or value < 0:
        raise InvalidParameter(name, 'invalid value {}. expected finite and >= 0'.format(value))


# observed -> expected
def expected_upper(x, budget):
    """ Upper bound of the expected value of an observed count x. """
    _check_count(x, 'x')
    beta = budget.beta
    return x + beta + math.sqrt(2 * beta * x + beta * beta)

def expected_lower(x, budget):
    """ Lower bound of the expected value of an observed count x, clamped at 0. """
    _check_count(x, 'x')
    beta = budget.beta
    return max(0.0, x - beta / 2 - math.sqrt(2 * beta * x + beta * beta / 4))


# expected -> observed
def observed_upper(x_star, budget):
    """ Upper bound of the observed count corresponding to an expected value x_star. """
    _check_count(x_star, 'x_star')
    beta = budget.beta
    return x_star + beta / 2 + math.sqrt(2 * beta * x_star + beta * beta / 4)

def observed_lower(x_star, budget):
    """ Lower bound of the observed count corresponding to an expected value x_star, clamped at 0. """
    _check_count(x_star, 'x_star')
    return max(0.0, x_star - math.sqrt(2 * budget.beta * x_star))


# random sampling without replacement
def gamma_u(n, k, rate, epsilon):
    """ Deviation between the error rate observed on a sample of k elements
    and the error rate of the n remaining elements.

    rate must be strictly inside ]0;1[. The caller clamps it at one-event granularity beforehand. """
    if not (math.isfinite(n) and n >= 1):
        raise InvalidParameter('n', 'invalid value {}. expected >= 1'.format(n))
    if not (math.isfinite(k) and k >= 1):
        raise InvalidParameter('k', 'invalid value {}. expected >= 1'.format(k))
    if not 0 < rate < 1:
        raise InvalidParameter('lambda', 'invalid value {}. expected in ]0;1['.format(rate))
    if not 0 < epsilon < 1:
        raise InvalidParameter('epsilon', 'invalid value {}. expected in ]0;1['.format(epsilon))
    total = n + k
    product = n * k
    spread = rate * (1 - rate)
    a = max(n, k)
    g = total / product * math.log(total / (2 * math.pi * product * spread * epsilon * epsilon))
    # logarithm argument below 1: no correction
    g = max(0.0, g)
    numerator = (1 - 2 * rate) * a * g / total + math.sqrt(a * a * g * g / (total * total) + 4 * spread * g)
    return numerator / (2 + 2 * a * a * g / (total * total))
