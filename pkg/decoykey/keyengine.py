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
Parameter estimation and secret key length of the four-intensity decoy-state BB84 protocol.

The pipeline is fixed:

    1. observed counts -> bounds of their expected values,
    2. linear decoy combinations giving the expected vacuum / single-photon events and the vacuum errors,
    3. expected values -> bounds of the observed values,
    4. phase error rate of the single-photon events of the raw key, with the sampling correction,
    5. secret key length.

Exactly eight expected-value bounds, four observed-value bounds and one sampling correction
are computed per key length evaluation.
"""

import dataclasses
import math
import numbers

from contextlib import contextmanager
from dataclasses import dataclass, field

from decoykey import statbounds
from decoykey.ttypes import (AbortReasons, Bases, EstimationError, InsufficientStatistics,
    Intensities, InvalidParameter, abort_message)


# keys of the tallies, in file order
TALLY_KEYS = ('n_mu_z', 'n_nu_z', 'n_omega_z', 'n_0_z', 'n_mu_x', 'n_nu_x', 'n_omega_x', 'n_0_x',
    'm_omega_x', 'lambda_ec')

# fields of the protocol parameters, in file order
PROTOCOL_KEYS = ('mu', 'nu', 'omega', 'p_mu', 'p_nu', 'p_omega', 'p_0', 'q_z')

# name of the tally field per intensity and basis
TALLY_FIELDS = {(Intensities.MU, Bases.Z): 'n_mu_z', (Intensities.NU, Bases.Z): 'n_nu_z',
    (Intensities.OMEGA, Bases.Z): 'n_omega_z', (Intensities.VACUUM, Bases.Z): 'n_0_z',
    (Intensities.MU, Bases.X): 'n_mu_x', (Intensities.NU, Bases.X): 'n_nu_x',
    (Intensities.OMEGA, Bases.X): 'n_omega_x', (Intensities.VACUUM, Bases.X): 'n_0_x'}


def _check_open(field_path, value, low, high):
    """ Check that value is in ]low;high[. """
    if not (isinstance(value, numbers.Real) and low < value < high):
        raise InvalidParameter(field_path, 'invalid value {}. expected in ]{};{}['.format(value, low, high))


@dataclass(frozen=True)
class ProtocolParams:
    """ Intensities and probabilities of the source, basis probabilities of the receiver.

    The vacuum intensity is implicit. mu > nu is required by the decoy estimators. """

    mu: float = 0.35
    nu: float = 0.15
    omega: float = 0.3
    p_mu: float = 0.78
    p_nu: float = 0.1
    p_omega: float = 0.08
    p_0: float = 0.04
    q_z: float = 0.7

    def __post_init__(self):
        for name in ('mu', 'nu', 'omega'):
            _check_open('protocol.' + name, getattr(self, name), 0, math.inf)
        if self.mu <= self.nu:
            raise InvalidParameter('protocol.nu', 'invalid value {}. mu > nu required (mu={})'.format(self.nu, self.mu))
        for name in ('p_mu', 'p_nu', 'p_omega', 'p_0', 'q_z'):
            _check_open('protocol.' + name, getattr(self, name), 0, 1)
        total = self.p_mu + self.p_nu + self.p_omega + self.p_0
        if abs(total - 1) > 1e-9:
            raise InvalidParameter('protocol.p_0', 'source probabilities sum to {}. expected 1'.format(total))

    @property
    def q_x(self):
        """ Probability that the receiver measures in the X basis. """
        return 1 - self.q_z

    def intensity(self, intensity):
        """ Mean photon number of an Intensities value. """
        return {Intensities.MU: self.mu, Intensities.NU: self.nu,
            Intensities.OMEGA: self.omega, Intensities.VACUUM: 0.0}[intensity]

    def probability(self, intensity):
        """ Probability that the source selects an Intensities value. """
        return {Intensities.MU: self.p_mu, Intensities.NU: self.p_nu,
            Intensities.OMEGA: self.p_omega, Intensities.VACUUM: self.p_0}[intensity]

    def basis_probability(self, basis):
        """ Probability that the receiver measures in a Bases value. """
        return self.q_z if basis == Bases.Z else self.q_x

    def serial(self):
        """ Return a serializable form of the ProtocolParams. """
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class SecuritySettings:
    """ Failure probabilities and abort threshold. """

    eps_sec: float = 1e-10
    eps_cor: float = 1e-15
    phi_tol: float = 0.08

    def __post_init__(self):
        _check_open('security.eps_sec', self.eps_sec, 0, 1)
        _check_open('security.eps_cor', self.eps_cor, 0, 1)
        if not (isinstance(self.phi_tol, numbers.Real) and 0 < self.phi_tol <= 0.5):
            raise InvalidParameter('security.phi_tol', 'invalid value {}. expected in ]0;0.5]'.format(self.phi_tol))

    @property
    def beta(self):
        """ ln(22 / eps_sec) """
        return math.log(statbounds.ERROR_TERMS / self.eps_sec)

    def budget(self):
        """ Failure budget shared by all bound conversions. """
        return statbounds.FailureBudget(self.beta)

    def penalty_bits(self):
        """ Constant cost of error verification and privacy amplification. """
        return math.log2(2 / self.eps_cor) + 6 * math.log2(statbounds.ERROR_TERMS / self.eps_sec)

    def verification_bits(self):
        """ Size of the error verification tag. """
        return int(math.ceil(math.log2(1 / self.eps_cor)))

    def serial(self):
        """ Return a serializable form of the SecuritySettings. """
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ObservedTallies:
    """ Event counts per intensity and measured basis, X-basis bit errors of the omega intensity
    and error correction leakage. """

    n_mu_z: int = 0
    n_nu_z: int = 0
    n_omega_z: int = 0
    n_0_z: int = 0
    n_mu_x: int = 0
    n_nu_x: int = 0
    n_omega_x: int = 0
    n_0_x: int = 0
    m_omega_x: int = 0
    lambda_ec: float = 0.0

    def __post_init__(self):
        for name in TALLY_KEYS[:-1]:
            value = getattr(self, name)
            if isinstance(value, numbers.Real) and not isinstance(value, numbers.Integral) \
                    and float(value).is_integer():
                value = int(value)
            if not isinstance(value, numbers.Integral) or value < 0:
                raise InvalidParameter('tallies.' + name, 'invalid value {}. expected integer >= 0'.format(value))
            object.__setattr__(self, name, int(value))
        if self.m_omega_x > self.n_omega_x:
            raise InvalidParameter('tallies.m_omega_x',
                'invalid value {}. expected <= n_omega_x={}'.format(self.m_omega_x, self.n_omega_x))
        if not (isinstance(self.lambda_ec, numbers.Real) and math.isfinite(self.lambda_ec) and self.lambda_ec >= 0):
            raise InvalidParameter('tallies.lambda_ec', 'invalid value {}. expected >= 0'.format(self.lambda_ec))
        object.__setattr__(self, 'lambda_ec', float(self.lambda_ec))

    @classmethod
    def from_mapping(cls, values):
        """ Create tallies from a dictionary using the TALLY_KEYS names. """
        unknown = set(values) - set(TALLY_KEYS)
        if unknown:
            raise InvalidParameter('tallies.' + sorted(unknown)[0], 'unknown key')
        missing = [key for key in TALLY_KEYS if key not in values]
        if missing:
            raise InvalidParameter('tallies.' + missing[0], 'missing key')
        return cls(**values)

    def count(self, intensity, basis):
        """ Number of events of an intensity measured in a basis. """
        return getattr(self, TALLY_FIELDS[intensity, basis])

    def signal_z(self):
        """ Size of the raw key: events of the mu and nu intensities measured in Z. """
        return self.n_mu_z + self.n_nu_z

    def serial(self):
        """ Return a serializable form of the ObservedTallies. """
        return {key: getattr(self, key) for key in TALLY_KEYS}


@dataclass
class EstimationBreakdown:
    """ All the intermediate values of the parameter estimation.

    Names ending with _exp are bounds of expected values, the others are bounds of observed values. """

    # expected-value bounds of the observed counts
    n_0_z_lower_exp: float = 0.0
    n_nu_z_lower_exp: float = 0.0
    n_mu_z_upper_exp: float = 0.0
    n_0_z_upper_exp: float = 0.0
    n_nu_x_lower_exp: float = 0.0
    n_mu_x_upper_exp: float = 0.0
    n_0_x_upper_exp: float = 0.0
    n_0_x_lower_exp: float = 0.0
    # decoy estimations
    s0_zz_lower_exp: float = 0.0
    s1_zz_lower_exp: float = 0.0
    s1_xx_lower_exp: float = 0.0
    t0_xx_lower_exp: float = 0.0
    # observed-value bounds
    s0_zz_lower: float = 0.0
    s1_zz_lower: float = 0.0
    s1_xx_lower: float = 0.0
    t0_xx_lower: float = 0.0
    t1_xx_upper: float = 0.0
    # phase error rate
    gamma: float = 0.0
    phi1_zz_upper: float = 1.0
    qber_x: float = 0.0
    raw_length: float = 0.0

    def serial(self):
        """ Return a serializable form of the EstimationBreakdown. """
        return dataclasses.asdict(self)


@dataclass
class KeyRateReport:
    """ Result of a key length evaluation. """

    ell: int
    aborted: bool
    abort_reason: int
    rate_per_pulse: float
    rate_per_second: float
    total_pulses: int
    clock_hz: float
    penalty_bits: float
    verification_bits: int
    breakdown: EstimationBreakdown = field(default_factory=EstimationBreakdown)

    @classmethod
    def abort(cls, reason, settings, total_pulses, clock_hz, breakdown=None):
        """ Create the report of an evaluation that produced no key. """
        return cls(ell=0, aborted=True, abort_reason=reason, rate_per_pulse=0.0, rate_per_second=0.0,
            total_pulses=total_pulses, clock_hz=clock_hz, penalty_bits=settings.penalty_bits(),
            verification_bits=settings.verification_bits(),
            breakdown=breakdown if breakdown is not None else EstimationBreakdown())

    def abort_message(self):
        """ Return the abort reason as a readable string, None if the key is valid. """
        return abort_message(self.abort_reason) if self.aborted else None

    def serial(self):
        """ Return a serializable form of the KeyRateReport. """
        return {'ell': self.ell, 'aborted': self.aborted, 'abort_reason': self.abort_message(),
            'rate_per_pulse': self.rate_per_pulse, 'rate_per_second': self.rate_per_second,
            'total_pulses': self.total_pulses, 'clock_hz': self.clock_hz,
            'penalty_bits': self.penalty_bits, 'verification_bits': self.verification_bits,
            'breakdown': self.breakdown.serial()}


# operations
def binary_entropy(x):
    """ h(x) = -x.log2(x) - (1-x).log2(1-x), with h(0) = h(1) = 0. """
    if not 0 <= x <= 1:
        raise InvalidParameter('x', 'invalid value {}. expected in [0;1]'.format(x))
    if x == 0 or x == 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _decoy_denominator(params):
    """ mu.nu - nu^2, strictly positive only if mu > nu. """
    if params.mu <= params.nu:
        raise InvalidParameter('protocol.nu', 'mu > nu required (mu={}, nu={})'.format(params.mu, params.nu))
    return params.mu * params.nu - params.nu * params.nu

def _decoy_bracket(n_nu, n_mu, n_0, params):
    """ Combination of the expected counts of the nu, mu and vacuum intensities
    that isolates the single-photon yield. """
    mu, nu = params.mu, params.nu
    return (math.exp(nu) * n_nu / params.p_nu
        - nu * nu / (mu * mu) * math.exp(mu) * n_mu / params.p_mu
        - (mu * mu - nu * nu) / (mu * mu) * n_0 / params.p_0)


def estimate_vacuum_z(tallies, params, settings, breakdown=None):
    """ Lower bound of the expected number of vacuum events in the raw key. """
    n_0 = statbounds.expected_lower(tallies.n_0_z, settings.budget())
    s0 = (math.exp(-params.mu) * params.p_mu + math.exp(-params.nu) * params.p_nu) * n_0 / params.p_0
    if breakdown is not None:
        breakdown.n_0_z_lower_exp = n_0
        breakdown.s0_zz_lower_exp = s0
    return s0

def estimate_single_z(tallies, params, settings, breakdown=None):
    """ Lower bound of the expected number of single-photon events in the raw key. """
    denominator = _decoy_denominator(params)
    budget = settings.budget()
    n_nu = statbounds.expected_lower(tallies.n_nu_z, budget)
    n_mu = statbounds.expected_upper(tallies.n_mu_z, budget)
    n_0 = statbounds.expected_upper(tallies.n_0_z, budget)
    mu, nu = params.mu, params.nu
    prefactor = (mu * mu * math.exp(-mu) * params.p_mu + mu * nu * math.exp(-nu) * params.p_nu) / denominator
    s1 = max(0.0, prefactor * _decoy_bracket(n_nu, n_mu, n_0, params))
    if breakdown is not None:
        breakdown.n_nu_z_lower_exp = n_nu
        breakdown.n_mu_z_upper_exp = n_mu
        breakdown.n_0_z_upper_exp = n_0
        breakdown.s1_zz_lower_exp = s1
    return s1

def estimate_single_x(tallies, params, settings, breakdown=None):
    """ Lower bound of the expected number of single-photon events
    of the omega intensity measured in X.
    Relies on the equality of the single-photon yields of both preparation bases
    for a given measurement basis. """
    denominator = _decoy_denominator(params)
    budget = settings.budget()
    n_nu = statbounds.expected_lower(tallies.n_nu_x, budget)
    n_mu = statbounds.expected_upper(tallies.n_mu_x, budget)
    n_0 = statbounds.expected_upper(tallies.n_0_x, budget)
    prefactor = params.mu * params.omega * math.exp(-params.omega) * params.p_omega / denominator
    s1 = max(0.0, prefactor * _decoy_bracket(n_nu, n_mu, n_0, params))
    if breakdown is not None:
        breakdown.n_nu_x_lower_exp = n_nu
        breakdown.n_mu_x_upper_exp = n_mu
        breakdown.n_0_x_upper_exp = n_0
        breakdown.s1_xx_lower_exp = s1
    return s1

def estimate_errors_x(tallies, params, settings, breakdown=None):
    """ Lower bound of the observed vacuum errors and upper bound of the observed single-photon errors
    of the omega intensity measured in X.
    Vacuum events give a random bit, so half of them are errors. """
    budget = settings.budget()
    n_0 = statbounds.expected_lower(tallies.n_0_x, budget)
    t0_exp = math.exp(-params.omega) * params.p_omega / (2 * params.p_0) * n_0
    t0 = statbounds.observed_lower(t0_exp, budget)
    t1 = max(0.0, tallies.m_omega_x - t0)
    if breakdown is not None:
        breakdown.n_0_x_lower_exp = n_0
        breakdown.t0_xx_lower_exp = t0_exp
        breakdown.t0_xx_lower = t0
        breakdown.t1_xx_upper = t1
    return t0, t1

def phase_error_rate(breakdown, settings):
    """ Upper bound of the phase error rate of the single-photon events of the raw key.

    The X-basis error rate is clamped at one-event granularity before the sampling correction. """
    s1_zz, s1_xx = breakdown.s1_zz_lower, breakdown.s1_xx_lower
    if s1_xx < 1:
        raise InsufficientStatistics('insufficient X-basis statistics (s1_xx={})'.format(s1_xx))
    if s1_zz < 1:
        raise InsufficientStatistics('insufficient Z-basis statistics (s1_zz={})'.format(s1_zz))
    floor = 1.0 / (s1_zz + s1_xx)
    rate = min(max(breakdown.t1_xx_upper / s1_xx, floor), 1 - floor)
    gamma = statbounds.gamma_u(s1_zz, s1_xx, rate, settings.eps_sec / statbounds.ERROR_TERMS)
    phi = min(1.0, rate + gamma)
    breakdown.gamma = gamma
    breakdown.phi1_zz_upper = phi
    return phi


@contextmanager
def _stage(name):
    """ Attach the stage name to any error raised in the block. """
    try:
        yield
    except InsufficientStatistics:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise EstimationError(name, exc) from exc


def key_length(tallies, params, settings, total_pulses, clock_hz):
    """ Run the full parameter estimation and return the secret key length report. """
    if not (isinstance(total_pulses, numbers.Integral) and total_pulses >= 1):
        raise InvalidParameter('session.total_pulses', 'invalid value {}. expected integer >= 1'.format(total_pulses))
    _check_open('channel.clock_hz', clock_hz, 0, math.inf)
    breakdown = EstimationBreakdown()
    if tallies.n_omega_x:
        breakdown.qber_x = tallies.m_omega_x / tallies.n_omega_x
    # decoy estimations on expected values
    with _stage('vacuum estimation in Z'):
        s0_exp = estimate_vacuum_z(tallies, params, settings, breakdown)
    with _stage('single-photon estimation in Z'):
        s1_zz_exp = estimate_single_z(tallies, params, settings, breakdown)
    with _stage('single-photon estimation in X'):
        s1_xx_exp = estimate_single_x(tallies, params, settings, breakdown)
    with _stage('bit error estimation in X'):
        estimate_errors_x(tallies, params, settings, breakdown)
    # back to observed values, capped by the physical totals
    with _stage('observed bounds'):
        budget = settings.budget()
        raw_key = tallies.signal_z()
        breakdown.s0_zz_lower = min(statbounds.observed_lower(s0_exp, budget), float(raw_key))
        breakdown.s1_zz_lower = min(statbounds.observed_lower(s1_zz_exp, budget), float(raw_key))
        breakdown.s1_xx_lower = min(statbounds.observed_lower(s1_xx_exp, budget), float(tallies.n_omega_x))
    try:
        with _stage('phase error rate'):
            phi = phase_error_rate(breakdown, settings)
    except InsufficientStatistics:
        return KeyRateReport.abort(AbortReasons.INSUFFICIENT_STATISTICS, settings, total_pulses, clock_hz, breakdown)
    # abort conditions of the protocol
    if phi >= 0.5:
        return KeyRateReport.abort(AbortReasons.PHASE_ERROR_TOO_HIGH, settings, total_pulses, clock_hz, breakdown)
    if phi > settings.phi_tol:
        return KeyRateReport.abort(AbortReasons.PHASE_ERROR_ABOVE_TOLERANCE, settings, total_pulses, clock_hz,
            breakdown)
    with _stage('key length'):
        raw = (breakdown.s0_zz_lower + breakdown.s1_zz_lower * (1 - binary_entropy(phi))
            - tallies.lambda_ec - settings.penalty_bits())
    breakdown.raw_length = raw
    if raw < 0:
        return KeyRateReport.abort(AbortReasons.NON_POSITIVE_KEY, settings, total_pulses, clock_hz, breakdown)
    ell = int(math.floor(raw))
    rate_per_pulse = ell / total_pulses
    return KeyRateReport(ell=ell, aborted=False, abort_reason=None, rate_per_pulse=rate_per_pulse,
        rate_per_second=rate_per_pulse * clock_hz, total_pulses=int(total_pulses), clock_hz=clock_hz,
        penalty_bits=settings.penalty_bits(), verification_bits=settings.verification_bits(),
        breakdown=breakdown)
