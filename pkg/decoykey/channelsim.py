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
Model of the time-phase encoding link: weak coherent source, fiber, passive basis choice
and gated detectors with dead time.

A session turns a ChannelModel, ProtocolParams and SessionPlan into ObservedTallies,
together with a TruthRecord giving the photon-number decomposition of every tally.
"""

import dataclasses
import math
import numbers

from dataclasses import dataclass

import numpy as np

from scipy.stats import poisson

from decoykey.keyengine import TALLY_FIELDS, ObservedTallies, binary_entropy
from decoykey.ttypes import Bases, Intensities, InvalidParameter, SimulationModes
from decoykey.utils import silent_logger


# photon numbers resolved in the yields
PHOTON_CUTOFF = 30

# 60 seconds at 200 MHz
DEFAULT_TOTAL_PULSES = 12000000000


def _check(field_path, condition, value, expected):
    """ Raise an InvalidParameter if condition is not met. """
    if not condition:
        raise InvalidParameter(field_path, 'invalid value {}. expected {}'.format(value, expected))

def _is_real(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value)


@dataclass(frozen=True)
class ChannelModel:
    """ Losses, detectors and timing of the link.

    Attributes are:

        - total_loss_db: attenuation of the fiber,
        - det_eff_z / det_eff_x: efficiency of the detectors of each basis,
        - extra_loss_z_db / extra_loss_x_db: insertion loss of each arm of the receiver,
        - dark_cps: dark counts per second of a detector,
        - misalignment_z / misalignment_x: intrinsic error rate of each basis,
        - dead_time_z / dead_time_x: dead time of the detectors of each basis, in seconds,
        - dead_time_channels_z / dead_time_channels_x: number of detectors sharing the click rate of a basis,
        - clock_hz: pulse repetition rate,
        - gate_fraction: fraction of the dark counts falling in the effective gate,
        - sync_blanking: when True, the counts around the synchronization pulses are discarded,
        - sync_rate_hz / sync_guard_s: rate of the synchronization pulses and half-width of the discarded window,
        - fiber_db_per_km: fiber attenuation, only used to express the loss as a distance.
    """

    total_loss_db: float = 9.4
    det_eff_z: float = 0.2
    det_eff_x: float = 0.2
    extra_loss_z_db: float = 0.0
    extra_loss_x_db: float = 1.8
    dark_cps: float = 120.0
    misalignment_z: float = 0.005
    misalignment_x: float = 0.015
    dead_time_z: float = 3e-6
    dead_time_x: float = 5e-6
    dead_time_channels_z: int = 1
    dead_time_channels_x: int = 1
    clock_hz: float = 2e8
    gate_fraction: float = 0.09
    sync_blanking: bool = True
    sync_rate_hz: float = 1e5
    sync_guard_s: float = 1e-7
    fiber_db_per_km: float = 9.4 / 50.4

    def __post_init__(self):
        for name in ('total_loss_db', 'extra_loss_z_db', 'extra_loss_x_db', 'dark_cps', 'dead_time_z',
                'dead_time_x', 'sync_rate_hz', 'sync_guard_s'):
            value = getattr(self, name)
            _check('channel.' + name, _is_real(value) and value >= 0, value, '>= 0')
        for name in ('det_eff_z', 'det_eff_x', 'gate_fraction'):
            value = getattr(self, name)
            _check('channel.' + name, _is_real(value) and 0 < value <= 1, value, 'in ]0;1]')
        for name in ('misalignment_z', 'misalignment_x'):
            value = getattr(self, name)
            _check('channel.' + name, _is_real(value) and 0 <= value <= 0.5, value, 'in [0;0.5]')
        for name in ('dead_time_channels_z', 'dead_time_channels_x'):
            value = getattr(self, name)
            _check('channel.' + name, isinstance(value, numbers.Integral) and value >= 1, value, 'integer >= 1')
        for name in ('clock_hz', 'fiber_db_per_km'):
            value = getattr(self, name)
            _check('channel.' + name, _is_real(value) and value > 0, value, '> 0')
        _check('channel.sync_guard_s', 2 * self.sync_rate_hz * self.sync_guard_s < 1, self.sync_guard_s,
            'a discarded window shorter than the synchronization period')

    # per-basis accessors
    def efficiency(self, basis):
        return self.det_eff_z if basis == Bases.Z else self.det_eff_x

    def extra_loss_db(self, basis):
        return self.extra_loss_z_db if basis == Bases.Z else self.extra_loss_x_db

    def misalignment(self, basis):
        return self.misalignment_z if basis == Bases.Z else self.misalignment_x

    def dead_time(self, basis):
        return self.dead_time_z if basis == Bases.Z else self.dead_time_x

    def dead_time_channels(self, basis):
        return self.dead_time_channels_z if basis == Bases.Z else self.dead_time_channels_x

    def transmittance(self, basis):
        """ Overall transmittance from the source to a click in the basis, detector efficiency included. """
        return self.efficiency(basis) * 10 ** (-(self.total_loss_db + self.extra_loss_db(basis)) / 10)

    def dark_probability(self):
        """ Probability of a dark count in one detector for one pulse. """
        return self.dark_cps * self.gate_fraction / self.clock_hz

    def blanking_factor(self):
        """ Fraction of the pulses kept after the synchronization blanking. """
        if self.sync_blanking:
            return 1 - 2 * self.sync_rate_hz * self.sync_guard_s
        return 1.0

    def distance_km(self):
        """ Fiber length corresponding to the channel loss. """
        return self.total_loss_db / self.fiber_db_per_km

    def with_loss(self, loss_db):
        """ Return the same model with another channel loss. """
        return dataclasses.replace(self, total_loss_db=loss_db)

    def serial(self):
        """ Return a serializable form of the ChannelModel. """
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class SessionPlan:
    """ Number of pulses emitted, seed of the random generator and simulation mode.
    ec_inefficiency is the ratio between the error correction leakage and the Shannon limit. """

    total_pulses: int = DEFAULT_TOTAL_PULSES
    rng_seed: int = 0
    mode: int = SimulationModes.EXPECTED
    ec_inefficiency: float = 1.42

    def __post_init__(self):
        _check('session.total_pulses', isinstance(self.total_pulses, numbers.Integral) and self.total_pulses >= 1,
            self.total_pulses, 'integer >= 1')
        _check('session.rng_seed', isinstance(self.rng_seed, numbers.Integral) and 0 <= self.rng_seed < 2 ** 64,
            self.rng_seed, 'integer in [0;2^64[')
        _check('session.mode', self.mode in SimulationModes._values(), self.mode,
            'in {}'.format(SimulationModes._strings()))
        _check('session.ec_inefficiency', _is_real(self.ec_inefficiency) and self.ec_inefficiency >= 1,
            self.ec_inefficiency, '>= 1')

    def serial(self):
        """ Return a serializable form of the SessionPlan. """
        return {'total_pulses': self.total_pulses, 'rng_seed': self.rng_seed,
            'mode': SimulationModes._to_string(self.mode), 'ec_inefficiency': self.ec_inefficiency}


@dataclass(frozen=True, eq=False)
class PulseProbabilities:
    """ Click and error probabilities of one pulse of a given intensity routed to a basis.

    weights, yields and error_yields are indexed by photon number, up to PHOTON_CUTOFF. """

    detection: float
    error: float
    weights: np.ndarray
    yields: np.ndarray
    error_yields: np.ndarray
    basis_probability: float

    def photon_classes(self):
        """ Split detection and error probabilities into vacuum, single-photon and multi-photon parts.
        The multi-photon part is the exact remainder. """
        q = self.basis_probability
        vacuum = q * self.weights[0] * self.yields[0]
        single = q * self.weights[1] * self.yields[1]
        multi = max(0.0, self.detection - vacuum - single)
        vacuum_errors = q * self.weights[0] * self.error_yields[0]
        single_errors = q * self.weights[1] * self.error_yields[1]
        multi_errors = min(max(0.0, self.error - vacuum_errors - single_errors), multi)
        return (float(vacuum), float(single), float(multi)), \
            (float(vacuum_errors), float(single_errors), float(multi_errors))


@dataclass(frozen=True)
class PhotonClassCounts:
    """ Events and errors of one tally, split by photon number of the emitted pulse. """

    vacuum: float = 0.0
    single: float = 0.0
    multi: float = 0.0
    vacuum_errors: float = 0.0
    single_errors: float = 0.0
    multi_errors: float = 0.0

    def events(self):
        return self.vacuum + self.single + self.multi

    def errors(self):
        return self.vacuum_errors + self.single_errors + self.multi_errors

    def serial(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class TruthRecord:
    """ Photon-number decomposition of the tallies of a session.

    Attributes are:

        - events: a dictionary of PhotonClassCounts per (intensity, basis),
        - throughput: the dead-time and blanking factor applied per basis,
        - qber_z: the bit error rate of the raw key.
    """

    events: dict
    throughput: dict
    qber_z: float

    def _sum(self, attribute, intensities, basis):
        return sum(getattr(self.events[intensity, basis], attribute) for intensity in intensities)

    def vacuum_zz(self):
        """ Vacuum events in the raw key. """
        return self._sum('vacuum', (Intensities.MU, Intensities.NU), Bases.Z)

    def single_zz(self):
        """ Single-photon events in the raw key. """
        return self._sum('single', (Intensities.MU, Intensities.NU), Bases.Z)

    def single_xx(self):
        """ Single-photon events of the omega intensity measured in X. """
        return self.events[Intensities.OMEGA, Bases.X].single

    def single_errors_xx(self):
        """ Bit errors of the single-photon events of the omega intensity measured in X. """
        return self.events[Intensities.OMEGA, Bases.X].single_errors

    def serial(self):
        """ Return a serializable form of the TruthRecord. """
        return {'events': {'{}_{}'.format(Intensities._to_string(k).lower(), Bases._to_string(b).lower()):
                counts.serial() for (k, b), counts in sorted(self.events.items())},
            'throughput': {Bases._to_string(b).lower(): value for b, value in sorted(self.throughput.items())},
            'qber_z': self.qber_z}


# operations
def per_pulse_probabilities(model, params, intensity, basis):
    """ Click and error probabilities of a pulse of an intensity measured in a basis,
    before dead time and blanking. """
    k = params.intensity(intensity)
    q = params.basis_probability(basis)
    eta = model.transmittance(basis)
    p_dc = model.dark_probability()
    e_mis = model.misalignment(basis)
    # (1 - p_dc)^2: no dark count in either detector of the basis
    log_no_dark = 2 * math.log1p(-p_dc)
    detection = q * -math.expm1(log_no_dark - k * eta)
    error = min(q * (p_dc + e_mis * -math.expm1(-k * eta)), detection)
    photons = np.arange(PHOTON_CUTOFF + 1)
    if k > 0:
        weights = poisson.pmf(photons, k)
    else:
        weights = np.zeros(PHOTON_CUTOFF + 1)
        weights[0] = 1.0
    log_lost = photons * math.log1p(-eta) if eta < 1 else np.where(photons > 0, -np.inf, 0.0)
    yields = -np.expm1(log_no_dark + log_lost)
    error_yields = np.minimum(p_dc + e_mis * -np.expm1(log_lost), yields)
    return PulseProbabilities(detection=detection, error=error, weights=weights, yields=yields,
        error_yields=error_yields, basis_probability=q)


def dead_time_factor(model, raw_rate_per_detector_hz, basis):
    """ Throughput of a non-paralyzable detector receiving a raw click rate. """
    _check('raw_rate_per_detector_hz', _is_real(raw_rate_per_detector_hz) and raw_rate_per_detector_hz >= 0,
        raw_rate_per_detector_hz, '>= 0')
    return 1.0 / (1.0 + raw_rate_per_detector_hz * model.dead_time(basis))


def _throughput(model, params, probabilities):
    """ Dead-time and blanking factor per basis, from the mean raw click rate of the basis. """
    throughput = {}
    for basis in Bases._values():
        raw_rate = model.clock_hz * sum(params.probability(intensity) * probabilities[intensity, basis].detection
            for intensity in Intensities._values())
        per_detector = raw_rate / model.dead_time_channels(basis)
        throughput[basis] = dead_time_factor(model, per_detector, basis) * model.blanking_factor()
    return throughput


def _expected_counts(params, plan, probabilities, throughput):
    """ Expected events and errors of every tally. """
    counts = {}
    for (intensity, basis), pulse in probabilities.items():
        scale = plan.total_pulses * params.probability(intensity) * throughput[basis]
        events, errors = pulse.photon_classes()
        counts[intensity, basis] = PhotonClassCounts(*(scale * value for value in events + errors))
    return counts


def _drawn_counts(params, plan, probabilities, throughput):
    """ Random events and errors of every tally, drawn with the generator seeded by the plan. """
    rng = np.random.default_rng(plan.rng_seed)
    intensities = Intensities._values()
    bases = Bases._values()
    pulses = rng.multinomial(plan.total_pulses, [params.probability(intensity) for intensity in intensities])
    counts = {}
    for intensity, emitted in zip(intensities, pulses):
        classes = [probabilities[intensity, basis].photon_classes() for basis in bases]
        pvals = [throughput[basis] * value for basis, (events, _) in zip(bases, classes) for value in events]
        drawn = rng.multinomial(emitted, pvals + [max(0.0, 1.0 - sum(pvals))])
        for index, (basis, (events, errors)) in enumerate(zip(bases, classes)):
            events_drawn = [int(value) for value in drawn[3 * index:3 * index + 3]]
            errors_drawn = [int(rng.binomial(count, error / event)) if event > 0 else 0
                for count, event, error in zip(events_drawn, events, errors)]
            counts[intensity, basis] = PhotonClassCounts(*(events_drawn + errors_drawn))
    return counts


def run_session(model, params, plan, logger=None):
    """ Simulate the preparation, measurement and reconciliation steps of a session.
    Return the tallies announced and the photon-number decomposition behind them. """
    logger = logger or silent_logger()
    probabilities = {(intensity, basis): per_pulse_probabilities(model, params, intensity, basis)
        for intensity in Intensities._values() for basis in Bases._values()}
    throughput = _throughput(model, params, probabilities)
    logger.debug('session: pulses={} mode={} seed={} throughput Z={:.6f} X={:.6f}'.format(plan.total_pulses,
        SimulationModes._to_string(plan.mode), plan.rng_seed, throughput[Bases.Z], throughput[Bases.X]))
    if plan.mode == SimulationModes.STOCHASTIC:
        counts = _drawn_counts(params, plan, probabilities, throughput)
    else:
        counts = _expected_counts(params, plan, probabilities, throughput)
    values = {key: int(round(counts[intensity, basis].events()))
        for (intensity, basis), key in TALLY_FIELDS.items()}
    values['m_omega_x'] = int(round(counts[Intensities.OMEGA, Bases.X].errors()))
    # error correction leakage of the raw key
    raw_key = values['n_mu_z'] + values['n_nu_z']
    errors = int(round(counts[Intensities.MU, Bases.Z].errors() + counts[Intensities.NU, Bases.Z].errors()))
    qber_z = min(0.5, errors / raw_key) if raw_key else 0.0
    values['lambda_ec'] = plan.ec_inefficiency * raw_key * binary_entropy(qber_z)
    tallies = ObservedTallies(**values)
    logger.trace('session: tallies={}'.format(tallies.serial()))
    return tallies, TruthRecord(events=counts, throughput=throughput, qber_z=qber_z)
