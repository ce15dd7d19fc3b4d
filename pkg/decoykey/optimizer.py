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
import math

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from scipy.stats import qmc

from decoykey.channelsim import run_session
from decoykey.keyengine import KeyRateReport, ProtocolParams, SecuritySettings, key_length
from decoykey.ttypes import AbortReasons, EstimationError, InvalidParameter, SimulationModes
from decoykey.utils import silent_logger


# search coordinates. the free probabilities are expressed as log-ratios to the vacuum probability
# so that every point of the box is on the simplex
COORDINATES = ('mu', 'nu_ratio', 'omega', 'z_mu', 'z_nu', 'z_omega', 'q_z')

# protocol name used to fix a coordinate
FIXED_NAMES = {'mu': 'mu', 'nu': 'nu_ratio', 'omega': 'omega', 'p_mu': 'z_mu', 'p_nu': 'z_nu',
    'p_omega': 'z_omega', 'q_z': 'q_z'}

DEFAULT_BOUNDS = {'mu': (0.01, 1.0), 'nu_ratio': (0.01, 0.99), 'omega': (0.01, 1.0),
    'z_mu': (-5.0, 5.0), 'z_nu': (-5.0, 5.0), 'z_omega': (-5.0, 5.0), 'q_z': (0.01, 0.99)}

# hard limits of each coordinate, bounds excluded when True
_DOMAINS = {'mu': (0.0, True, 1.0, False), 'nu_ratio': (0.0, True, 1.0, True), 'omega': (0.0, True, 1.0, False),
    'z_mu': (-math.inf, True, math.inf, True), 'z_nu': (-math.inf, True, math.inf, True),
    'z_omega': (-math.inf, True, math.inf, True), 'q_z': (0.0, True, 1.0, True)}

_PROBABILITIES = ('p_mu', 'p_nu', 'p_omega')

# relative gap kept between mu and a fixed nu
_NU_GAP = 1e-9

DEFAULT_STARTS = 8
INITIAL_STEP = 0.2
MIN_STEP = 1e-4


def to_coordinates(params):
    """ Express protocol parameters in search coordinates. """
    return {'mu': params.mu, 'nu_ratio': params.nu / params.mu, 'omega': params.omega,
        'z_mu': math.log(params.p_mu / params.p_0), 'z_nu': math.log(params.p_nu / params.p_0),
        'z_omega': math.log(params.p_omega / params.p_0), 'q_z': params.q_z}

def to_params(coordinates, held=None):
    """ Build protocol parameters from search coordinates.

    held maps protocol names to the values they keep whatever the coordinates.
    The free source probabilities and p_0 share the mass left by the held probabilities. """
    held = held or {}
    mass = 1.0 - math.fsum(held[name] for name in _PROBABILITIES if name in held)
    weights = {name: math.exp(coordinates['z' + name[1:]]) for name in _PROBABILITIES if name not in held}
    total = 1.0 + math.fsum(weights.values())
    probabilities = {name: held[name] if name in held else mass * weights[name] / total
        for name in _PROBABILITIES}
    mu = held.get('mu', coordinates['mu'])
    nu = held['nu'] if 'nu' in held else mu * coordinates['nu_ratio']
    return ProtocolParams(mu=mu, nu=nu, omega=held.get('omega', coordinates['omega']),
        p_0=mass / total, q_z=held.get('q_z', coordinates['q_z']), **probabilities)


@dataclasses.dataclass(frozen=True)
class SearchSpace:
    """ Bounds of the search coordinates, starting parameters and parameters kept at their starting value.

    fixed holds protocol names (mu, nu, omega, p_mu, p_nu, p_omega, q_z).
    A fixed nu moves the lower bound of mu above it. """

    initial: ProtocolParams = dataclasses.field(default_factory=ProtocolParams)
    bounds: dict = dataclasses.field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    fixed: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.initial, ProtocolParams):
            raise InvalidParameter('optimizer.initial', 'ProtocolParams expected')
        unknown = set(self.bounds) - set(COORDINATES)
        if unknown:
            raise InvalidParameter('optimizer.bounds', 'unknown coordinates {}'.format(sorted(unknown)))
        bounds = dict(DEFAULT_BOUNDS, **self.bounds)
        for name, (low, high) in bounds.items():
            domain_low, open_low, domain_high, open_high = _DOMAINS[name]
            if not (math.isfinite(low) and math.isfinite(high) and low < high):
                raise InvalidParameter('optimizer.' + name, 'invalid bounds [{};{}]'.format(low, high))
            if low < domain_low or (open_low and low == domain_low) \
                    or high > domain_high or (open_high and high == domain_high):
                raise InvalidParameter('optimizer.' + name, 'bounds [{};{}] out of domain'.format(low, high))
        unknown = set(self.fixed) - set(FIXED_NAMES)
        if unknown:
            raise InvalidParameter('optimizer.fixed', 'unknown parameters {}'.format(sorted(unknown)))
        if 'nu' in self.fixed and 'mu' not in self.fixed:
            # mu is searched over (nu, high]
            low, high = bounds['mu']
            if high <= self.initial.nu:
                raise InvalidParameter('optimizer.mu', 'bounds [{};{}] not above the fixed nu {}'.format(
                    low, high, self.initial.nu))
            bounds['mu'] = (max(low, self.initial.nu * (1 + _NU_GAP)), high)
        object.__setattr__(self, 'bounds', bounds)
        object.__setattr__(self, 'fixed', frozenset(self.fixed))

    def held(self):
        """ Values of the fixed protocol parameters, taken from the initial parameters. """
        return {name: getattr(self.initial, name) for name in sorted(self.fixed)}

    def free_coordinates(self):
        """ Coordinates explored by the search, in canonical order. """
        fixed = {FIXED_NAMES[name] for name in self.fixed}
        return [name for name in COORDINATES if name not in fixed]

    def clip(self, name, value):
        low, high = self.bounds[name]
        return min(max(value, low), high)

    def span(self, name):
        low, high = self.bounds[name]
        return high - low


class CoordinateOptimizer(object):
    """ Multi-start coordinate descent of the key rate per pulse.

    Every point is evaluated with the expected-value simulator followed by the key length calculation.
    A point that cannot be evaluated scores 0. """

    def __init__(self, model, space, plan, settings=None, logger=None):
        self.model = model
        self.space = space
        self.held = space.held()
        self.plan = dataclasses.replace(plan, mode=SimulationModes.EXPECTED)
        self.settings = settings or SecuritySettings()
        self.logger = logger or silent_logger()

    def evaluate(self, params):
        """ Return the key rate report of the protocol parameters. """
        try:
            tallies, _ = run_session(self.model, params, self.plan)
            return key_length(tallies, params, self.settings, self.plan.total_pulses, self.model.clock_hz)
        except (InvalidParameter, EstimationError, ValueError, ArithmeticError) as exc:
            self.logger.debug('optimizer: evaluation failed at {}: {}'.format(params, exc))
            return KeyRateReport.abort(AbortReasons.EVALUATION_FAILED, self.settings, self.plan.total_pulses,
                self.model.clock_hz)

    def _evaluate_point(self, coordinates):
        try:
            params = to_params(coordinates, self.held)
        except (InvalidParameter, ValueError, ArithmeticError) as exc:
            self.logger.debug('optimizer: infeasible point {}: {}'.format(coordinates, exc))
            return None, KeyRateReport.abort(AbortReasons.EVALUATION_FAILED, self.settings,
                self.plan.total_pulses, self.model.clock_hz)
        return params, self.evaluate(params)

    def starts(self, count, seed):
        """ Starting coordinates: the initial parameters first, then scrambled Halton points. """
        initial = {name: self.space.clip(name, value) for name, value in to_coordinates(self.space.initial).items()}
        starts = [initial]
        free = self.space.free_coordinates()
        if count > 1 and free:
            sampler = qmc.Halton(d=len(free), scramble=True, seed=np.random.default_rng(seed))
            lows = [self.space.bounds[name][0] for name in free]
            highs = [self.space.bounds[name][1] for name in free]
            for sample in qmc.scale(sampler.random(count - 1), lows, highs):
                start = dict(initial)
                start.update({name: float(value) for name, value in zip(free, sample)})
                starts.append(start)
        return starts

    def descend(self, start, budget, exact=None):
        """ Coordinate descent from a starting point within a number of evaluations.
        Return the best parameters, their report and the objective value of every evaluation.
        When exact is provided, these parameters are evaluated at the start point instead of the
        parameters rebuilt from coordinates. """
        if exact is not None:
            best_params, best_report = exact, self.evaluate(exact)
        else:
            best_params, best_report = self._evaluate_point(start)
        values = [best_report.rate_per_pulse]
        point = dict(start)
        free = self.space.free_coordinates()
        steps = {name: INITIAL_STEP * self.space.span(name) for name in free}
        relative_step = INITIAL_STEP
        while free and len(values) < budget and relative_step >= MIN_STEP:
            improved = False
            for name in free:
                for direction in (1, -1):
                    if len(values) >= budget:
                        break
                    value = self.space.clip(name, point[name] + direction * steps[name])
                    if value == point[name]:
                        continue
                    candidate = dict(point, **{name: value})
                    params, report = self._evaluate_point(candidate)
                    values.append(report.rate_per_pulse)
                    if report.rate_per_pulse > best_report.rate_per_pulse:
                        point, best_params, best_report = candidate, params, report
                        improved = True
                        self.logger.trace('optimizer: {}={:.6g} rate={:.6e}'.format(name, value,
                            report.rate_per_pulse))
                        break
            if not improved:
                steps = {name: step / 2 for name, step in steps.items()}
                relative_step /= 2
        return best_params, best_report, values

    def optimize(self, budget, seed=0, starts=DEFAULT_STARTS, jobs=1):
        """ Run the descents and return the best parameters, their report and the incumbent trace. """
        if not (isinstance(budget, int) and budget >= 1):
            raise InvalidParameter('budget', 'invalid value {}. expected integer >= 1'.format(budget))
        count = min(starts, budget)
        points = self.starts(count, seed)
        # budget split evenly, the first starts take the remainder
        budgets = [budget // len(points) + (1 if index < budget % len(points) else 0)
            for index in range(len(points))]
        exacts = [self.space.initial] + [None] * (len(points) - 1)
        self.logger.info('optimizer: budget={} starts={} free={}'.format(budget, len(points),
            self.space.free_coordinates()))
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
            outcomes = list(executor.map(self.descend, points, budgets, exacts))
        best_params, best_report, trace = None, None, []
        for index, (params, report, values) in enumerate(outcomes):
            self.logger.debug('optimizer: start {} best rate={:.6e}'.format(index, report.rate_per_pulse))
            if best_report is None or (params is not None and report.rate_per_pulse > best_report.rate_per_pulse):
                best_params, best_report = params, report
            for value in values:
                trace.append(max(value, trace[-1]) if trace else value)
        self.logger.info('optimizer: best rate={:.6e} ell={}'.format(best_report.rate_per_pulse, best_report.ell))
        return best_params, best_report, trace


def optimize(model, space, plan, budget, settings=None, seed=0, logger=None, jobs=1, starts=DEFAULT_STARTS):
    """ Maximize the key rate per pulse over the search space. """
    return CoordinateOptimizer(model, space, plan, settings, logger).optimize(budget, seed, starts, jobs)
