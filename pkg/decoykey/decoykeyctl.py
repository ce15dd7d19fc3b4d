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

import argparse
import csv
import dataclasses
import json
import sys

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from decoykey.channelsim import run_session
from decoykey.keyengine import PROTOCOL_KEYS, key_length
from decoykey.optimizer import CoordinateOptimizer, FIXED_NAMES, SearchSpace
from decoykey.options import load_config, read_tallies
from decoykey.ttypes import EstimationError, InvalidParameter, SimulationModes
from decoykey.utils import create_logger, get_stats


# exit codes
EXIT_SUCCESS = 0
EXIT_INPUT_ERROR = 1
EXIT_ABORT = 2

# columns of the scan output
SCAN_HEADER = ('loss_db', 'ell', 'rate_per_second', 'phi_upper', 's1_lower')


class Controller(object):
    """ The Controller implements the decoykeyctl commands on a RunConfig.

    Every do_* method returns the exit code of the command. """

    def __init__(self, config, stdout=None, logger=None, jobs=1):
        """ Initialization of the attributes. """
        self.config = config
        self.stdout = stdout or sys.stdout
        self.logger = logger or create_logger(config.logger)
        self.jobs = max(1, jobs)

    def output(self, line):
        """ Print a line on the output stream. """
        self.stdout.write(line + '\n')

    def evaluate(self, channel=None, protocol=None, plan=None):
        """ Generate the expected tallies of the configuration and return them with their key rate report. """
        channel = channel or self.config.channel
        protocol = protocol or self.config.protocol
        plan = plan or dataclasses.replace(self.config.session, mode=SimulationModes.EXPECTED)
        tallies, _ = run_session(channel, protocol, plan, self.logger)
        report = key_length(tallies, protocol, self.config.security, plan.total_pulses, channel.clock_hz)
        return tallies, report

    def do_keyrate(self, tallies_file=None):
        """ Command to compute the secret key length from a tallies file or from the expected tallies. """
        if tallies_file:
            tallies = read_tallies(tallies_file)
            report = key_length(tallies, self.config.protocol, self.config.security,
                self.config.session.total_pulses, self.config.channel.clock_hz)
        else:
            tallies, report = self.evaluate()
        self.logger.info('keyrate: ell={} aborted={}'.format(report.ell, report.aborted))
        self.output_report(report)
        if not tallies_file:
            self.output_line('distance_km', self.config.channel.distance_km())
        for key, value in tallies.serial().items():
            self.output_line(key, value)
        for key, value in report.breakdown.serial().items():
            self.output_line(key, value)
        return EXIT_ABORT if report.aborted else EXIT_SUCCESS

    def output_report(self, report):
        """ Print the main fields of a key rate report. """
        self.output_line('ell', report.ell)
        self.output_line('aborted', 'true' if report.aborted else 'false')
        if report.aborted:
            self.output_line('abort_reason', report.abort_message())
        self.output_line('rate_per_pulse', report.rate_per_pulse)
        self.output_line('rate_per_second', report.rate_per_second)
        self.output_line('penalty_bits', report.penalty_bits)
        self.output_line('verification_bits', report.verification_bits)

    def output_line(self, name, value):
        """ Print a name / value line. """
        template = '%(name)-24s%(value)s'
        self.output(template % {'name': name, 'value': repr(value) if isinstance(value, float) else value})

    def do_scan(self, loss_min, loss_max, steps, out=None):
        """ Command to compute the key rate over a range of channel losses. """
        if not (isinstance(steps, int) and steps >= 1):
            raise InvalidParameter('steps', 'invalid value {}. expected integer >= 1'.format(steps))
        if not 0 <= loss_min <= loss_max:
            raise InvalidParameter('loss', 'invalid range [{};{}]. expected 0 <= loss_min <= loss_max'.format(
                loss_min, loss_max))
        losses = [float(loss) for loss in np.linspace(loss_min, loss_max, steps)]
        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            reports = list(executor.map(lambda loss: self.evaluate(self.config.channel.with_loss(loss))[1], losses))
        with self.open_output(out) as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(SCAN_HEADER)
            for loss, report in zip(losses, reports):
                writer.writerow([repr(loss), report.ell, repr(report.rate_per_second),
                    repr(report.breakdown.phi1_zz_upper), repr(report.breakdown.s1_zz_lower)])
        self.logger.info('scan: {} points in [{};{}] dB'.format(steps, loss_min, loss_max))
        return EXIT_SUCCESS

    def do_simulate(self, seed, reps, out=None):
        """ Command to run random sessions and compute their key lengths. """
        if not (isinstance(reps, int) and reps >= 1):
            raise InvalidParameter('reps', 'invalid value {}. expected integer >= 1'.format(reps))
        seeds = simulation_seeds(seed, reps)
        def simulate(session_seed):
            plan = dataclasses.replace(self.config.session, mode=SimulationModes.STOCHASTIC, rng_seed=session_seed)
            tallies, report = self.evaluate(plan=plan)
            return tallies, report
        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            results = list(executor.map(simulate, seeds))
        with self.open_output(out) as stream:
            for session_seed, (tallies, report) in zip(seeds, results):
                stream.write(json.dumps({'seed': session_seed, 'tallies': tallies.serial(),
                    'report': report.serial()}, sort_keys=True) + '\n')
        avg, dev = get_stats([report.ell for _, report in results])
        self.logger.info('simulate: {} sessions, ell mean={} stddev={}'.format(reps, avg, dev))
        return EXIT_SUCCESS

    def do_optimize(self, budget, seed, write_back=None, fixed=()):
        """ Command to search the protocol parameters maximizing the key rate.
        When write_back is set, the optimized configuration is written to this file. """
        space = SearchSpace(initial=self.config.protocol, fixed=frozenset(fixed))
        optimizer = CoordinateOptimizer(self.config.channel, space, self.config.session, self.config.security,
            self.logger)
        input_report = optimizer.evaluate(self.config.protocol)
        params, report, trace = optimizer.optimize(budget, seed, jobs=self.jobs)
        for key in PROTOCOL_KEYS:
            self.output_line(key, getattr(params, key))
        self.output_report(report)
        self.output_line('input_rate_per_second', input_report.rate_per_second)
        self.output_line('improvement', report.rate_per_second - input_report.rate_per_second)
        self.output_line('evaluations', len(trace))
        if write_back:
            with open(write_back, 'w') as stream:
                stream.write(dataclasses.replace(self.config, protocol=params).to_ini())
            self.logger.info('optimize: configuration written to {}'.format(write_back))
        return EXIT_ABORT if report.aborted else EXIT_SUCCESS

    def open_output(self, out):
        """ Return a context manager on the output file, or on the output stream when no file is given. """
        if out:
            return open(out, 'w', newline='')
        return _Unclosed(self.stdout)


class _Unclosed(object):
    """ Context manager giving a stream that must not be closed on exit. """

    def __init__(self, stream):
        self.stream = stream

    def __enter__(self):
        return self.stream

    def __exit__(self, *exc_info):
        self.stream.flush()


def simulation_seeds(seed, reps):
    """ Return the seed of every session, derived from the command seed. """
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in np.random.SeedSequence(seed).spawn(reps)]


class ArgumentParser(argparse.ArgumentParser):
    """ Argument parser reporting usage errors as invalid parameters. """

    def error(self, message):
        raise InvalidParameter('arguments', message)


def fixed_names(value):
    """ Convert a comma-separated list of protocol names into a set. """
    names = frozenset(filter(None, (name.strip() for name in value.split(','))))
    unknown = names - set(FIXED_NAMES)
    if unknown:
        raise argparse.ArgumentTypeError('unknown parameters {}. expected in {}'.format(sorted(unknown),
            sorted(FIXED_NAMES)))
    return names


def seed_value(value):
    """ Convert a string into an unsigned 64-bit seed. """
    seed = int(value)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError('invalid seed {}. expected in [0;2^64['.format(value))
    return seed


def create_parser():
    """ Create the argument parser of decoykeyctl. """
    parser = ArgumentParser(prog='decoykeyctl',
        description='Finite-key secret key rate of four-intensity decoy-state BB84.')
    parser.add_argument('--jobs', type=int, default=1, help='number of concurrent evaluations')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True
    # keyrate
    keyrate = commands.add_parser('keyrate', help='compute the secret key length')
    keyrate.add_argument('--config', required=True, help='ini configuration file')
    keyrate.add_argument('--tallies', help='tallies file. expected tallies are simulated when not set')
    keyrate.set_defaults(func=lambda ctl, args: ctl.do_keyrate(args.tallies))
    # scan
    scan = commands.add_parser('scan', help='compute the key rate over a range of channel losses')
    scan.add_argument('--config', required=True, help='ini configuration file')
    scan.add_argument('--loss-min', type=float, required=True, help='lowest channel loss in dB')
    scan.add_argument('--loss-max', type=float, required=True, help='highest channel loss in dB')
    scan.add_argument('--steps', type=int, required=True, help='number of points')
    scan.add_argument('--out', help='CSV output file. stdout when not set')
    scan.set_defaults(func=lambda ctl, args: ctl.do_scan(args.loss_min, args.loss_max, args.steps, args.out))
    # simulate
    simulate = commands.add_parser('simulate', help='run random sessions')
    simulate.add_argument('--config', required=True, help='ini configuration file')
    simulate.add_argument('--seed', type=seed_value, required=True, help='seed of the sessions')
    simulate.add_argument('--reps', type=int, required=True, help='number of sessions')
    simulate.add_argument('--out', help='JSON lines output file. stdout when not set')
    simulate.set_defaults(func=lambda ctl, args: ctl.do_simulate(args.seed, args.reps, args.out))
    # optimize
    optimize = commands.add_parser('optimize', help='search the protocol parameters maximizing the key rate')
    optimize.add_argument('--config', required=True, help='ini configuration file')
    optimize.add_argument('--budget', type=int, required=True, help='maximum number of evaluations')
    optimize.add_argument('--seed', type=seed_value, default=0, help='seed of the starting points')
    optimize.add_argument('--write-back', action='store_true', help='write the optimized parameters to the config')
    optimize.add_argument('--fixed', type=fixed_names, default=frozenset(),
        help='comma-separated parameters kept at their configured value')
    optimize.set_defaults(func=lambda ctl, args: ctl.do_optimize(args.budget, args.seed,
        args.config if args.write_back else None, args.fixed))
    return parser


def main(argv=None, stdout=None, stderr=None):
    """ Entry point of decoykeyctl. Return the exit code. """
    stderr = stderr or sys.stderr
    try:
        args = create_parser().parse_args(argv)
        config = load_config(args.config)
        controller = Controller(config, stdout, create_logger(config.logger, stderr), args.jobs)
        return args.func(controller, args)
    except (InvalidParameter, EstimationError, ValueError, IOError) as exc:
        stderr.write('ERROR ({})\n'.format(exc))
        return EXIT_INPUT_ERROR


if __name__ == '__main__':
    sys.exit(main())
