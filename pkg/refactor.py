#!/usr/bin/env python3
#
# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# horef - main
#   python refactor.py refactor program.pl --out refactored.pl --report report.json
#   python refactor.py abstractions program.pl --out library.pl
#   python refactor.py check program.pl refactored.pl
#   python refactor.py serve
#
# Exit status:
#   0 success
#   1 parse, library, abstraction or model error
#   2 unresolved predicate symbol or unbound higher-order variable
#   3 verification found a counterexample
#   4 configuration, universe or file error

import sys
import argparse
import logging

import g

from horef.version import __version__
from horef.compressor import Weights
from horef.config import CONFIG, load_config
from horef.exceptions import (AbstractionError, ConfigurationError, ModelError, ParseError, RefactoringError,
                              SpecializationError, UnresolvedSymbolError, UniverseError, VerificationError)
from horef.pipeline import run_abstractions, run_check, run_refactor
from horef.report import emit_report

logger = logging.getLogger('refactor')

EXIT_CODES = (
    (VerificationError, 3),
    (UnresolvedSymbolError, 2),
    (SpecializationError, 2),
    (ParseError, 1),
    (AbstractionError, 1),
    (ModelError, 1),
    (RefactoringError, 1),
    (ConfigurationError, 4),
    (UniverseError, 4),
    (OSError, 4),
)


def read_text(path):
    with open(path, 'r') as f:
        return f.read()


def write_text(path, text):
    """
    Writes to 'path', or to stdout when path is None
    """
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w') as f:
        f.write(text)
    logger.info(f"Wrote {path}")


def cmd_refactor(config):
    """
    Refactors config.input_path, writing the program and the report

    Raises VerificationError after the files are written when the refactored
    program is not equivalent to its input.
    """
    outcome = run_refactor(read_text(config.input_path), config, source=config.input_path)
    write_text(config.output_path, outcome.text)
    if config.report_path is not None:
        write_text(config.report_path, emit_report(outcome.report))
    if outcome.verification is not None and not outcome.verification.equivalent:
        raise VerificationError(outcome.verification)
    return 0


def cmd_abstractions(config):
    """
    Writes the candidate pool of config.input_path as an abstraction library
    """
    outcome = run_abstractions(read_text(config.input_path), config, source=config.input_path)
    write_text(config.output_path, outcome.library)
    pool = outcome.pool
    print('enumerated {0}, candidates before filter {1}, after filter {2}'.format(
        pool.enumerated, pool.raw_count, len(pool.abstractions)), file=sys.stderr)
    return 0


def cmd_check(config, refactored_path):
    """
    Prints whether the refactored program is equivalent to the input
    """
    library = read_text(config.library_path) if config.library_path else None
    result = run_check(read_text(config.input_path), read_text(refactored_path), config, library_text=library,
                       input_source=config.input_path, refactored_source=refactored_path,
                       library_source=config.library_path or '<library>')
    print(result.describe())
    if not result.equivalent:
        raise VerificationError(result)
    return 0


def cmd_serve(config):
    """
    Runs the HTTP service on config.port
    """
    from horef.service import attach_resources
    g.config = config
    app = attach_resources()
    print(' * horef service at localhost:{0}{1}'.format(config.port, g.rest_base))
    app.run(port=config.port)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=CONFIG, help='Configuration file. Default is ' + CONFIG)
    common.add_argument('--debug', action='store_true', default=False, help='Log debug messages')
    common.add_argument('--targets', help='Comma separated target predicates, e.g. f/2,g')
    common.add_argument('--max-ho-vars', type=int, help='Maximum higher-order variables per abstraction')
    common.add_argument('--weights', help='Objective weights w1,w2,w3,w4')
    common.add_argument('--timeout-secs', type=float, help='Solver timeout in seconds')
    common.add_argument('--universe', help='Universe description file used for verification')
    common.add_argument('--out', help='Output file. Default is stdout')
    common.add_argument('--report', help='JSON report file')
    common.add_argument('--no-verify', action='store_true', default=False, help='Skip verification')
    common.add_argument('--keep-singletons', action='store_true', default=False,
                        help='Keep abstractions usable by a single definition')
    common.add_argument('--size-optimum', action='store_true', default=False,
                        help='Also report the optimum without the higher-order variable penalty')

    argparser = argparse.ArgumentParser(
        description='horef - higher-order refactoring of logic programs - Version: ' + __version__)
    commands = argparser.add_subparsers(dest='command')
    commands.required = True
    refactor = commands.add_parser('refactor', parents=[common], help='Refactor a first-order program')
    refactor.add_argument('input', help='Program file')
    abstractions = commands.add_parser('abstractions', parents=[common], help='Export candidate abstractions')
    abstractions.add_argument('input', help='Program file')
    check = commands.add_parser('check', parents=[common], help='Check a refactoring against its input')
    check.add_argument('input', help='Input program file')
    check.add_argument('refactored', help='Refactored program file')
    check.add_argument('--library', help='Abstraction library the refactored program calls')
    serve = commands.add_parser('serve', parents=[common], help='Run the HTTP service')
    serve.add_argument('--port', type=int, help='Port to run the service on. Default is 5000')
    return argparser


def run_config(args):
    config = load_config(args.config)
    return config.override(
        input_path=getattr(args, 'input', None),
        targets=tuple(t.strip() for t in args.targets.split(',') if t.strip()) if args.targets else None,
        max_ho_vars=args.max_ho_vars,
        weights=Weights.parse(args.weights) if args.weights else None,
        timeout_secs=args.timeout_secs,
        universe_path=args.universe,
        output_path=args.out,
        report_path=args.report,
        verify=False if args.no_verify else None,
        keep_singletons=True if args.keep_singletons else None,
        size_optimum=True if args.size_optimum else None,
        library_path=getattr(args, 'library', None),
        refactored_path=getattr(args, 'refactored', None),
        port=getattr(args, 'port', None))


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.INFO,
                        format='%(asctime)s - %(levelname)s - %(message)s')
    try:
        config = run_config(args)
        if args.command == 'refactor':
            return cmd_refactor(config)
        if args.command == 'abstractions':
            return cmd_abstractions(config)
        if args.command == 'check':
            return cmd_check(config, config.refactored_path)
        return cmd_serve(config)
    except ParseError as e:
        for diagnostic in e.diagnostics:
            print(str(diagnostic), file=sys.stderr)
        return 1
    except Exception as e:
        for cls, status in EXIT_CODES:
            if isinstance(e, cls):
                print('Error: {0}'.format(e), file=sys.stderr)
                return status
        raise


if __name__ == '__main__':
    sys.exit(main())
