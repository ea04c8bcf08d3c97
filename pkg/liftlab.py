import argparse
import os
import shutil
import sys

import yaml

from complexity.boolfn import TruthTable, check_measure_relations
from complexity.errors import BudgetError, DomainError, FormatError, LiftLabError
from complexity.gadget import GadgetMatrix, integer_rank, rank_f2
from complexity.protocol import exact_cc
from complexity.rectcover import cover_number

from managers.log_manager import find_witness
from managers.print_manager import PrintManager
from managers.suite_manager import SuiteManager

from suites.registry import suite_names

from utils.config import LiftLabConfig

USAGE_ERROR = 2


def function_measures(f, print_manager):
    """
    Print s, bs, deg, DT of a function and its relation checks.

    Returns:
        int: 0 when every relation holds, 1 otherwise
    """
    report = check_measure_relations(f)
    for key, value in report.values.items():
        print_manager.print(f"{key}: {value}")
    for check in report.checks:
        print_manager.print(f"{check.name}: {check.status}")
    return 0 if report.all_hold else 1


def matrix_measures(matrix, config, print_manager):
    """
    Print rk_q, rk_2, C and D of a matrix, flagging inexact values.

    Returns:
        int: Always 0; budget problems are reported inline
    """
    print_manager.print(f"shape: {matrix.rows}x{matrix.cols}")
    print_manager.print(f"rk_q: {integer_rank(matrix.entries)}")
    try:
        print_manager.print(f"rk_2: {rank_f2(matrix)}")
    except DomainError:
        print_manager.print("rk_2: n/a (non-Boolean matrix)")
    try:
        covered = cover_number(matrix, 'exact', config.budget_nodes, config.budget_cells)
    except BudgetError:
        covered = cover_number(matrix, 'greedy', config.budget_nodes, config.budget_cells)
    print_manager.print(f"C: {covered.size} ({covered.mode})")
    solved = exact_cc(matrix, config.budget_nodes)
    if solved.exact:
        print_manager.print(f"D: {solved.value} (exact)")
    else:
        print_manager.print(f"D: {solved.lower}..{solved.upper} (node budget exhausted)")
    return 0


def cmd_measures(args, config, print_manager):
    with open(args.input, 'r') as f:
        text = f.read().strip()
    if text.startswith('n='):
        return function_measures(TruthTable.from_string(text), print_manager)
    if text.startswith('rows='):
        return matrix_measures(GadgetMatrix.from_string(text), config, print_manager)
    raise FormatError(f"'{args.input}' is neither a truth table (n=...) nor a matrix (rows=...)")


def cmd_suite(args, config, print_manager):
    suite_manager = SuiteManager(config, args.suite, print_manager, only=args.only,
                                 show_progress=not args.no_progress)
    return suite_manager.process_all()


def cmd_export(args, config, print_manager):
    source = find_witness(args.witness, config.out_dir)
    target = args.output or os.path.basename(source)
    shutil.copyfile(source, target)
    print_manager.print(f"Wrote {args.witness} to {target}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        description='Measures, exact communication complexity and lifting checks on small Boolean functions')
    parser.add_argument('-c', '--config', help='YAML configuration file')
    parser.add_argument('-v', '--verbose', help='Print every check as it completes', action='store_true')
    parser.add_argument('--budget-cells', type=int, help='Largest matrix any exact computation may materialize')
    parser.add_argument('--budget-nodes', type=int, help='Node-expansion cap for exact searches')
    parser.add_argument('--out', help='Reports directory')
    commands = parser.add_subparsers(dest='command', required=True)

    measures = commands.add_parser('measures', help='Measures of a truth-table or matrix file')
    measures.add_argument('input', help='File with "n=<n> table=<bits>" or a rows=/cols= matrix')
    measures.set_defaults(handler=cmd_measures)

    suite = commands.add_parser('suite', help='Run an acceptance suite over the standard corpus')
    suite.add_argument('--suite', choices=suite_names(), required=True, help='Suite to run')
    suite.add_argument('--seed', type=int, help='Corpus seed')
    suite.add_argument('--workers', type=int, help='Worker threads')
    suite.add_argument('--format', choices=['json', 'csv'], dest='output_format', help='Report format')
    # also accepted after the subcommand, as written in replay commands
    suite.add_argument('--budget-cells', type=int, default=argparse.SUPPRESS,
                       help='Largest matrix any exact computation may materialize')
    suite.add_argument('--budget-nodes', type=int, default=argparse.SUPPRESS,
                       help='Node-expansion cap for exact searches')
    suite.add_argument('--out', default=argparse.SUPPRESS, help='Reports directory')
    suite.add_argument('--only', help='Run a single instance (replay)')
    suite.add_argument('--no-progress', action='store_true', help='Hide the progress bar')
    suite.set_defaults(handler=cmd_suite)

    export = commands.add_parser('export', help='Write a witness of the last report to a file')
    export.add_argument('witness', help='Witness id, e.g. lemma3.f1_01.xor1.cover')
    export.add_argument('-o', '--output', help='Target file (default: the witness file name)')
    export.set_defaults(handler=cmd_export)
    return parser


def main(argv=None):
    """
    Main function of the liftlab command line.

    Returns:
        int: 0 for success, 1 for failed checks or errors, 2 for usage and parse errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    try:
        config = LiftLabConfig(args.config)
        config.apply_overrides(
            budget_cells=args.budget_cells,
            budget_nodes=args.budget_nodes,
            seed=getattr(args, 'seed', None),
            workers=getattr(args, 'workers', None),
            out_dir=args.out,
            output_format=getattr(args, 'output_format', None),
        )
    except (FileNotFoundError, ValueError, yaml.YAMLError) as e:
        print(f"Error: {str(e)}")
        return USAGE_ERROR

    print_manager = PrintManager(verbose=args.verbose)
    try:
        return args.handler(args, config, print_manager)
    except (FormatError, FileNotFoundError) as e:
        print(f"Error: {str(e)}")
        return USAGE_ERROR
    except DomainError as e:
        # unknown suite instance or witness id
        print(f"Error: {str(e)}")
        return USAGE_ERROR if args.command in ('suite', 'export') else 1
    except LiftLabError as e:
        print(f"Error: {str(e)}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
