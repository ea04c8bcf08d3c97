import json
import os
from datetime import datetime
from threading import Lock

import pandas as pd

from complexity.errors import DomainError
from utils.corpus import sanitize_name

LATEST_FILE = 'latest.json'


def replay_command(entry, report):
    """
    Command that reruns exactly one instance of a report.

    Args:
        entry (dict): Instance entry of the report
        report (dict): The report holding it

    Returns:
        str: Shell command
    """
    budget = report['budget']
    return (f"python liftlab.py suite --suite {entry['suite']} --seed {report['seed']} "
            f"--budget-cells {budget['cells']} --budget-nodes {budget['nodes']} --only {entry['instance']}")


def load_latest(base_dir='reports'):
    """
    Read the pointer to the most recent report.

    Raises:
        DomainError: If no run has been recorded under base_dir
    """
    path = os.path.join(base_dir, LATEST_FILE)
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise DomainError(f"No report found under '{base_dir}'; run a suite first")


def find_witness(witness_id, base_dir='reports'):
    """
    Path of a witness file from the most recent report.

    Args:
        witness_id (str): Id as listed in the report, ``<instance>.<kind>``
        base_dir (str): Reports directory

    Returns:
        str: Path of the witness file

    Raises:
        DomainError: If the id is not in the last report
    """
    latest = load_latest(base_dir)
    try:
        return latest['witnesses'][witness_id]
    except KeyError:
        raise DomainError(f"Unknown witness id '{witness_id}' in {latest['report']}")


class LogManager:
    """
    Owns the files of one suite run under ``<base_dir>/<suite>_<timestamp>/``.
    """
    def __init__(self, base_dir='reports', suite='all'):
        """
        Initialize log manager.

        Args:
            base_dir (str): Reports directory
            suite (str): Suite name, used for the run directory
        """
        self.base_dir = base_dir
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.run_dir = os.path.join(base_dir, f"{sanitize_name(suite)}_{timestamp}")
        os.makedirs(self.run_dir, exist_ok=True)
        self.witnesses = {}
        self.witness_lock = Lock()

    def get_log_path(self, instance_name, log_type):
        """
        Get path for a log file.

        Args:
            instance_name (str): Name of the instance
            log_type (str): Check name, or 'error'

        Returns:
            tuple: (log_dir, log_file)
        """
        log_dir = os.path.join(self.run_dir, sanitize_name(instance_name))
        os.makedirs(log_dir, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_file = os.path.join(log_dir, f"{sanitize_name(log_type)}_{timestamp}.log")

        return log_dir, log_file

    def write_check_log(self, instance_name, check):
        """
        Write the full record of a failing check.

        Returns:
            str: Log file path
        """
        _, log_file = self.get_log_path(instance_name, check.name)
        with open(log_file, 'w') as f:
            json.dump(check.to_dict(), f, indent=2)
            f.write('\n')
        return log_file

    def write_error_log(self, instance_name, text):
        _, log_file = self.get_log_path(instance_name, 'error')
        with open(log_file, 'w') as f:
            f.write(text)
        return log_file

    def write_witness(self, instance_name, kind, text):
        """
        Store a witness (cover, tree, trace, instance) of an instance.

        Args:
            instance_name (str): Name of the instance
            kind (str): Witness kind, also the file extension
            text (str): Witness in its owning module's text format

        Returns:
            str: Witness id ``<instance>.<kind>``
        """
        log_dir = os.path.join(self.run_dir, sanitize_name(instance_name))
        os.makedirs(log_dir, exist_ok=True)
        witness_id = f"{instance_name}.{kind}"
        path = os.path.join(log_dir, f"{sanitize_name(instance_name)}.{kind}")
        with open(path, 'w') as f:
            f.write(text)
        with self.witness_lock:
            self.witnesses[witness_id] = path
        return witness_id

    def write_failed_checks(self, report, print_manager):
        """
        Write one replay command per failing instance.

        Args:
            report (dict): Assembled report
            print_manager (PrintManager): Print manager for output

        Returns:
            bool: True when anything failed
        """
        failed = [entry for entry in report['instances'] if entry['status'] in ('fail', 'error')]
        if not failed:
            return False
        path = os.path.join(self.run_dir, 'failed_checks.txt')
        print_manager.print("\nFailed instances:")
        with open(path, 'w') as f:
            for entry in failed:
                names = ', '.join(c['name'] for c in entry['checks'] if c['status'] == 'fail')
                line = f"{entry['instance']} [{names}]: {replay_command(entry, report)}"
                print_manager.print(line)
                f.write(line + '\n')
        print_manager.print(f"\nSee {path} for replay commands")
        return True

    def write_report(self, report, output_format='json'):
        """
        Write report.json (and report.csv for the csv format) and point
        ``<base_dir>/latest.json`` at it.

        Returns:
            str: Path of the main report file
        """
        json_path = os.path.join(self.run_dir, 'report.json')
        with open(json_path, 'w') as f:
            json.dump(report, f, indent=2)
            f.write('\n')
        main_path = json_path
        if output_format == 'csv':
            main_path = os.path.join(self.run_dir, 'report.csv')
            report_frame(report).to_csv(main_path, index=False)
        with self.witness_lock:
            latest = {'report': json_path, 'witnesses': dict(sorted(self.witnesses.items()))}
        with open(os.path.join(self.base_dir, LATEST_FILE), 'w') as f:
            json.dump(latest, f, indent=2)
            f.write('\n')
        return main_path

    def print_failure_logs(self, status, print_manager):
        """
        Print logs for failed instances.

        Args:
            status (dict): Status dictionary
            print_manager (PrintManager): Print manager for output
        """
        for name, result in status.items():
            if result['status'] not in ('fail', 'error'):
                continue
            print_manager.print(f"\nFailure detected for {name}:")
            print_manager.print(f"Status: {result['status']}")
            if 'error' in result:
                print_manager.print(f"Error: {result['error']}")
            for check_name, log_file in result.get('logs', {}).items():
                print_manager.print(f"\n{check_name} log:")
                print_manager.print_file(log_file)


def report_frame(report):
    """
    One row per check of a report.

    Returns:
        pandas.DataFrame: instance, suite, check, status, note, values, witness
    """
    rows = []
    for entry in report['instances']:
        for check in entry['checks']:
            rows.append({
                'instance': entry['instance'],
                'suite': entry['suite'],
                'check': check['name'],
                'status': check['status'],
                'note': check.get('note', ''),
                'values': json.dumps(check['values'], sort_keys=True),
                'witness': check.get('witness', ''),
            })
    return pd.DataFrame(rows, columns=['instance', 'suite', 'check', 'status', 'note', 'values', 'witness'])
