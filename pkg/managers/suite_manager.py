import time
import traceback
from threading import Lock, Thread

from complexity.checks import FAIL, SKIPPED, STATUSES, CheckResult, jsonable
from complexity.errors import BudgetError, LiftLabError
from managers.instance_manager import InstanceManager
from managers.log_manager import LogManager
from managers.progress_manager import ProgressManager
from suites.registry import build_instances, canonical_name, expand, run_instance
from utils.budget import can_run_instance


def instance_worker(instance, config, status, status_lock, print_manager, progress_manager, log_manager):
    """
    Run one corpus instance and turn its outcome into a report entry.

    Budget exhaustion becomes a skipped check; any other liftlab error or
    unexpected exception becomes a failed one, with its witness and log.

    Args:
        instance (Instance): Corpus instance
        config (LiftLabConfig): Run configuration
        status (dict): Shared status dictionary
        status_lock (Lock): Lock for status dictionary
        print_manager (PrintManager): Print manager for output
        progress_manager (ProgressManager): Progress manager for tracking
        log_manager (LogManager): Log manager for files

    Returns:
        dict: Report entry of the instance
    """
    manager = InstanceManager(instance, status, status_lock)
    manager.record_start()
    values, witnesses, error_log = {}, {}, None
    try:
        allowed, reason = can_run_instance(instance, config.budget_cells)
        if not allowed:
            raise BudgetError(reason)
        outcome = run_instance(instance, config, lambda check: progress_manager.update_stage(instance.name, check))
        checks, values = outcome.checks, outcome.values
        for kind, text in outcome.witnesses.items():
            witnesses[kind] = log_manager.write_witness(instance.name, kind, text)
    except BudgetError as e:
        checks = [CheckResult(instance.suite, SKIPPED, note=str(e))]
    except LiftLabError as e:
        checks = [CheckResult(instance.suite, FAIL, note=f"{type(e).__name__}: {e}")]
    except Exception as e:
        error_log = log_manager.write_error_log(instance.name, traceback.format_exc())
        checks = [CheckResult('error', FAIL, note=f"{type(e).__name__}: {e}")]
        manager.record_error(e, error_log)
        print_manager.print(f"\nError processing {instance.name}: {str(e)}")
    finally:
        progress_manager.finish(instance.name)

    log_files = {}
    if any(check.failed for check in checks):
        witnesses['instance'] = log_manager.write_witness(instance.name, 'instance', instance_text(instance))
        for check in checks:
            if check.failed:
                check.witness = check.witness or witnesses['instance']
                log_files[check.name] = log_manager.write_check_log(instance.name, check)
    for check in checks:
        print_manager.print_check(instance.name, check)

    if error_log is None:
        manager.record_checks(checks, log_files)
    if error_log is not None:
        entry_status = 'error'
    elif any(check.failed for check in checks):
        entry_status = FAIL
    elif all(check.status == SKIPPED for check in checks):
        entry_status = SKIPPED
    else:
        entry_status = 'pass'
    return {
        'instance': instance.name,
        'suite': instance.suite,
        'params': jsonable(instance.params),
        'status': entry_status,
        'values': jsonable(values),
        'checks': [check.to_dict() for check in checks],
        'witnesses': witnesses,
    }


def instance_text(instance):
    """Provenance of an instance, one ``key: value`` line per parameter."""
    lines = [f"instance: {instance.name}", f"suite: {instance.suite}"]
    lines += [f"{key}: {value}" for key, value in sorted(jsonable(instance.params).items())]
    return '\n'.join(lines) + '\n'


def suite_worker(worker_index, workers, instances, results, config, status, status_lock,
                 print_manager, progress_manager, log_manager):
    """
    Worker thread body: runs instances worker_index, worker_index + workers, ...
    and stores each entry at its instance's index.
    """
    for index in range(worker_index, len(instances), workers):
        results[index] = instance_worker(instances[index], config, status, status_lock,
                                         print_manager, progress_manager, log_manager)


class SuiteManager:
    """
    Runs a suite over its corpus with worker threads and assembles the report.
    """
    def __init__(self, config, suite, print_manager, only=None, show_progress=True):
        """
        Initialize suite manager.

        Args:
            config (LiftLabConfig): Run configuration
            suite (str): Suite name, alias or ``all``
            print_manager (PrintManager): Print manager for output
            only (str): Run just the instance with this name
            show_progress (bool): Show the progress bar

        Raises:
            DomainError: For an unknown suite or instance name
        """
        self.config = config
        self.suite = canonical_name(suite)
        self.only = only
        self.print_manager = print_manager

        self.instances = build_instances(self.suite, config, only)
        self.results = [None] * len(self.instances)

        # Initialize status tracking
        self.status = {}
        self.status_lock = Lock()

        self.progress_manager = ProgressManager(len(self.instances), self.suite, disable=not show_progress)
        self.print_manager.set_progress_manager(self.progress_manager)
        self.log_manager = LogManager(config.out_dir, self.suite)

        self.threads = []

    def assemble_report(self, wall_time):
        """
        Report of the finished run; entries keep corpus order.

        Args:
            wall_time (float): Seconds spent running the instances

        Returns:
            dict: JSON-ready report
        """
        totals = {status: 0 for status in STATUSES}
        for entry in self.results:
            for check in entry['checks']:
                totals[check['status']] += 1
        failed = sum(1 for entry in self.results if entry['status'] in (FAIL, 'error'))
        return {
            'suite': self.suite,
            'seed': self.config.seed,
            'budget': self.config.budget(),
            'corpus': {
                'suites': [suite.name for suite in expand(self.suite)],
                'instances': len(self.instances),
                'only': self.only,
            },
            'instances': self.results,
            'totals': totals,
            'failed_instances': failed,
            'wall_time': round(wall_time, 3),
            'exit_code': 1 if failed else 0,
        }

    def process_all(self):
        """
        Run every instance, write the report and the failure files.

        Returns:
            int: 0 when every asserted check holds, 1 otherwise
        """
        start = time.perf_counter()
        try:
            workers = min(self.config.workers, len(self.instances))
            for worker_index in range(workers):
                thread = Thread(
                    target=suite_worker,
                    args=(
                        worker_index,
                        workers,
                        self.instances,
                        self.results,
                        self.config,
                        self.status,
                        self.status_lock,
                        self.print_manager,
                        self.progress_manager,
                        self.log_manager,
                    )
                )
                self.threads.append(thread)
                thread.start()

            for thread in self.threads:
                thread.join()

            report = self.assemble_report(time.perf_counter() - start)
            path = self.log_manager.write_report(report, self.config.output_format)

            self.print_manager.separator()
            self.print_manager.print(f"\nSuite {self.suite}: {len(self.instances)} instances")
            self.print_manager.pprint(report['totals'])
            self.print_manager.print(f"Report written to {path}")

            self.log_manager.print_failure_logs(self.status, self.print_manager)
            if self.log_manager.write_failed_checks(report, self.print_manager):
                return 1
            return 0

        except Exception as e:
            self.print_manager.print(f"Error: {str(e)}")
            return 1
        finally:
            for thread in self.threads:
                if thread.is_alive():
                    thread.join(timeout=1)
            self.print_manager.stop()
