from threading import Lock

from tqdm import tqdm


class ProgressManager:
    """
    Progress bar over the instances of a suite run.
    """
    def __init__(self, total, suite, disable=False):
        """
        Initialize progress manager.

        Args:
            total (int): Number of instances in the run
            suite (str): Suite name shown in the bar
            disable (bool): Suppress the bar (tests, piped output)
        """
        self.suite = suite
        self.progress = tqdm(total=total, desc=f"Running {suite}", unit="instance", disable=disable)
        self.stages = {}
        self.stage_lock = Lock()

    def _describe(self):
        active = ', '.join(f'{k}: {v}' for k, v in self.stages.items())
        self.progress.set_description(f"Running {self.suite} ({active})" if active else f"Running {self.suite}")

    def update_stage(self, instance, check):
        """
        Record the check an instance is currently running.

        Args:
            instance (str): Instance name
            check (str): Current check
        """
        with self.stage_lock:
            self.stages[instance] = check
            self._describe()

    def finish(self, instance):
        """Drop a completed instance from the description and advance the bar."""
        with self.stage_lock:
            self.stages.pop(instance, None)
            self._describe()
            self.progress.update(1)

    def clear(self):
        self.progress.clear()

    def refresh(self):
        self.progress.refresh()

    def close(self):
        self.progress.close()
