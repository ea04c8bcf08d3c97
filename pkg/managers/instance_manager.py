from complexity.checks import FAIL, PASS


class InstanceManager:
    """
    Status record of one corpus instance in the shared run status.
    """
    def __init__(self, instance, status, status_lock):
        """
        Initialize instance manager.

        Args:
            instance (Instance): Corpus instance
            status (dict): Shared status dictionary, keyed by instance name
            status_lock (Lock): Lock for status dictionary
        """
        self.instance = instance
        self.status = status
        self.status_lock = status_lock

    @property
    def name(self):
        return self.instance.name

    def update_status(self, **kwargs):
        """
        Update the instance's status entry.

        Args:
            **kwargs: Key-value pairs to update in status
        """
        with self.status_lock:
            if self.name not in self.status:
                self.status[self.name] = {}
            self.status[self.name].update(kwargs)

    def record_start(self):
        self.update_status(status='running', suite=self.instance.suite)

    def record_checks(self, checks, log_files=None):
        """
        Record completed checks.

        Args:
            checks (list): CheckResults of the instance
            log_files (dict): Check name -> log file, for failing checks
        """
        failed = [c.name for c in checks if c.failed]
        self.update_status(
            status=FAIL if failed else PASS,
            code=1 if failed else 0,
            failed=failed,
            logs=log_files or {},
        )

    def record_error(self, error, log_file=None):
        """
        Record an error raised while running the instance.

        Args:
            error (Exception): The error
            log_file (str): Log with the error details
        """
        self.update_status(
            status='error',
            code=1,
            error=f"{type(error).__name__}: {error}",
            logs={'error': log_file} if log_file else {},
        )
