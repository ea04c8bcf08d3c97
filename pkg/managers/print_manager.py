from pprint import pformat


class PrintManager:
    """
    Console output that stays readable under a live progress bar.
    """
    def __init__(self, progress_manager=None, verbose=False):
        """
        Initialize print manager.

        Args:
            progress_manager (ProgressManager): Bar to clear around each write
            verbose (bool): Also print every check as it completes
        """
        self.progress_manager = progress_manager
        self.verbose = verbose

    def set_progress_manager(self, progress_manager):
        self.progress_manager = progress_manager

    def print(self, message):
        """
        Print a message, clearing the progress bar first if there is one.

        Args:
            message (str): Message to print
        """
        if self.progress_manager:
            self.progress_manager.clear()
        print(message)
        if self.progress_manager:
            self.progress_manager.refresh()

    def pprint(self, obj):
        self.print(pformat(obj, sort_dicts=False))

    def print_check(self, instance, check):
        """
        Print one check result, only in verbose mode.

        Args:
            instance (str): Instance name
            check (CheckResult): Completed check
        """
        if not self.verbose:
            return
        line = f"{instance}: {check.name} {check.status}"
        if check.note:
            line += f" ({check.note})"
        self.print(line)

    def print_file(self, file_path):
        """
        Print the contents of a log or witness file.

        Args:
            file_path (str): Path to file
        """
        try:
            with open(file_path, 'r') as f:
                self.print(f.read().rstrip('\n'))
        except OSError as e:
            self.print(f"Error reading file {file_path}: {str(e)}")

    def separator(self, char='-', length=80):
        self.print(char * length)

    def stop(self):
        """Close the progress bar if there is one."""
        if self.progress_manager:
            self.progress_manager.close()
