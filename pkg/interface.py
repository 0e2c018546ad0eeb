"""Run archive interface definition."""
from abc import ABCMeta, abstractmethod


class ArchiveInterface(metaclass=ABCMeta):
    """
    Run archive interface definition.

    This class defines the interface that all storage back-end adapters must implement.
    A run is the JSON summary of one cli command together with its verdict and exit code.
    """

    @abstractmethod
    def add_run(self, run_id, command, verdict, exit_code, **attributes):
        """Add a new run to the archive.

        @param  run_id:         String identifying the run. Must be unique.
        @param  command:        String naming the cli command.
        @param  verdict:        String summarising the outcome.
        @param  exit_code:      Integer exit code of the command.
        @param  attributes:     Named summary entries stored with the run.
        @throw  TypeError:      If input type is not as specified.
        @throw  ValueError:     If a run with run_id already exists.
        """

    @abstractmethod
    def get_run(self, run_id):
        """Return a run dictionary.

        @param  run_id:         String identifying the run to retrieve
        @throw  TypeError:      If input type is not as specified.
        @throw  ValueError:     If run_id is empty or does not exist.
        @retval Dict:           A dictionary adhering to the following specification:
                                Run = { 'run_id': String, 'command': String,
                                        'created': datetime, 'verdict': String,
                                        'exit_code': Integer, 'attributes': List of Attributes }
        """

    @abstractmethod
    def list_runs(self, command=None):
        """Return a list with the ids of all runs, optionally only those of one command.

        @param  command:        (optional) String naming the cli command.
        @retval List:           A list with (string) run ids
        """

    @abstractmethod
    def remove_run(self, run_id):
        """Remove a run from the archive.

        @param  run_id:         String identifying the run to remove
        @throw  TypeError:      If input type is not as specified.
        @throw  ValueError:     If run_id does not exist.
        """
