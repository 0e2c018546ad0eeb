"""This module implements a MongoDB storage back-end for the run archive."""
import atexit
import datetime
import logging

from json import loads

## As of Python 3.8 we can do more with typing. It is recommended to make
## the adapter class final. Use the following import and provided
## decorator for the class.
from typing import final
from mongoengine import connect, DoesNotExist, disconnect


from databases.mongodb.models.run import Run
from databases.mongodb.models.attribute import Attribute
from databases.mongodb.helpers import (
    sanitize_str,
    validate_str,
    create_uri,
)

from interface import ArchiveInterface

logger = logging.getLogger(__name__)


def get_connection(connection_dict):
    """Create a connection to a MongoDB server and return the connection handle."""
    # For some reason authentication only works using URI
    return connect(host=create_uri(connection_dict))


def _check_run_id(run_id):
    if not validate_str(run_id):
        raise TypeError(
            "Please pass the correct type of input: run_id should be String"
        )
    run_id = sanitize_str(run_id)
    if run_id == "":
        raise ValueError(
            "Please specify a valid run id. A run id cannot be empty."
        )
    return run_id


@final
class MongoRunArchive(ArchiveInterface):
    """Adapter class for a MongoDB back-end that implements the run archive interface."""

    # Holds the connection handle to the database
    __db_connection = None

    def __init__(self, connection_dict):
        """Connect to the MongoDB run archive.

        :param connection_dict: The mongoDB configuration for making the connection
                                to the run archive.
        """
        self.__db_connection = get_connection(connection_dict)
        self.__db_name = connection_dict["db_name"]
        atexit.register(disconnect)

    def delete_db(self):
        """Delete the archive database (used by the tests on a scratch database)."""
        self.__db_connection.drop_database(self.__db_name)

    def __get_run(self, run_id):
        """Get run by id.

        @param  run_id:         String identifying the run to retrieve
        @retval Run:            Run object corresponding to query
        """
        return Run.objects().get(run_id=run_id)

    def get_run(self, run_id):
        run_id = _check_run_id(run_id)
        try:
            run = self.__get_run(run_id)
        except DoesNotExist as e:
            raise ValueError("The requested run " + run_id + " does not exist.") from e

        # Convert the internal Run object to a generic Python dict type
        return loads(run.to_json())

    def add_run(self, run_id, command, verdict, exit_code, **attributes):
        run_id = _check_run_id(run_id)
        if not validate_str(command) or not validate_str(verdict):
            raise TypeError(
                "Please pass the correct type of input: command and verdict should be String"
            )
        if isinstance(exit_code, bool) or not isinstance(exit_code, int):
            raise TypeError("Please pass the correct type of input: exit_code should be int")
        try:
            self.__get_run(run_id)
            raise ValueError(f"Run with {run_id=} already exists. Abort.")
        except DoesNotExist:
            pass

        run = Run()
        run.run_id = run_id
        run.command = command
        run.verdict = verdict
        run.exit_code = exit_code
        run.created = datetime.datetime.now().replace(microsecond=0)
        for name, value in attributes.items():
            run.attributes.append(Attribute.from_item(name, value))
        run.save()
        logger.info("archived run %s (%s, %s)", run_id, command, verdict)

    def list_runs(self, command=None):
        if command is None:
            runs = Run.objects().all()
        elif validate_str(command):
            runs = Run.objects(command=sanitize_str(command))
        else:
            raise TypeError("Please pass the correct type of input: command should be String")
        return [run.run_id for run in runs]

    def remove_run(self, run_id):
        run_id = _check_run_id(run_id)
        try:
            run = self.__get_run(run_id)
        except DoesNotExist as e:
            raise ValueError(
                "The Run '" + run_id + "' does not exist in the archive"
            ) from e
        run.delete()
