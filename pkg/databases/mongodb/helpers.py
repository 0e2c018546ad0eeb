"""Helper functions for the mongodb run archive."""
import hashlib
import json

RUN_ID_LENGTH = 16


def validate_str(input_string):
    """Validate whether input_string is of string type.

    If it is not of String type it returns False.

    :param input_string: value that needs to be tested.
    """
    if isinstance(input_string, str):
        return True
    return False


def sanitize_str(input_string):
    """Remove spaces at the beginning and at the end of the string and returns the String without spaces.

    :param input_string: string that will be sanitized.
    """
    return input_string.strip()


def make_run_id(command, config, seed=None):
    """Return the first 16 hex digits of sha256(command, canonical config, seed).

    The configuration is serialised as JSON with sorted keys so that equal
    configurations map to the same run id.

    :param command: command name.
    :param config:  JSON-serialisable configuration dictionary.
    :param seed:    seed of the run (None for deterministic commands).
    """
    canonical = json.dumps(
        {"command": command, "config": config, "seed": seed},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:RUN_ID_LENGTH]


def create_uri(connection_dict):
    """Create URI for mongo using connection dict."""
    user = connection_dict["user"]
    password = connection_dict["password"]
    db = connection_dict["db_name"]
    host = connection_dict["host"]
    port = connection_dict["port"]
    if not user:
        return f"mongodb://{host}:{port}/{db}"
    return f"mongodb://{user}:{password}@{host}:{port}/{db}"
