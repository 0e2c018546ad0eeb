"""Mongo Engine model definition for a Run."""
from mongoengine import (
    DateTimeField,
    Document,
    EmbeddedDocumentListField,
    IntField,
    StringField,
)

from databases.mongodb.models.attribute import Attribute


class Run(Document):
    """This model represents one cli run. A run is associated with zero or more Attributes.

    @property run_id:          (string) Hash of command, configuration and seed; must not
                               be empty and must be unique.
    @property command:         (string) The cli command, e.g. "check".
    @property created:         (datetime) When the run was archived.
    @property verdict:         (string) Outcome, e.g. "consistent", "inconsistent", "ok".
    @property exit_code:       (int) Exit code of the command.
    @property attributes:      List of associated Attribute models (the JSON summary).
    """

    run_id = StringField(max_length=1000, required=True, unique=True)
    command = StringField(max_length=1000, required=True)
    created = DateTimeField()
    verdict = StringField(max_length=1000)
    exit_code = IntField(default=0)
    attributes = EmbeddedDocumentListField(Attribute)
