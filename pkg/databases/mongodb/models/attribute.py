"""Mongo Engine model definition for one entry of a run summary."""
from mongoengine import (
    EmbeddedDocument,
    DynamicField,
    StringField,
)

from core.output import to_builtin


class Attribute(EmbeddedDocument):
    """A named value of a cli run summary, stored inside its Run.

    @property name:            (string) Summary key, e.g. "max_abs"; must not be empty.
    @property type:            (string) Python type name of the stored value ("float",
                               "int", "str", "bool", "list", "dict" or "NoneType").
    @property values:          (mixed) The value converted to JSON-safe builtins; numpy
                               arrays become lists and non-finite floats become strings.
    """

    name = StringField(max_length=1000, required=True)
    type = StringField(max_length=100)
    values = DynamicField()

    @classmethod
    def from_item(cls, name, value):
        """Build an attribute from one summary item.

        @param  name:       Summary key.
        @param  value:      Any value of a cli summary (numpy types allowed).
        @retval Attribute
        """
        stored = to_builtin(value)
        return cls(name=name, type=type(stored).__name__, values=stored)
