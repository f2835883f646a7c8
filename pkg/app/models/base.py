"""
Base Model

This module contains the serialization mixin shared by all domain models.
Models are immutable dataclasses holding numpy arrays; the mixin converts
them to plain JSON-ready dictionaries and back.
"""

import dataclasses
from enum import Enum

import numpy as np


def to_jsonable(value):
    """
    Convert a value to something ``json.dumps`` accepts.

    Args:
        value: Any model field value

    Returns:
        A structure made of dict, list, str, int, float, bool and None
    """
    if isinstance(value, SerializableModel):
        return value.to_dict()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    return value


class SerializableModel:
    """
    Mixin class that provides common functionality for all models.

    Subclasses are dataclasses; ``to_dict`` walks their fields and
    ``from_dict`` rebuilds them. Models with a custom wire format override both.
    """

    def to_dict(self):
        """
        Convert the model instance to a dictionary.

        Returns:
            dict: Dictionary representation of the model
        """
        return {
            field.name: to_jsonable(getattr(self, field.name))
            for field in dataclasses.fields(self)
        }

    @classmethod
    def from_dict(cls, data):
        """
        Create a new instance of the model from a dictionary.

        Args:
            data (dict): Output of ``to_dict``

        Returns:
            SerializableModel: The rebuilt instance
        """
        names = {field.name for field in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in names})
