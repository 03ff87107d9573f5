"""Characteristic-core analysis of Mueller matrices and qubit channels."""
from polarlab.config import VERSION

__version__ = VERSION
