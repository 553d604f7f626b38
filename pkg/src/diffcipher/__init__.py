"""Difference-equation models of stream and block ciphers over prime fields."""

__version__ = "0.1.0"
