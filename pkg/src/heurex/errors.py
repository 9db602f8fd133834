"""Shared base class for errors raised by this package."""


class HeurexError(Exception):
    """Base class for all errors the engine raises on purpose."""
