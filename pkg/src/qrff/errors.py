"""Exception types shared across the package.

Each error class carries the process exit code used by the CLI so that
failures stay machine-distinguishable all the way to the shell.
"""

from __future__ import annotations


class QrffError(Exception):
    """Base class for package errors."""

    exit_code = 1


class ConfigError(QrffError):
    """Invalid configuration: bad values, unknown keys, unusable parameter combinations."""

    exit_code = 2


class CapacityError(QrffError):
    """Requested circuit exceeds the simulator's qubit budget."""

    exit_code = 3


class PostSelectionError(QrffError):
    """Post-selection branch has (near-)zero probability or produced no accepted shots."""

    exit_code = 4


class IoError(QrffError):
    """Reading or writing experiment artifacts failed."""

    exit_code = 5
