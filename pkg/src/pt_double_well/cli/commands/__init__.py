"""Subcommands; each module exposes ``register`` and ``run``."""

from . import spectrum, stokes, table1, trace, verify, zeros

COMMANDS = (spectrum, trace, table1, stokes, verify, zeros)

__all__ = ["COMMANDS"]
