"""Numerics for invariant distributions and singular asymptotics near perfect saddles."""
from __future__ import annotations

__version__ = "0.1.0"
