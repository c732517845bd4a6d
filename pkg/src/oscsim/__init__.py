"""Quantum simulation of coupled classical harmonic oscillators."""

from __future__ import annotations

__version__ = "0.1.0"
