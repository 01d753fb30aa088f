"""Speedrun routing over event digraphs with dynamic, vector-valued weights."""

__version__ = "0.1.0"
