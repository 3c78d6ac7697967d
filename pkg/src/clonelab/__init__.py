"""Exact simulation of quantum cloning machines and the eavesdropping analyses built on them."""

__version__ = "0.1.0"
