"""Desk-scale simulator of charge qubits strongly coupled to a microwave resonator."""

__version__ = "0.1.0"

from . import device, dynamics, estimation, protocols, spaces, spectroscopy

__all__ = ["device", "dynamics", "estimation", "protocols", "spaces", "spectroscopy", "__version__"]
