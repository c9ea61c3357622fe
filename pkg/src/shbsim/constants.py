"""Physical constants used throughout the package.

All energies are in eV, all times in fs; hbar is the only conversion
factor between the two.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system anchor: energies in eV, times in fs."""

    hbar: float = 0.6582119569  # eV*fs

    def __post_init__(self) -> None:
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


CONSTANTS = PhysicalConstants()
HBAR = CONSTANTS.hbar
