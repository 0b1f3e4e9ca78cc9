"""Quasi-Doppler joint phase modulation: one symbol, two receivers on orthogonal axes."""
__version__ = "0.1.0"
