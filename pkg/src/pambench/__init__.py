"""pambench: synthetic photoacoustic A-scan generation, Hilbert-envelope
MAP reconstruction, spectral preprocessing, from-scratch classifiers and a
deterministic evaluation harness."""

__version__ = "0.1.0"
