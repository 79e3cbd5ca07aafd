"""
6-GHz coexistence simulator.

Stochastic-geometry model of cellular and WiFi networks sharing the 6-GHz unlicensed band
around incumbent exclusion zones, with a distributed best-response game between network
operators that own shares of both tiers.
"""

__version__ = "0.1.0"
