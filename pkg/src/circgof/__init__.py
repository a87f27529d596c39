"""Goodness-of-fit testing for circular-circular Mobius regression with wrapped Cauchy errors."""

__version__ = "0.1.0"
