"""Time interference alignment via delay offsets in the 3-user interference channel."""

__version__ = "0.1.0"
