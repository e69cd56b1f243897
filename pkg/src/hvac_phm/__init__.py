"""HVAC simulator with fault injection and a fault-diagnosis benchmark harness."""

__version__ = "0.1.0"
