"""Decision procedure for first-order predicates over Fibonacci-automatic words."""
__version__ = "0.1.0"
