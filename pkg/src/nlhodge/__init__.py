"""Chart-level nonlinear nonabelian Hodge computations."""
__version__ = "0.1.0"
