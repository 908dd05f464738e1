"""prodexp: product-integral exponentiation of truncated highest-weight modules."""

__version__ = "0.1.0"
