"""Storage adapters."""

from .product_cache import ProductCache, ProductTable

__all__ = ["ProductCache", "ProductTable"]
