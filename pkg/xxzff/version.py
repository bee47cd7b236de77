"""Internal module for version (to prevent cyclic imports)"""

__version__ = "0.3.0"
