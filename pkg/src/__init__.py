"""
Kernel NC1 - variability collapse of infinite-width kernels, adaptive kernels and trained FCNs
"""

__version__ = "1.0.0"
