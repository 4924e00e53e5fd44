"""
Tests module.
"""

