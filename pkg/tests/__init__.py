"""Test package for Coalesce."""
