"""Integration tests for ccr_forge."""
