"""Test suite for ccr_forge."""
