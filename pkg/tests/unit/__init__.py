"""Unit tests for ccr_forge components."""
