"""Test fixtures: named pairs, actions and problem specs."""
