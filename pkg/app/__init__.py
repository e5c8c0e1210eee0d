"""Reservoir-computer reconstruction, output classification and continuation sweeps."""
