"""Test suite for the reservoir confabulation toolkit."""
