"""Test suite for the IPP planning service and bench."""
