"""Tests for bianchi-lvalues."""
