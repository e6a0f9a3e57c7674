"""Dependency d-restricted synthesis of Boolean Petri nets."""
