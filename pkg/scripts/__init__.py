"""Maintenance scripts for the qgraph fixture pack."""
