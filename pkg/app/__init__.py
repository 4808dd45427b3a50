"""Application package init."""
