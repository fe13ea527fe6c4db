"""Bianchi L-values - twisted L-values of base-change Bianchi forms and their functional equations."""
__version__ = "1.0.0"
