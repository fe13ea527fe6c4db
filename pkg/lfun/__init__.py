"""Complex L-values, functional-equation checks and classical oracles."""
