"""p-adic numbers, Hecke roots, Teichmuller characters and the p-adic FE check."""
