"""Bianchi form coefficient engines: base change, stabilisation, Fourier terms."""
