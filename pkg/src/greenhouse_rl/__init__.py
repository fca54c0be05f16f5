"""Greenhouse climate control testbed.

A desk-scale closed loop for experimenting with setpoint control of a
four-variable greenhouse climate (temperature, humidity, light, CO2):

- ``env``: first-order climate simulator with actuation costs
- ``crop``: ground-truth crop growth oracle (the "real plant")
- ``surrogate``: learned per-period growth model used inside agent training
- ``gate``: growing-period / sex decision pipeline
- ``agent``: per-period Q-learning over a discrete setpoint grid, plus an
  exact brute-force policy oracle for small instances
- ``wire``: line-delimited telemetry message format
- ``cli``: reproducible experiment harness

Numeric hot loops live in ``_kernels`` with a compiled backend and a NumPy
fallback selected at import time.
"""

__version__ = "0.1.0"
