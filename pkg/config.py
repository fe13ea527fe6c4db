"""Configuration management for bianchi-lvalues."""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

VERSION = "1.0.0"

# Working precision in decimal digits
DEFAULT_PRECISION = int(os.getenv("BIANCHI_PRECISION", "50"))
# p-adic precision (digits in base p)
PADIC_PRECISION = int(os.getenv("BIANCHI_PADIC_PRECISION", "30"))
# Extra digits carried internally on top of the requested precision
GUARD_DIGITS = int(os.getenv("BIANCHI_GUARD_DIGITS", "10"))

# Relative tolerances are floored here
TOLERANCE_FLOOR = os.getenv("BIANCHI_TOLERANCE_FLOOR", "1e-40")

# FE checks evaluate both sides at c0 * SPLIT_RATIO, c0 = N(m)^(-1/4)
SPLIT_RATIO = os.getenv("BIANCHI_SPLIT_RATIO", "1.25")
# Smallest t accepted by fourier_term
T_FLOOR = os.getenv("BIANCHI_T_FLOOR", "1e-3")
# mpmath.quad maxdegree before QuadratureBudgetExceeded
QUAD_MAX_DEGREE = int(os.getenv("BIANCHI_QUAD_MAX_DEGREE", "8"))
# Largest ideal norm a theta series may sum over
MAX_THETA_NORM = int(os.getenv("BIANCHI_MAX_THETA_NORM", "2000000"))

# Batch parallelism (process pool size; 1 runs in-process)
WORKERS = int(os.getenv("BIANCHI_WORKERS", "1"))

# Storage
CACHE_DIR = Path(os.getenv("BIANCHI_CACHE_DIR", str(Path.home() / ".cache" / "bianchi-lvalues")))
DATA_DIR = Path(os.getenv("BIANCHI_DATA_DIR", str(Path(__file__).parent / "data")))

# Logging
LOG_LEVEL = os.getenv("BIANCHI_LOG_LEVEL", "WARNING")
