"""Configuration settings for the hyperbolic Schrödinger laboratory"""
import os
from dotenv import load_dotenv

load_dotenv()

CODE_VERSION = "1.0.0"

# Logging Configuration
LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Run Configuration
DEFAULT_SEED = int(os.environ.get("HYPLAB_SEED", 20240101))
DEFAULT_THREADS = int(os.environ.get("HYPLAB_THREADS", 1))
OUTPUT_DIR = os.environ.get("HYPLAB_OUTPUT_DIR", "results")

# Pair binning works on fixed chunks of first indices; never derived from the thread count
PAIR_CHUNK_SIZE = int(os.environ.get("HYPLAB_CHUNK_SIZE", 256))

# Database Configuration (run ledger); None means <output dir>/runs.db
DATABASE_URL = os.environ.get("DATABASE_URL")

# Numerical tolerances
ROUNDTRIP_RTOL = 1e-12
QUADRATURE_RTOL = 1e-9
MASS_DRIFT_WARN = 1e-10

# Model defaults
DEFAULT_MU = 1.0
DEFAULT_PICARD_STEPS = 8
DEFAULT_PADDING = 1.5

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
