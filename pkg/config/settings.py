"""
Binomial Growth Analyzer Configuration
Numerical defaults for the recurrence, estimation, circle-evaluation and constructor stages
"""
import os
from fractions import Fraction
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# =============================================================================
# RECURRENCE
# =============================================================================

class RecurrenceConfig:
    TERMS = int(os.getenv("GROWTH_TERMS", "512"))  # a_0..a_N with N = TERMS
    PRECISION_BITS = int(os.getenv("GROWTH_PRECISION_BITS", "256"))

    # Extra exact terms computed past N before the tail reduction that isolates
    # slowly decaying (recessive) solutions; the result is truncated back to N
    TAIL_EXTENSION_MIN = 32
    TAIL_EXTENSION_DIVISOR = 4  # extension = max(MIN, N // DIVISOR)

    # solution_basis needs N >= MIN_TERMS_FACTOR * (m + d)
    MIN_TERMS_FACTOR = 4

# =============================================================================
# GROWTH ESTIMATION
# =============================================================================

class EstimateConfig:
    CHI_TOLERANCE = float(os.getenv("GROWTH_CHI_TOLERANCE", "0.05"))
    TYPE_TOLERANCE = float(os.getenv("GROWTH_TYPE_TOLERANCE", "0.10"))

    # Dyadic trend detector: cumulative change across the last three transitions
    TREND_RATIO = 1.10
    TREND_WINDOWS = 4  # [N/16,N/8], [N/8,N/4], [N/4,N/2], [N/2,N]

    # Upper-envelope regression for chi
    ENVELOPE_SLOPE_JUMP = 8.0  # nats per index step between adjacent envelope edges
    MIN_FIT_POINTS = 8

# =============================================================================
# CIRCLE EVALUATION
# =============================================================================

class CircleConfig:
    RADII = os.getenv("GROWTH_RADII", "50,100,200,400")
    SAMPLES = int(os.getenv("GROWTH_SAMPLES", "256"))
    MIN_SAMPLES = 64
    MIN_RADII = 4

    # Term budget: eval refuses |z| = r when N < BUDGET_FACTOR * r^rho
    BUDGET_FACTOR = int(os.getenv("GROWTH_BUDGET_FACTOR", "8"))

    # Geometric majorant: consecutive term ratio must stay below this
    TAIL_RATIO = Fraction(1, 2)

    # Verdict brackets on L_fit / L_j
    NARROW_BRACKET = 0.10
    WIDE_BRACKET = 0.15
    AGREEMENT_BRACKET = 0.15  # circle-side L_fit vs coefficient-side tau_hat

# =============================================================================
# CONSTRUCTOR
# =============================================================================

class ConstructorConfig:
    SIGMA_FLOAT_BITS = 64
    PREVIEW_TERMS = 8

# =============================================================================
# EXIT CODES
# =============================================================================

class ExitCodes:
    OK = 0
    INPUT_ERROR = 2
    EMPTY_PROFILE = 3
    PRECISION = 4
    INVARIANT = 5

# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
LOG_FILE = os.getenv("LOG_FILE", "")  # e.g. "logs/growth_{time:YYYY-MM-DD}.log"
