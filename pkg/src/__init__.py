from .exact_algebra import ComplexRational, Poly, FallingPoly
from .newton_polygon import DifferenceEquation, GrowthProfile, ExactType, growth_profile, s_sequence, hull_crosscheck
from .recurrence import CoefficientSequence, RecurrenceSystem, build_system, generate_coefficients, solution_basis
from .growth_estimate import chi_estimate, type_estimate, estimate_growth, profile_match
from .series_eval import eval_series, max_modulus, empirical_growth
from .constructor import construct, build_shifted, normalize_shifts
from .equation_io import load_equation, write_equation
