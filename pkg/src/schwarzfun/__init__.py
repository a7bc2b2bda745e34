"""Schwarz functions of analytic curves by AAA rational approximation."""

from .aaafit import FitConfig, FitMode, FitReport, aaa_fit, cleanup_spurious, loewner_weights
from .curves import CATALOG, Curve, SampleSet, parse_curve, sample_clustered, sample_points, sample_uniform
from .field import FieldGrid, evaluate_field, export
from .ratcore import POLE, BarycentricRational, PoleReport, evaluate, is_pole, poles_and_residues, zeros
from .schwarz import (EllipseOracle, Orbit, Parity, SchwarzApprox, continue_function, fit_schwarz,
                      involution_error, oracle_circle, oracle_ellipse, orbit, reflect)

__version__ = "0.1.0"
