"""Exact quasimap series, verification suites and graph sums"""
from .series import TruncSeries
from .geometry import Geometry
from .correlators import HodgeIntegralTable
from .export import SeriesExporter
from .validation import VerificationReport
