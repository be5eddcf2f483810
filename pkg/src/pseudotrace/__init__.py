"""Exact verification toolkit for pseudo-traces, Zhu-type mode algebras and genus-one trace functions."""

__version__ = "0.1.0"

from .errors import (ConvergenceDomainError, IrreducibilityError, NotProjectiveError,
                     SubstitutionError, TruncationOverflow, WindowError)
from .scalar import KAPPA, ONE, ZERO, Scalar
from .series import LaurentSeries, QLogSeries
