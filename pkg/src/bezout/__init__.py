"""Roots of zero-dimensional polynomial systems from Bezout matrices.

Pipeline: :func:`build_family` (Bezout matrices by Fourier evaluation and
interpolation), :func:`reduce_family` (kernel-driven compression until
``B(1)`` is invertible), :func:`companions` (``X_j = B(x_j) B(1)^{-1}``),
:func:`joint_eigen` and :func:`verify`. :func:`solve_system` runs all of it.
"""
from .poly import MultiPoly, PolySystem, PolyParseError, parse, format_poly, divided_difference
from .bezout1d import (UniPoly, companion, bezout_matrix_1d, barnett, generalized_barnett,
                       horner_basis, roots_1d)
from .bezmat import (FourierGrid, BezoutFamily, fourier_points, delta_matrix_at,
                     evaluation_matrix, interpolate, build_family, symbolic_family,
                     dump_family, load_family)
from .reduce import (NonZeroDimensional, RankReport, ReducedFamily, numerical_rank,
                     block_triangularize, reduce_family)
from .solve import (CompanionSet, RootSet, companions, joint_eigen, verify,
                    log_error_histogram, solve_system)

__version__ = "0.1.0"
