"""Certified Brownian paths built from bit sources.

Bits are split into coefficient substreams, turned into certified Gaussian
enclosures, and fed to the midpoint recursion.  On top sit comparison
oracles, minimizer localization, walk codes and a statistical harness.
"""

from .bitstream import (BitSource, CsprngSource, FileSource, IndexBeyondFile, bit,
                        cantor_pair, coefficient_substream, complement_view)
from .exactnum import Dyadic, Enclosure, Order, parse_dyadic
from .gauss import CutoffExceeded, NormalQuery, normal_cdf, normal_inverse
from .levypath import (PathEvaluator, TailBound, TailBoundViolation, TruncatedXi,
                       coefficient_index, value_at_dyadic, value_at_real, xi)
from .minimizers import (Exhausted, MinimizerRecord, enumerate_minimizers, grid_argmin,
                         locate_minimizer)
from .oracle import (Budget, DyadicInterval, MinimumSearch, Verdict, compare_at_points,
                     compare_to_rational, interval_min_enclosure, sign_certificate)
from .walks import WalkCode, code_of_path, sup_distance, walk_value

__version__ = "0.1.0"
