"""Numeric tolerances used across the package.

Double precision carries ~16 digits; each constant leaves about two digits
of headroom over the error actually observed.
"""

#: agreement of closed-form / lambda-route / alternative-formula evaluations
CORE = 1e-12
#: round trips through lambda and its inverse, and the complex Cayley path
ROUND_TRIP = 1e-10
#: closest-approach law phi(v, 0) == arcsin v
CLOSEST_APPROACH = 1e-13
#: relative residual of the light-travel-time equation, scaled by max(1, |T|)
RETARDED_RESIDUAL = 1e-10
#: guard band (in ulps) around the singular points of lambda and the punctures
SINGULAR_ULPS = 1
