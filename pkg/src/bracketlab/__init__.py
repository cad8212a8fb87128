"""bracketlab: a certified laboratory for bracket words and their statistics.

Modules
-------
exactreal     adaptive-precision certified reals (floors, fractional parts)
gp_core       bracket expressions, codings, word generation
hardy         growth expressions, derivatives, Taylor window models
equidist      exact discrepancy, structure dichotomy, sublevel measures
taylor_error  floor-error profiles, trichotomy classification, censuses
subword       factor counting, complexity curves, growth fits
nilheis       Heisenberg group orbits and the circle suspension
mobius        Mobius sieve and correlation experiments
cli           command-line orchestration of the above
"""

from . import (  # noqa: F401
    equidist,
    exactreal,
    gp_core,
    hardy,
    mobius,
    nilheis,
    subword,
    taylor_error,
)
from .errors import (  # noqa: F401
    BracketLabError,
    BudgetTooSmall,
    CodingGap,
    DegenerateCurve,
    DomainError,
    DomainWarning,
    EmptyInput,
    FloorUndecidable,
    HTooLarge,
    LimitExceeded,
    OrderCapExceeded,
    ParseError,
    PrecisionCapExceeded,
    RegimeWarning,
    SignChange,
    TooShort,
    ZeroPolynomial,
)

__version__ = "0.1.0"
