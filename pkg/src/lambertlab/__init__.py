"""Lambert multipliers and *-multiplication operators between Orlicz spaces,
realized on finite measure spaces."""

from .errors import (
    DimensionRefusal,
    InvalidInput,
    NumericFailure,
    UnboundedConjugate,
)
from .measure import (
    FiniteMeasureSpace,
    Partition,
    conditional_expectation,
    essential_sup,
    integrate,
    support,
)
from .young import Entropy, PiecewiseLinear, Power, YoungFunction, young_from_dict
from .orlicz import NormResult, indicator_norm, luxemburg_norm, modular
from .lambert import (
    OperatorMatrix,
    SandwichReport,
    assemble_operator,
    kstar_norm,
    operator_norm_bruteforce,
    operator_norm_sample,
    sandwich_check,
    star,
)
from .criteria import (
    ClosedRangeReport,
    FredholmReport,
    bounded_below_constant,
    closed_range_check,
    fredholm_check,
)

__version__ = "0.1.0"
