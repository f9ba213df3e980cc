"""Semi-symbolic inference: conjugate graph updates with deferred sampling."""

from .symbolic import RVar, SAffine, SAffineVec, SApp, SLinVec, SPair, SymExpr, is_symbolic  # noqa: F401
from .conjugacy import (  # noqa: F401
    AffineGaussianCond,
    BetaBernoulliCond,
    MvAffineGaussianCond,
    ScalarMvGaussianCond,
)
from .graph import (  # noqa: F401
    NaiveGraph,
    Node,
    PendingDist,
    StreamingGraph,
    distribution_of,
    force_value,
)
from .engine import DsEngine, bds_end_of_step  # noqa: F401
