"""Exact operational probability on finite systems.

States are probability measures on a finite phase space, observables are
stochastic kernels, and correlations between two observables are split into
a classical part and an entanglement part by their density functions.
"""

from .correlation import (
    Classification,
    CorrelationReport,
    classify,
    correlation_coefficient,
    covariance,
    independent_at,
    rho_c,
    rho_e,
    rho_t,
)
from .couplings import (
    Coupling,
    comonotone_coupling,
    most_entangling_row,
    product_coupling,
    vertex_couplings,
)
from .errors import OpcorrError, ValidationError
from .measures import (
    Density,
    FiniteSpace,
    Measure,
    ProbabilityMeasure,
    dirac,
    is_absolutely_continuous,
    make_probability_measure,
    marginal,
    mix,
    product,
    radon_nikodym,
    uniform,
)
from .observables import (
    JointObservable,
    Observable,
    apply,
    deterministic_observable,
    is_deterministic,
    make_joint,
    marginal_observable,
    product_joint,
)
from .systemfile import SystemFile, load

__version__ = "0.1.0"
