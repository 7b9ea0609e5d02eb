"""Maximum likelihood estimation on toric models of canonical Del Pezzo surfaces.

The package is organised bottom-up:

``lattice``     reflexive polygons, singularities, the 16-entry catalog
``model``       toric models, parametrization, binomials, likelihood
``birch``       numerical MLE by moment matching
``closedform``  radical formulas for the cubic and quartic models
``mldegree``    ML degree by exact elimination
``cli``         command-line front end
"""
from .birch import MLEResult, SolverOptions, moment_residual, solve_birch
from .closedform import (
    SUPPORTED_MODELS,
    audit_paper_polynomials,
    eliminate_to_univariate,
    mle_closed_form,
    paper_polynomial,
    solve_cubic,
    solve_quartic,
    theta_from_p,
)
from .errors import (
    ConvergenceError,
    DomainError,
    GenericityError,
    GeometryError,
    InconsistencyError,
    MalformedInputError,
    PreconditionError,
    ToricMLEError,
    UnsupportedModelError,
)
from .lattice import (
    CatalogEntry,
    LatticePolygon,
    SingularityProfile,
    catalog,
    lattice_points,
    lookup,
    normal_fan,
    polytope_to_matrix,
    singularity_profile,
    validate_reflexive,
)
from .mldegree import (
    LikelihoodSystem,
    MLDegreeReport,
    complex_roots,
    likelihood_equations,
    ml_degree,
    sylvester_resultant,
)
from .model import (
    Binomial,
    DataVector,
    ToricModel,
    degree_of_variety,
    kernel_binomials,
    log_likelihood,
    parametrize,
    sufficient_statistic,
    torus_fiber_degree,
    variety_residual,
)
from .polynomial import MultivariatePolynomial, UnivariatePolynomial

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
