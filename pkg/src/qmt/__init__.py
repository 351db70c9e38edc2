"""Information gain, fidelity and reversibility of quantum measurements.

Every quantity is computed from the singular values of one measurement
operator; see :mod:`qmt.quantities` for the single-outcome formulas.
"""

from .example_class import (
    ExampleParams,
    fidelity_ex,
    identity_expansion,
    information_ex,
    projective,
    reversibility_ex,
    spectrum_of,
)
from .quantities import (
    AverageReport,
    OutcomeReport,
    averages,
    efficiencies,
    estimation_fidelity,
    fidelity,
    information,
    j_grouped,
    j_naive,
    report,
    reversibility,
    subentropy_q,
)
from .spectrum import (
    MeasurementSet,
    SingularSpectrum,
    SpectrumGroups,
    completeness_defect,
    group,
    hs_norm_sq,
    rescale_to_unit_max,
    trace_norm,
    validate,
)

__version__ = "0.1.0"
