"""porogauge: gauge functions, Whitney decompositions, quasihyperbolic
distances, weak mean porosity and a dyadic fractal example domain."""

__version__ = "0.1.0"
SCHEMA_VERSION = "1"

from . import errors  # noqa: F401
from .gauge import (  # noqa: F401
    GaugeFunction,
    JonesMakarovGauge,
    LogPowerGauge,
    PowerGauge,
    TabulatedGauge,
    alpha_from_gauge,
    check_conditions,
    classify_divergence,
    divergence_integral,
    gauge_from_json,
    jones_integral,
    psi_from_phi,
    tech_lemma_check,
)
