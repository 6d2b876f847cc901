"""
Parameter laws, feedback rules and divergence audits.
"""

from __future__ import annotations

from .adversarial import AdversarialConeSampler, AdversarialSteinerWalker
from .divergence import DivergenceAudit, divergence_audit
from .rng import setup_stream, trial_stream
from .samplers import sample
from .specs import (
    AdversarialCone,
    AdversarialSteiner,
    BaseSequence,
    FiniteIID,
    GaussianPolar,
    PoissonDirection,
    RadialLaw,
    SamplerSpec,
    Schedule,
    UniformDirection,
    UniformPolar,
    spec_from_dict,
    spec_to_dict,
)
from .streams import IndependentStream, ParameterStream, build_stream

__all__ = [
    "SamplerSpec",
    "Schedule",
    "RadialLaw",
    "BaseSequence",
    "UniformPolar",
    "UniformDirection",
    "GaussianPolar",
    "PoissonDirection",
    "FiniteIID",
    "AdversarialCone",
    "AdversarialSteiner",
    "spec_from_dict",
    "spec_to_dict",
    "sample",
    "trial_stream",
    "setup_stream",
    "ParameterStream",
    "IndependentStream",
    "build_stream",
    "AdversarialConeSampler",
    "AdversarialSteinerWalker",
    "DivergenceAudit",
    "divergence_audit",
]
