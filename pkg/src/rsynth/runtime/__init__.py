"""Executing witnesses: RNG providers, the step interpreter, games and the fuzz emitter."""
from .interp import AssumptionViolation, GuaranteeViolation, InputSampler, StepResult, run, step  # noqa: F401
from .rng import (  # noqa: F401
    CenterBiasRng,
    CornerBiasRng,
    EmptyRange,
    RngContractViolation,
    RngProvider,
    UniformRng,
    ValidatingRng,
    make_rng,
)
