"""spinsteer: reverse-engineered magnetic-field protocols for spin control.

Synthesizes time-dependent field components that drive one, two, or
several spin-1/2 systems to prescribed targets (flips, equal
superpositions, Bell and W states), and verifies every protocol by
independent forward integration, robustness quadrature, and
parameter-space search.
"""

__version__ = "0.1.0"

from .bloch import (BlochTrajectory, BlochVector, FieldProtocol, bloch_angles,
                    flip_deficit, integrate_bloch)
from .baselines import Unitary2, analytic_lambda, pulse_propagator, survival_probability
from .errors import (ConfigError, IntegrationError, PreconditionError,
                     SearchError, SpinSteerError, SynthesisError)
from .interactions import (CoupledSpinsState, InvariantDesign, TripletAmplitudes,
                           bell_fidelity, integrate_coupled_spins,
                           integrate_triplet, invariant_design,
                           isotropic_corrected_field, w_fidelity)
from .multispin import (RobustnessReport, ScanGrid, delta_map,
                        find_magic_kappa, find_superposition_kappa,
                        refine_minimum, robustness_lambda, spinflip_deficit,
                        superposition_deficit, superposition_map)
from .synthesis import (EvolutionOperatorPath, MadelungPath, PhiAnsatz,
                        PolarPath, eval_phi_ansatz, synth_from_evolution_operator,
                        synth_madelung, synth_precession)
from .twolevel import integrate_spinor, spinor_bloch_vector

__all__ = [
    "__version__",
    "BlochVector", "FieldProtocol", "BlochTrajectory",
    "integrate_bloch", "bloch_angles", "flip_deficit",
    "PhiAnsatz", "PolarPath", "EvolutionOperatorPath", "MadelungPath",
    "eval_phi_ansatz", "synth_precession", "synth_from_evolution_operator",
    "synth_madelung",
    "integrate_spinor", "spinor_bloch_vector",
    "ScanGrid", "RobustnessReport", "spinflip_deficit", "superposition_deficit",
    "delta_map", "superposition_map", "robustness_lambda", "find_magic_kappa",
    "find_superposition_kappa", "refine_minimum",
    "Unitary2", "pulse_propagator", "survival_probability", "analytic_lambda",
    "CoupledSpinsState", "TripletAmplitudes", "InvariantDesign",
    "integrate_coupled_spins", "isotropic_corrected_field", "integrate_triplet",
    "invariant_design", "bell_fidelity", "w_fidelity",
    "SpinSteerError", "PreconditionError", "SynthesisError", "IntegrationError",
    "ConfigError", "SearchError",
]
