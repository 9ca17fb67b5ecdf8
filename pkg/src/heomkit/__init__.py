"""
heomkit: hierarchical equations of motion for bosonic and fermionic
environments, with bath-decomposition and fitting toolkits, time evolution,
steady states, and ADO-based bath observables.
"""

from .baths import (
    BosonicBath,
    DrudeLorentz,
    ExponentTerm,
    OhmicExp,
    Tabulated,
    Underdamped,
    correlation_from_terms,
    correlation_numeric,
    matsubara_drude_lorentz,
    matsubara_underdamped,
    ohmic_correlation,
    pade_drude_lorentz,
    power_spectrum_from_terms,
    underdamped_terminator,
)
from .bosonic import TimeDependentHamiltonian, build_bosonic_rhs, merge_exponents
from .drives import PulseTrain, drive_coefficient, pulse_windows
from .fermionic import (
    FermionicBath,
    PadePoles,
    build_fermionic_rhs,
    pade_lorentzian_bath,
    pade_poles,
)
from .fitting import (
    CorrelationFit,
    SpectralFit,
    fit_correlation,
    fit_spectral_meier_tannor,
    fit_to_bath,
)
from .generator import HeomRHS, HierarchyExponent
from .hierarchy import HierarchySpace, enumerate_space, fermionic_insertion_parity
from .observables import (
    AdoSelector,
    electronic_current,
    expectation,
    get_ado,
    heat_current,
)
from .oracles import LandauerSpec, gibbs_state, landauer_current, pure_dephasing_coherence
from .solvers import HierarchyState, Trajectory, evolve, steady_state

__version__ = "0.1.0"
