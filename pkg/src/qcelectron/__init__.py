"""First-order free-electron/photon interaction: spectra, Wigner grids, weak values."""
from .classical_dynamics import ClassicalKick, point_kick_closed, point_kick_ode
from .electron_wavepacket import (ElectronParameters, WavepacketState, extinction_factor,
                                  make_wavepacket, momentum_amplitude, momentum_density,
                                  momentum_grid, position_wavefunction)
from .errors import (IntegrationError, InvalidParameterError, NumericDomainError,
                     UndefinedWeakValueError)
from .perturbation import (CoherentRegime, FockRegime, InteractionConfig, ScatteredState,
                           TransferResult, arc_check, classical_coupling, energy_transfer_analytic,
                           energy_transfer_numeric, make_config, scattered_amplitudes)
from .phase_space import WignerGrid, decohere, marginals, wigner_from_scattered, wigner_from_sidebands
from .photon_state import (PhotonMode, PhotonState, coherent_amplitude_from_field, coherent_state,
                           expectation_annihilation, fock_state, laguerre, make_photon_state,
                           mean_photon_number, overlap)
from .spectra import (SpectrumResult, classical_limit_distribution, classify_regime,
                      final_distribution, quantum_limit_distribution)
from .weak_measurement import WeakValueResult, pointer_shift, vector_potential_weak_value

__version__ = "0.1.0"
