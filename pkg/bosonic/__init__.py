from .gaussian import GaussianState, IllConditionedState, LossyChannel, gaussian_rci, gaussian_rel_entropy, quasi_choi
from .fock import CutoffTooSmall, fock_oracle, fock_oracle_rel_entropy
from .mixtures import QuadratureResult, continuous_mixture_upper, lossy_mixture_bounds, plob_bound
