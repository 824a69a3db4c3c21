from .opcore import POLICY, DensityMatrix, DimensionMismatch, NumericPolicy, SubsystemSignature, UnknownLabel
from .channels import ChannelEnsemble, EnsembleEntry, QuantumChannel, mixture
from .telecov import CorrectionTable, MissingCorrection, WeylGroup
from .condsim import ChainViolation, ControlProgramState, MissingDescriptor, SimulationDescriptor
from .entro import ReeMethod, ReeResult, ree_ppt
