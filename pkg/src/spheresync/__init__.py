"""Synchronization of unit vectors on S^n under switching network topologies.

The library covers the generic sphere law, its SO(3) castings (complete via
unit quaternions on S^3, reduced attitude via S^2) and the planar-consensus
casting, plus runtime certificates for the convergence theorem's hypotheses
(connectivity, dwell time, hemisphere containment) and conclusion.
"""

from .analysis import (CertificateReport, ConsensusComparison, HemisphereCertificate,
                       certify, consensus_embed, consensus_oracle_compare,
                       consensus_unembed, hemisphere_certificate, lyapunov_value,
                       sync_error)
from .dynamics import (AgentStates, Scenario, SignAlignment, Trace, TraceEvent,
                       control_law, lift_so3_complete, project_so3_incomplete,
                       quaternion_sign_align, simulate, step)
from .errors import (ConfigError, DegenerateConfigurationError, DwellSpecViolationError,
                     InputError, SignalConstructionError, SingularConfigurationError,
                     SingularProjectionError, SphereSyncError)
from .manifold import (Quaternion, RotationMatrix, TangentVector, UnitVector,
                       geodesic_distance, quat_mul, quat_to_rotmat, random_unit_vector,
                       reduced_attitude, rotation_about, rotation_aligning,
                       rotmat_to_quat, sample_in_cap, sphere_exp, tangent_project)
from .network import (DwellReport, DwellTimeSpec, Graph, SwitchingSignal, active_graph,
                      count_switches, generate_switching_signal, is_connected,
                      random_connected_graph, validate_dwell)
from .shaping import (AdmissibilityReport, AdmissibilityViolation, DistanceFunction,
                      check_shaping_callables, verify_admissibility)

__version__ = "0.1.0"
