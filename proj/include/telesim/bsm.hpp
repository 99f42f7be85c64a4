#pragma once

#include <string>

#include "telesim/fock.hpp"
#include "telesim/loss.hpp"
#include "telesim/states.hpp"

namespace telesim {

enum class ResourceType { phi_like, psi_like };

struct HbsmOutcome {
  BellKind outcome = BellKind::phi_plus;
  double probability = 0.0;
  double fidelity = 0.0;
  std::string correction;      // applied qubit-block unitary: I, Z, X, ZX
  FockOperator conditional;    // normalized post-correction state when kept
  bool has_state = false;
};

struct ProtocolResult {
  std::vector<HbsmOutcome> outcomes;
  double p_bsm = 0.0;
  double p_operation = 1.0;
  double p_total = 0.0;  // p_bsm * p_operation
  double f_bar = 0.0;    // sum p_i F_i / p_bsm
};

/// Bell projectors on a (d1 x d3) two-mode space, qubit-sector vectors
/// zero-padded. complete: {P_phi+, P_phi-, P_psi+, P_psi-, P_fail};
/// incomplete: {P_psi+, P_psi-, P_fail'}. The failure projector is the
/// complement of the kept set.
std::vector<FockOperator> bell_projectors(bool complete, int d1, int d3);

/// Pauli-type block on span{|0>,|1>}, identity on higher levels. A psi-like
/// resource swaps the roles of the Phi and Psi outcomes (extra qubit flip).
Matrix correction_unitary(BellKind outcome, ResourceType type, int d);

struct HbsmSetup {
  int input_mode = 0;             // measured input mode (index in rho_joint)
  int resource_measured_mode = 1; // resource mode coupled to the BSM
  int resource_output_mode = 2;   // resource mode carrying the output
  ResourceType resource_type = ResourceType::phi_like;
  bool complete = true;
  double p_operation = 1.0;       // heralding weight of earlier operations
  bool keep_states = false;
};

/// Projective H-BSM teleportation on a dense joint state. The conditional
/// states live on the unmeasured modes in their original order; target_ket
/// must be arranged accordingly (output mode in place of the resource
/// output).
ProtocolResult hbsm_teleport(const FockOperator& rho_joint,
                             const Vector& target_ket, const HbsmSetup& setup);

/// Same protocol on a pure input ket and a resource kept as a pure-state
/// ensemble over modes (measured, output). Conditional states are never
/// materialized unless keep_states is set; the unmeasured order is
/// (input spectators..., output).
ProtocolResult hbsm_teleport_ensemble(const Vector& input_ket,
                                      const FockDims& input_dims,
                                      int measured_input_mode,
                                      const PureEnsemble& resource,
                                      const Vector& target_ket,
                                      ResourceType resource_type,
                                      bool complete, double p_operation = 1.0,
                                      bool keep_states = false);

}  // namespace telesim
