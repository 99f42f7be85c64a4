#pragma once

#include "telesim/bsm.hpp"
#include "telesim/fock.hpp"
#include "telesim/loss.hpp"

namespace telesim {

enum class NgKind {
  none,
  symmetric_ps,
  symmetric_pa,
  delocalized_ps,
  delocalized_pa,
  catalysis,
  scissors,
};

enum class NgPlacement { before, after };
enum class NgTarget { both, sender, receiver };

/// Heralded operation applied to the two-mode resource state.
///   symmetric_ps     a1 a2
///   symmetric_pa     a1^dag a2^dag               (cutoffs grow by one)
///   delocalized_ps   (a1 + a2)/sqrt(2)           (before transmission only)
///   delocalized_pa   (a1^dag + a2^dag)/sqrt(2)   (before transmission only)
///   catalysis        R(tc) on the targeted mode(s)
///   scissors         M(ts) on both modes         (after transmission only)
struct NgOpSpec {
  NgKind kind = NgKind::none;
  NgPlacement placement = NgPlacement::before;
  double tc = 0.5;
  double ts = 0.5;
  NgTarget target = NgTarget::both;

  void validate() const;
  /// Delocalized operations steer the low sector toward the psi Bell pair;
  /// the H-BSM correction table flips accordingly.
  ResourceType resource_type() const;
  /// Subtraction/addition operators carry no beam-splitter prefactor, so
  /// their heralding weight is unnormalized and may exceed one.
  bool idealized_heralding() const;
};

const char* ng_kind_name(NgKind kind);
NgKind ng_kind_from_name(const std::string& name);
const char* ng_placement_name(NgPlacement placement);
const char* ng_target_name(NgTarget target);

/// Photon-catalysis operator, diagonal per Fock level:
/// sqrt(tc) ((tc-1)/tc n + 1) sqrt(tc)^n.
Matrix catalysis_op(double tc, int d);

/// Quantum-scissors operator sqrt(ts)|0><0| + sqrt(1-ts)|1><1|; annihilates
/// every level above one.
Matrix scissors_op(double ts, int d);

struct NgResult {
  double p_operation = 1.0;
  ResourceType resource_type = ResourceType::phi_like;
};

/// rho' = O rho O^dag / P with P = tr{O rho O^dag} on a two-mode resource.
std::pair<FockOperator, NgResult> apply_ng(const FockOperator& rho,
                                           const NgOpSpec& spec);

/// Ensemble flavor; rescales the ensemble back to unit weight and returns
/// the heralding data. Photon addition grows the mode cutoffs in place.
NgResult apply_ng_ensemble(PureEnsemble& ens, const NgOpSpec& spec);

}  // namespace telesim
