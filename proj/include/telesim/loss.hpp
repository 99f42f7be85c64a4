#pragma once

#include "telesim/fock.hpp"

namespace telesim {

/// Per-mode transmissivities of the two distribution channels.
struct ChannelSpec {
  double t1 = 1.0;
  double t2 = 1.0;

  void validate() const;
  static ChannelSpec symmetric_from_total_db(double total_loss_db);
  static ChannelSpec from_db(double loss1_db, double loss2_db);
};

double db_to_transmissivity(double loss_db);
double transmissivity_to_db(double t);
double squeeze_db_to_r(double r_db);
double r_to_squeeze_db(double r);

/// Kraus operators of the pure-loss channel at transmissivity t on a
/// d-dimensional mode: G_l = a^l sqrt(t)^n / sqrt(l!) * ((1-t)/t)^(l/2),
/// l = 0..d-1. Losses of d or more photons vanish identically on the
/// truncated space.
std::vector<Matrix> kraus_set(double t, int d);

/// Kraus sum applied on one mode of a multi-mode density operator.
FockOperator apply_loss(const FockOperator& rho, int mode, double t);

/// Loss applied to a two-mode pure-state ensemble: each vector branches into
/// the Kraus images on the given mode. Branches below the weight floor are
/// dropped (their total mass is bounded by n_vectors * floor).
struct PureEnsemble {
  FockDims dims;
  std::vector<Vector> vectors;  // rho = sum_k v_k v_k^dag

  double total_weight() const;
  FockOperator to_density() const;
};

PureEnsemble apply_loss_ensemble(const PureEnsemble& in, int mode, double t,
                                 double weight_floor = 1e-16);

}  // namespace telesim
