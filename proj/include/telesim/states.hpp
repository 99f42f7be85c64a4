#pragma once

#include "telesim/fock.hpp"

namespace telesim {

enum class CatParity { even, odd };  // even: |a> + |-a>, odd: |a> - |-a>

struct CatQubitParams {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2*pi)
  double alpha = 0.0;  // real, >= 0
};

struct TmsvParams {
  double r = 0.0;  // squeezing parameter, > 0
  double lambda() const { return std::tanh(r); }
};

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

/// Symbolic description of a state prior to numerical realization; carries
/// what the truncation policy needs.
struct StateSpec {
  enum class Kind { vacuum, number, coherent, cat, cv_qubit, tmsv, hybrid, bell };
  Kind kind = Kind::vacuum;
  int n = 0;             // number state
  double alpha = 0.0;    // coherent / cat / cv_qubit / hybrid
  CatParity parity = CatParity::even;
  double theta = 0.0, phi = 0.0;  // cv_qubit
  double r = 0.0;        // tmsv

  static StateSpec vacuum() { return {}; }
  static StateSpec number(int n);
  static StateSpec coherent(double alpha);
  static StateSpec cat(double alpha, CatParity parity);
  static StateSpec cv_qubit(const CatQubitParams& p);
  static StateSpec tmsv(double r);
  static StateSpec hybrid(double alpha);
  static StateSpec bell();
};

/// Smallest cutoff d such that the state retains trace > 0.95 when truncated
/// to d Fock levels per mode (for two-mode specs, the larger requirement).
/// Throws TruncationError when the answer would exceed kMaxCutoff.
int truncation_dim(const StateSpec& spec);

/// Same rule but clamped to kMaxCutoff instead of throwing; `clamped`
/// reports whether the cap was hit (runs carrying a clamped cutoff are
/// re-checked by the convergence guard).
struct ResolvedCutoff {
  int d = 1;
  bool clamped = false;
};
ResolvedCutoff truncation_dim_clamped(const StateSpec& spec);
ResolvedCutoff resolve_run_cutoff(const std::vector<StateSpec>& specs);

// Pure-state constructors (kets). Amplitudes are the exact infinite-space
// ones cut at d and renormalized; min_trace guards against truncating away
// real weight.
Vector fock_ket(int n, int d);
Vector coherent_ket(double alpha, int d, double min_trace = 0.95);
Vector cat_ket(double alpha, CatParity parity, int d, double min_trace = 0.95);
Vector cv_qubit_ket(const CatQubitParams& p, int d, double min_trace = 0.95);
/// Mode order (CV, DV); DV cutoff is 2.
Vector hybrid_ket(double alpha, int d_cv, double min_trace = 0.95);
Vector tmsv_ket(double r, int d, double min_trace = 0.95);
Vector bell_ket(BellKind kind);

// Density-operator wrappers.
FockOperator cat_state(double alpha, CatParity parity, int d);
FockOperator cv_qubit(const CatQubitParams& p, int d);
FockOperator hybrid_state(double alpha, int d_cv);
FockOperator tmsv(const TmsvParams& p, int d);
FockOperator bell_state(BellKind kind);

}  // namespace telesim
