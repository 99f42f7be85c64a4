#include "telesim/states.hpp"

#include <cmath>

namespace telesim {

namespace {

// Unnormalized coherent amplitude <n|alpha> without the e^(-|a|^2/2) factor
// folded in; callers track the overall scale.
double coherent_amp(double alpha, int n) {
  if (alpha == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(double(n) * std::log(alpha) - 0.5 * factorial_log(n));
}

// Fock probabilities of the normalized cat state (|a> +/- |-a>)/sqrt(N).
// Zero off the supported parity.
std::vector<double> cat_probs(double alpha, CatParity parity, int d) {
  const double a2 = alpha * alpha;
  const double norm =
      2.0 * (1.0 + (parity == CatParity::even ? 1.0 : -1.0) *
                       std::exp(-2.0 * a2));
  std::vector<double> p(d, 0.0);
  for (int n = (parity == CatParity::even) ? 0 : 1; n < d; n += 2) {
    const double c = coherent_amp(alpha, n);
    p[n] = 4.0 * std::exp(-a2) * c * c / norm;
  }
  return p;
}

int smallest_dim_for_mass(const std::function<double(int)>& prob,
                          const char* what) {
  double cum = 0.0;
  for (int d = 1; d <= kMaxCutoff; ++d) {
    cum += prob(d - 1);
    if (cum > 0.95) return d;
  }
  throw TruncationError(std::string(what) +
                        ": required cutoff exceeds the per-mode ceiling");
}

int truncation_dim_impl(const StateSpec& spec, bool* hit_ceiling) {
  auto run = [&](const std::function<double(int)>& prob, const char* what) {
    if (!hit_ceiling) return smallest_dim_for_mass(prob, what);
    try {
      return smallest_dim_for_mass(prob, what);
    } catch (const TruncationError&) {
      *hit_ceiling = true;
      return kMaxCutoff;
    }
  };
  switch (spec.kind) {
    case StateSpec::Kind::vacuum:
      return 1;
    case StateSpec::Kind::number:
      return spec.n + 1;
    case StateSpec::Kind::bell:
      return 2;
    case StateSpec::Kind::coherent: {
      const double mean = spec.alpha * spec.alpha;
      return run(
          [mean](int n) {
            return std::exp(-mean + double(n) * std::log(std::max(mean, 1e-300)) -
                            factorial_log(n));
          },
          "coherent");
    }
    case StateSpec::Kind::cat: {
      auto p = cat_probs(spec.alpha, spec.parity, kMaxCutoff + 1);
      return run([p](int n) { return p[n]; }, "cat");
    }
    case StateSpec::Kind::cv_qubit: {
      auto pm = cat_probs(spec.alpha, CatParity::odd, kMaxCutoff + 1);
      auto pp = cat_probs(spec.alpha, CatParity::even, kMaxCutoff + 1);
      const double wm = std::cos(spec.theta / 2) * std::cos(spec.theta / 2);
      return run([=](int n) { return wm * pm[n] + (1.0 - wm) * pp[n]; },
                 "cv_qubit");
    }
    case StateSpec::Kind::hybrid: {
      auto pm = cat_probs(spec.alpha, CatParity::odd, kMaxCutoff + 1);
      auto pp = cat_probs(spec.alpha, CatParity::even, kMaxCutoff + 1);
      return run([=](int n) { return 0.5 * (pm[n] + pp[n]); }, "hybrid");
    }
    case StateSpec::Kind::tmsv: {
      const double l2 = std::pow(std::tanh(spec.r), 2);
      return run([l2](int n) { return (1.0 - l2) * std::pow(l2, n); }, "tmsv");
    }
  }
  throw PreconditionError("truncation_dim: unknown state kind");
}

}  // namespace

StateSpec StateSpec::number(int n) {
  StateSpec s;
  s.kind = Kind::number;
  s.n = n;
  return s;
}
StateSpec StateSpec::coherent(double alpha) {
  StateSpec s;
  s.kind = Kind::coherent;
  s.alpha = alpha;
  return s;
}
StateSpec StateSpec::cat(double alpha, CatParity parity) {
  StateSpec s;
  s.kind = Kind::cat;
  s.alpha = alpha;
  s.parity = parity;
  return s;
}
StateSpec StateSpec::cv_qubit(const CatQubitParams& p) {
  StateSpec s;
  s.kind = Kind::cv_qubit;
  s.alpha = p.alpha;
  s.theta = p.theta;
  s.phi = p.phi;
  return s;
}
StateSpec StateSpec::tmsv(double r) {
  StateSpec s;
  s.kind = Kind::tmsv;
  s.r = r;
  return s;
}
StateSpec StateSpec::hybrid(double alpha) {
  StateSpec s;
  s.kind = Kind::hybrid;
  s.alpha = alpha;
  return s;
}
StateSpec StateSpec::bell() {
  StateSpec s;
  s.kind = Kind::bell;
  return s;
}

int truncation_dim(const StateSpec& spec) {
  return truncation_dim_impl(spec, nullptr);
}

ResolvedCutoff truncation_dim_clamped(const StateSpec& spec) {
  ResolvedCutoff rc;
  rc.d = truncation_dim_impl(spec, &rc.clamped);
  return rc;
}

ResolvedCutoff resolve_run_cutoff(const std::vector<StateSpec>& specs) {
  ResolvedCutoff rc;
  for (const auto& s : specs) {
    const ResolvedCutoff one = truncation_dim_clamped(s);
    rc.d = std::max(rc.d, one.d);
    rc.clamped = rc.clamped || one.clamped;
  }
  return rc;
}

namespace {

Vector guard_normalize(Vector amps, double min_trace, const char* what) {
  const double norm2 = amps.squaredNorm();
  if (norm2 <= 0.0)
    throw DegenerateStateError(std::string(what) + ": zero-norm state");
  if (min_trace > 0.0 && norm2 < min_trace)
    throw TruncationError(std::string(what) + ": retained trace " +
                          std::to_string(norm2) + " below guard");
  return amps / std::sqrt(norm2);
}

}  // namespace

Vector fock_ket(int n, int d) {
  if (n >= d) throw DimensionError("fock_ket: level exceeds cutoff");
  Vector v = Vector::Zero(d);
  v(n) = 1.0;
  return v;
}

Vector coherent_ket(double alpha, int d, double min_trace) {
  if (d < 1) throw DimensionError("coherent_ket: cutoff must be >= 1");
  Vector v(d);
  const double log_gauss = -0.5 * alpha * alpha;
  for (int n = 0; n < d; ++n)
    v(n) = (alpha == 0.0 && n > 0)
               ? 0.0
               : std::exp(log_gauss + double(n) * std::log(std::max(alpha, 1e-300)) -
                          0.5 * factorial_log(n));
  if (alpha == 0.0) v(0) = 1.0;
  return guard_normalize(std::move(v), min_trace, "coherent_ket");
}

namespace {

// Amplitudes of the full-space-normalized cat state cut at d, without the
// window renormalization.
Vector cat_amplitudes(double alpha, CatParity parity, int d) {
  if (d < 1) throw DimensionError("cat_ket: cutoff must be >= 1");
  if (parity == CatParity::odd && alpha == 0.0)
    throw DegenerateStateError("cat_ket: odd cat degenerates at alpha = 0");
  const double a2 = alpha * alpha;
  const double norm =
      2.0 * (1.0 + (parity == CatParity::even ? 1.0 : -1.0) *
                       std::exp(-2.0 * a2));
  Vector v = Vector::Zero(d);
  for (int n = (parity == CatParity::even) ? 0 : 1; n < d; n += 2)
    v(n) = 2.0 * std::exp(-0.5 * a2) * coherent_amp(alpha, n) /
           std::sqrt(norm);
  return v;
}

}  // namespace

Vector cat_ket(double alpha, CatParity parity, int d, double min_trace) {
  return guard_normalize(cat_amplitudes(alpha, parity, d), min_trace,
                         "cat_ket");
}

Vector cv_qubit_ket(const CatQubitParams& p, int d, double min_trace) {
  if (p.alpha < 0.0)
    throw PreconditionError("cv_qubit_ket: alpha must be non-negative");
  // Combine the ideal cat amplitudes first, truncate, then renormalize;
  // theta = pi never touches the degenerate odd branch.
  const double cm = std::cos(p.theta / 2);
  const double sm = std::sin(p.theta / 2);
  Vector v = Vector::Zero(d);
  if (std::abs(cm) > 1e-15)
    v += cm * cat_amplitudes(p.alpha, CatParity::odd, d);
  if (std::abs(sm) > 1e-15)
    v += std::polar(sm, p.phi) * cat_amplitudes(p.alpha, CatParity::even, d);
  return guard_normalize(std::move(v), min_trace, "cv_qubit_ket");
}

Vector hybrid_ket(double alpha, int d_cv, double min_trace) {
  if (alpha <= 0.0)
    throw DegenerateStateError("hybrid_ket: requires alpha > 0");
  // The truncation rule applies to the parity mixture the CV mode carries;
  // each cat is then renormalized so the Schmidt weights stay exactly even.
  const Vector rm = cat_amplitudes(alpha, CatParity::odd, d_cv);
  const Vector rp = cat_amplitudes(alpha, CatParity::even, d_cv);
  const double retained = 0.5 * (rm.squaredNorm() + rp.squaredNorm());
  if (min_trace > 0.0 && retained < min_trace)
    throw TruncationError("hybrid_ket: retained trace " +
                          std::to_string(retained) + " below guard");
  const Vector cm = rm / rm.norm();
  const Vector cp = rp / rp.norm();
  // (|cat_->|0> + |cat_+>|1>)/sqrt(2), DV mode last with cutoff 2.
  Vector v = Vector::Zero(2L * d_cv);
  for (int n = 0; n < d_cv; ++n) {
    v(2L * n) = cm(n) / std::sqrt(2.0);
    v(2L * n + 1) = cp(n) / std::sqrt(2.0);
  }
  return v;
}

Vector tmsv_ket(double r, int d, double min_trace) {
  if (r < 0.0) throw PreconditionError("tmsv_ket: r must be >= 0");
  const double lambda = std::tanh(r);
  Vector v = Vector::Zero(long(d) * d);
  for (int n = 0; n < d; ++n)
    v(long(n) * d + n) = std::sqrt(1.0 - lambda * lambda) * std::pow(lambda, n);
  return guard_normalize(std::move(v), min_trace, "tmsv_ket");
}

Vector bell_ket(BellKind kind) {
  Vector v = Vector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::phi_plus:
      v(0) = s;
      v(3) = s;
      break;
    case BellKind::phi_minus:
      v(0) = s;
      v(3) = -s;
      break;
    case BellKind::psi_plus:
      v(1) = s;
      v(2) = s;
      break;
    case BellKind::psi_minus:
      v(1) = s;
      v(2) = -s;
      break;
  }
  return v;
}

FockOperator cat_state(double alpha, CatParity parity, int d) {
  return pure_density(FockDims::single(d), cat_ket(alpha, parity, d));
}

FockOperator cv_qubit(const CatQubitParams& p, int d) {
  return pure_density(FockDims::single(d), cv_qubit_ket(p, d));
}

FockOperator hybrid_state(double alpha, int d_cv) {
  return pure_density(FockDims({d_cv, 2}), hybrid_ket(alpha, d_cv));
}

FockOperator tmsv(const TmsvParams& p, int d) {
  return pure_density(FockDims({d, d}), tmsv_ket(p.r, d));
}

FockOperator bell_state(BellKind kind) {
  return pure_density(FockDims({2, 2}), bell_ket(kind));
}

}  // namespace telesim
