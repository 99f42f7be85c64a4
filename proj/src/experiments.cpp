#include "telesim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "telesim/states.hpp"

namespace telesim {

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::cvbsm: return "cvbsm";
    case Protocol::hbsm: return "hbsm";
    case Protocol::hbsm_incomplete: return "hbsm-incomplete";
    case Protocol::direct: return "direct";
  }
  return "?";
}

Protocol protocol_from_name(const std::string& name) {
  for (Protocol p : {Protocol::cvbsm, Protocol::hbsm,
                     Protocol::hbsm_incomplete, Protocol::direct})
    if (name == protocol_name(p)) return p;
  throw ConfigError("unknown protocol: " + name);
}

const char* input_name(InputKind k) {
  switch (k) {
    case InputKind::cv_qubit: return "cv-qubit";
    case InputKind::hybrid_dv: return "hybrid-dv";
    case InputKind::hybrid_cv: return "hybrid-cv";
  }
  return "?";
}

InputKind input_from_name(const std::string& name) {
  for (InputKind k :
       {InputKind::cv_qubit, InputKind::hybrid_dv, InputKind::hybrid_cv})
    if (name == input_name(k)) return k;
  throw ConfigError("unknown input: " + name);
}

void ExperimentSpec::validate() const {
  if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (total_loss_db.empty()) throw ConfigError("no loss grid given");
  if (ng_kind != NgKind::none && protocol != Protocol::hbsm &&
      protocol != Protocol::hbsm_incomplete)
    throw ConfigError(
        "non-Gaussian operations require the hbsm protocol (the averaged "
        "channel form assumes a Gaussian resource)");
  if (!optimize_squeeze && squeeze_db.empty() && protocol != Protocol::direct)
    throw ConfigError("no squeezing grid given");
  if (bloch.n_theta < 2 || bloch.n_phi < 2)
    throw ConfigError("Bloch node counts must be >= 2");
}

double bloch_average(const std::function<double(double, double)>& f,
                     const BlochNodes& nodes, Convergence check) {
  auto once = [&f](int n_theta, int n_phi) {
    std::vector<double> x, w;
    gauss_legendre_nodes(n_theta, x, w);
    double acc = 0.0;
    for (int i = 0; i < n_theta; ++i) {
      const double theta = std::acos(x[i]);
      double ring = 0.0;
      for (int k = 0; k < n_phi; ++k)
        ring += f(theta, 2.0 * M_PI * k / n_phi);
      acc += 0.5 * w[i] * ring / n_phi;
    }
    return acc;
  };
  const double a = once(nodes.n_theta, nodes.n_phi);
  if (check == Convergence::off) return a;
  const double b = once(2 * nodes.n_theta, 2 * nodes.n_phi);
  if (std::abs(b - a) > 1e-4)
    throw ConvergenceError("bloch_average: doubling moved the result by " +
                           std::to_string(std::abs(b - a)));
  return b;
}

Maximum maximize_scalar(const std::function<double(double)>& f, double lo,
                        double hi, double step, double tol) {
  if (!(hi > lo) || step <= 0.0)
    throw PreconditionError("maximize_scalar: bad bracket");
  Maximum best{lo, f(lo)};
  const int n = int(std::floor((hi - lo) / step + 0.5));
  for (int i = 1; i <= n; ++i) {
    const double x = std::min(lo + i * step, hi);
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  // Golden-section refinement inside the bracket around the best cell.
  double a = std::max(lo, best.x - step);
  double b = std::min(hi, best.x + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm > best.value) best = {xm, fm};
  return best;
}

// ---------------------------------------------------------------------------
// Cutoff policy and pair-tensor cache.
// ---------------------------------------------------------------------------

namespace {

std::vector<StateSpec> input_state_specs(InputKind input, double alpha) {
  switch (input) {
    case InputKind::cv_qubit:
      return {StateSpec::cat(alpha, CatParity::odd),
              StateSpec::cat(alpha, CatParity::even)};
    case InputKind::hybrid_dv:
    case InputKind::hybrid_cv:
      return {StateSpec::hybrid(alpha)};
  }
  throw PreconditionError("input_state_specs: unknown input");
}

ResolvedCutoff run_cutoff(InputKind input, double alpha, double r,
                          bool with_resource) {
  std::vector<StateSpec> specs = input_state_specs(input, alpha);
  if (with_resource) specs.push_back(StateSpec::tmsv(r));
  return resolve_run_cutoff(specs);
}

double input_nbar(InputKind input, double alpha) {
  // Mean photon scale of the teleported mode; sizes the quadrature radius.
  return (input == InputKind::hybrid_dv) ? 1.0 : alpha * alpha + 1.0;
}

struct PtCache {
  std::mutex mutex;
  std::map<std::string, PairTensor> entries;

  const PairTensor get(const std::string& key,
                       const std::function<PairTensor()>& build) {
    std::scoped_lock lock(mutex);
    auto it = entries.find(key);
    if (it != entries.end()) return it->second;
    if (entries.size() > 24) entries.clear();
    return entries.emplace(key, build()).first->second;
  }
};

PtCache g_pt_cache;

std::string fmt_key(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

PairTensor bloch_pair_tensor(double alpha, int d, const BlochNodes& nodes) {
  std::vector<double> x, w;
  gauss_legendre_nodes(nodes.n_theta, x, w);
  PairTensor pt;
  pt.d = d;
  pt.coeff = Matrix::Zero(long(d) * d, long(d) * d);
  for (int i = 0; i < nodes.n_theta; ++i) {
    const double theta = std::acos(x[i]);
    for (int k = 0; k < nodes.n_phi; ++k) {
      const double phi = 2.0 * M_PI * k / nodes.n_phi;
      const Vector psi = cv_qubit_ket({theta, phi, alpha}, d, 0.90);
      const PairTensor one =
          pair_tensor_single(pure_density(FockDims::single(d), psi));
      pt.coeff += (0.5 * w[i] / nodes.n_phi) * one.coeff;
    }
  }
  return pt;
}

PairTensor input_pair_tensor(InputKind input, double alpha, int d,
                             const BlochNodes& bloch) {
  switch (input) {
    case InputKind::cv_qubit: {
      const std::string key = "cv:" + fmt_key(alpha) + ":" +
                              std::to_string(d) + ":" +
                              std::to_string(bloch.n_theta) + ":" +
                              std::to_string(bloch.n_phi);
      return g_pt_cache.get(
          key, [&] { return bloch_pair_tensor(alpha, d, bloch); });
    }
    case InputKind::hybrid_dv: {
      const std::string key = "hdv:" + fmt_key(alpha) + ":" + std::to_string(d);
      return g_pt_cache.get(key, [&] {
        return pair_tensor_pure(hybrid_ket(alpha, d), FockDims({d, 2}), 1);
      });
    }
    case InputKind::hybrid_cv: {
      const std::string key = "hcv:" + fmt_key(alpha) + ":" + std::to_string(d);
      return g_pt_cache.get(key, [&] {
        return pair_tensor_pure(hybrid_ket(alpha, d), FockDims({d, 2}), 0);
      });
    }
  }
  throw PreconditionError("input_pair_tensor: unknown input");
}

}  // namespace

// ---------------------------------------------------------------------------
// Protocol runners.
// ---------------------------------------------------------------------------

namespace {

// The truncation rule fixes the smallest admissible cutoff; the refinement
// ladder then grows it until a +2 bump moves the probe value by less than
// 5e-5 (a tenth of the reported 5e-4 guard, so cutoff steps cannot masquerade
// as loss-monotonicity violations). Rows that still drift at the ceiling stay
// flagged.
struct Settled {
  double f = 0.0;
  int d = 0;
  bool converged = false;
};

Settled settle_cutoff(const std::function<double(int)>& f_at, int d0) {
  int d = std::max(2, d0);
  double f = f_at(d);
  for (;;) {
    const double f2 = f_at(d + 2);
    if (std::abs(f2 - f) < 5e-5) return {f, d, true};
    if (d + 2 > kMaxCutoff) return {f, d, false};
    f = f2;
    d += 2;
  }
}

// Settling probes run at canonical parameters (ideal channel, unit gain,
// centered transmissivities), so the chosen cutoff is constant along every
// sweep series; the per-row guard still verifies the final settings.
struct SettleCache {
  std::mutex mutex;
  std::map<std::string, Settled> entries;

  Settled get(const std::string& key, const std::function<Settled()>& build) {
    std::scoped_lock lock(mutex);
    auto it = entries.find(key);
    if (it != entries.end()) return it->second;
    if (entries.size() > 4096) entries.clear();
    return entries.emplace(key, build()).first->second;
  }
};

SettleCache g_settle_cache;

double cvbsm_f_at(InputKind input, double alpha, double lambda, double g,
                  const ChannelSpec& chan, int d, const BlochNodes& bloch,
                  int grid_scale = 1) {
  const PairTensor pt = input_pair_tensor(input, alpha, d, bloch);
  QuadratureGrid grid = QuadratureGrid::standard(input_nbar(input, alpha), d);
  for (int s = 1; s < grid_scale; s *= 2) grid = grid.doubled();
  return cvbsm_pair_fidelity(pt, lambda, g, chan, grid);
}

SweepRow base_row(InputKind input, double alpha, const ChannelSpec& chan) {
  SweepRow row;
  row.input = input_name(input);
  row.alpha = alpha;
  row.total_loss_db =
      transmissivity_to_db(chan.t1) + transmissivity_to_db(chan.t2) + 0.0;
  return row;
}

}  // namespace

SweepRow run_cvbsm(InputKind input, double alpha, double r, OptParam gain,
                   const ChannelSpec& chan, const BlochNodes& bloch,
                   int d_floor) {
  chan.validate();
  const double lambda = std::tanh(r);
  // The resource stays analytic in this route; only the input is truncated.
  const ResolvedCutoff rc = run_cutoff(input, alpha, r, false);
  if (!gain.optimize && gain.value <= 0.0)
    throw PreconditionError("run_cvbsm: gain must be > 0");
  const int d_start = std::max(rc.d, d_floor);
  const double g_probe = gain.optimize ? 1.0 : gain.value;
  const std::string key = std::string("cv|") + input_name(input) + '|' +
                          fmt_key(alpha) + '|' + fmt_key(lambda) + '|' +
                          fmt_key(g_probe) + '|' + fmt_key(chan.t1) + '|' +
                          fmt_key(chan.t2) + '|' + std::to_string(d_start) +
                          '|' + std::to_string(bloch.n_theta) + '|' +
                          std::to_string(bloch.n_phi);
  const Settled settled = g_settle_cache.get(key, [&] {
    return settle_cutoff(
        [&](int d) {
          return cvbsm_f_at(input, alpha, lambda, g_probe, chan, d, bloch);
        },
        d_start);
  });

  double g = gain.value;
  double f = 0.0;
  if (gain.optimize) {
    const Maximum best = maximize_scalar(
        [&](double gg) {
          return cvbsm_f_at(input, alpha, lambda, gg, chan, settled.d, bloch);
        },
        0.1, 2.0, 0.01);
    g = best.x;
    f = best.value;
  } else {
    f = cvbsm_f_at(input, alpha, lambda, g, chan, settled.d, bloch);
  }

  // Convergence guard at the final settings: cutoff bump and quadrature
  // doubling at the resolved gain.
  const double f_dim =
      cvbsm_f_at(input, alpha, lambda, g, chan, settled.d + 2, bloch);
  const double f_grid =
      cvbsm_f_at(input, alpha, lambda, g, chan, settled.d, bloch, 2);
  SweepRow row = base_row(input, alpha, chan);
  row.protocol = protocol_name(Protocol::cvbsm);
  row.squeeze_db = r_to_squeeze_db(r);
  row.g = g;
  row.f_bar = f;
  row.route = "cf";
  row.converged = settled.converged && std::abs(f_dim - f) < 5e-4 &&
                  std::abs(f_grid - f) < 1e-4;
  return row;
}

namespace {

struct ResourceBundle {
  PureEnsemble ensemble;
  double p_operation = 1.0;
  ResourceType type = ResourceType::phi_like;
};

ResourceBundle build_resource(double r, int d, bool clamped,
                              const ChannelSpec& chan, const NgOpSpec& ng) {
  ResourceBundle out;
  out.ensemble.dims = FockDims({d, d});
  out.ensemble.vectors = {tmsv_ket(r, d, clamped ? 0.0 : 0.95)};
  out.type = ng.resource_type();
  if (ng.kind != NgKind::none && ng.placement == NgPlacement::before) {
    const NgResult res = apply_ng_ensemble(out.ensemble, ng);
    out.p_operation = res.p_operation;
  }
  out.ensemble = apply_loss_ensemble(out.ensemble, 0, chan.t1);
  out.ensemble = apply_loss_ensemble(out.ensemble, 1, chan.t2);
  if (ng.kind != NgKind::none && ng.placement == NgPlacement::after) {
    const NgResult res = apply_ng_ensemble(out.ensemble, ng);
    out.p_operation = res.p_operation;
  }
  return out;
}

struct HbsmPoint {
  double f_bar = 0.0;
  double p_bsm = 0.0;
  double p_operation = 1.0;
};

HbsmPoint hbsm_point(InputKind input, double alpha, double r, int d,
                     bool clamped, const ChannelSpec& chan, const NgOpSpec& ng,
                     bool complete, const BlochNodes& bloch) {
  const ResourceBundle res = build_resource(r, d, clamped, chan, ng);
  const int d_out = res.ensemble.dims.dim(1);

  HbsmPoint point;
  point.p_operation = res.p_operation;
  switch (input) {
    case InputKind::hybrid_dv: {
      const Vector psi = hybrid_ket(alpha, d);
      const Vector target =
          pad_ket(psi, FockDims({d, 2}), FockDims({d, d_out}));
      const ProtocolResult pr =
          hbsm_teleport_ensemble(psi, FockDims({d, 2}), 1, res.ensemble,
                                 target, res.type, complete);
      point.f_bar = pr.f_bar;
      point.p_bsm = pr.p_bsm;
      return point;
    }
    case InputKind::hybrid_cv: {
      const Vector psi = hybrid_ket(alpha, d);
      Vector target = swap_modes(psi, FockDims({d, 2}), 0, 1);
      target = pad_ket(target, FockDims({2, d}), FockDims({2, d_out}));
      const ProtocolResult pr =
          hbsm_teleport_ensemble(psi, FockDims({d, 2}), 0, res.ensemble,
                                 target, res.type, complete);
      point.f_bar = pr.f_bar;
      point.p_bsm = pr.p_bsm;
      return point;
    }
    case InputKind::cv_qubit: {
      // Outcome-averaged fidelity per Bloch point, then the uniform
      // Bloch-sphere average of both the fidelity and the success rate.
      std::vector<double> x, w;
      gauss_legendre_nodes(bloch.n_theta, x, w);
      double f_acc = 0.0, p_acc = 0.0;
      for (int i = 0; i < bloch.n_theta; ++i) {
        const double theta = std::acos(x[i]);
        for (int k = 0; k < bloch.n_phi; ++k) {
          const double phi = 2.0 * M_PI * k / bloch.n_phi;
          const Vector psi = cv_qubit_ket({theta, phi, alpha}, d, 0.90);
          const Vector target =
              pad_ket(psi, FockDims::single(d), FockDims::single(d_out));
          const ProtocolResult pr = hbsm_teleport_ensemble(
              psi, FockDims::single(d), 0, res.ensemble, target, res.type,
              complete);
          const double weight = 0.5 * w[i] / bloch.n_phi;
          f_acc += weight * pr.f_bar;
          p_acc += weight * pr.p_bsm;
        }
      }
      point.f_bar = f_acc;
      point.p_bsm = p_acc;
      return point;
    }
  }
  throw PreconditionError("hbsm_point: unknown input");
}

}  // namespace

SweepRow run_hbsm(InputKind input, double alpha, double r,
                  const ChannelSpec& chan, const NgOpSpec& ng, bool complete,
                  const BlochNodes& bloch, int d_floor) {
  chan.validate();
  ng.validate();
  const ResolvedCutoff rc = run_cutoff(input, alpha, r, true);
  const int d_start = std::max(rc.d, d_floor);
  const std::string key =
      std::string("h|") + input_name(input) + '|' + fmt_key(alpha) + '|' +
      fmt_key(r) + '|' + ng_kind_name(ng.kind) + '|' +
      ng_placement_name(ng.placement) + '|' + ng_target_name(ng.target) +
      '|' + fmt_key(ng.tc) + '|' + fmt_key(ng.ts) + '|' +
      fmt_key(chan.t1) + '|' + fmt_key(chan.t2) + '|' +
      (complete ? "c" : "i") + '|' + std::to_string(d_start) + '|' +
      std::to_string(bloch.n_theta) + '|' + std::to_string(bloch.n_phi);
  const Settled settled = g_settle_cache.get(key, [&] {
    // The ladder tracks both the fidelity and the measurement success
    // rate: the ratio F converges faster than P_BSM and an accidental
    // F plateau must not freeze the cutoff early.
    int d = std::max(2, d_start);
    HbsmPoint at_d =
        hbsm_point(input, alpha, r, d, rc.clamped, chan, ng, complete, bloch);
    for (;;) {
      const HbsmPoint next = hbsm_point(input, alpha, r, d + 2, rc.clamped,
                                        chan, ng, complete, bloch);
      const double drift = std::max(std::abs(next.f_bar - at_d.f_bar),
                                    std::abs(next.p_bsm - at_d.p_bsm));
      if (drift < 5e-5) return Settled{at_d.f_bar, d, true};
      if (d + 2 > kMaxCutoff) return Settled{at_d.f_bar, d, false};
      at_d = next;
      d += 2;
    }
  });
  const HbsmPoint point = hbsm_point(input, alpha, r, settled.d, rc.clamped,
                                     chan, ng, complete, bloch);

  SweepRow row = base_row(input, alpha, chan);
  row.protocol =
      protocol_name(complete ? Protocol::hbsm : Protocol::hbsm_incomplete);
  row.squeeze_db = r_to_squeeze_db(r);
  row.ng_kind = ng.kind;
  row.ng_placement = ng.placement;
  if (ng.kind == NgKind::catalysis) row.tc = ng.tc;
  if (ng.kind == NgKind::scissors) row.ts = ng.ts;
  row.f_bar = point.f_bar;
  row.p_bsm = point.p_bsm;
  row.p_operation = point.p_operation;
  row.p_total = point.p_bsm * point.p_operation;
  row.route = "fock";
  row.converged = settled.converged;
  return row;
}

namespace {

double direct_f_at(InputKind input, double alpha, const ChannelSpec& chan,
                   int d, const BlochNodes& bloch) {
  const double t = chan.t1 * chan.t2;
  switch (input) {
    case InputKind::hybrid_dv:
    case InputKind::hybrid_cv: {
      const FockOperator rho = hybrid_state(alpha, d);
      const int mode = (input == InputKind::hybrid_cv) ? 0 : 1;
      return fidelity_pure(rho, apply_loss(rho, mode, t));
    }
    case InputKind::cv_qubit: {
      std::vector<double> x, w;
      gauss_legendre_nodes(bloch.n_theta, x, w);
      double acc = 0.0;
      for (int i = 0; i < bloch.n_theta; ++i) {
        const double theta = std::acos(x[i]);
        for (int k = 0; k < bloch.n_phi; ++k) {
          const double phi = 2.0 * M_PI * k / bloch.n_phi;
          const FockOperator rho = pure_density(
              FockDims::single(d), cv_qubit_ket({theta, phi, alpha}, d, 0.90));
          acc += 0.5 * w[i] / bloch.n_phi *
                 fidelity_pure(rho, apply_loss(rho, 0, t));
        }
      }
      return acc;
    }
  }
  throw PreconditionError("direct_f_at: unknown input");
}

}  // namespace

SweepRow run_direct(InputKind input, double alpha, const ChannelSpec& chan,
                    const BlochNodes& bloch) {
  chan.validate();
  const ResolvedCutoff rc =
      resolve_run_cutoff(input_state_specs(input, alpha));
  const Settled settled = settle_cutoff(
      [&](int d) { return direct_f_at(input, alpha, chan, d, bloch); },
      rc.d);

  SweepRow row = base_row(input, alpha, chan);
  row.protocol = protocol_name(Protocol::direct);
  row.f_bar = settled.f;
  row.route = "fock";
  row.converged = settled.converged;
  return row;
}

// ---------------------------------------------------------------------------
// Optimizer and sweep orchestration.
// ---------------------------------------------------------------------------

namespace {

constexpr double kSqueezeGridLo = 0.25, kSqueezeGridHi = 16.0,
                 kSqueezeGridStep = 0.25;
constexpr double kGainGridLo = 0.1, kGainGridHi = 2.0, kGainGridStep = 0.01;
constexpr double kTransGridLo = 0.02, kTransGridHi = 0.98,
                 kTransGridStep = 0.02;

struct FreeParams {
  double squeeze_db;
  double gain;
  double tc;
  double ts;
};

}  // namespace

SweepRow optimize_params(const ExperimentSpec& spec, double total_loss_db,
                         std::optional<double> squeeze_db) {
  spec.validate();
  const ChannelSpec chan =
      spec.split_loss_db
          ? ChannelSpec::from_db(spec.split_loss_db->first,
                                 spec.split_loss_db->second)
          : ChannelSpec::symmetric_from_total_db(total_loss_db);

  if (spec.protocol == Protocol::direct)
    return run_direct(spec.input, spec.alpha, chan, spec.bloch);

  FreeParams p{squeeze_db.value_or(
                   spec.squeeze_db.empty() ? 3.0 : spec.squeeze_db.front()),
               spec.gain.optimize ? 1.0 : spec.gain.value,
               spec.tc.optimize ? 0.5 : spec.tc.value,
               spec.ts.optimize ? 0.5 : spec.ts.value};

  const bool complete = spec.protocol != Protocol::hbsm_incomplete;
  auto make_ng = [&](const FreeParams& q) {
    NgOpSpec ng;
    ng.kind = spec.ng_kind;
    ng.placement = spec.ng_placement;
    ng.target = spec.ng_target;
    ng.tc = q.tc;
    ng.ts = q.ts;
    return ng;
  };
  // Settle the refinement ladder once at the starting point; optimizer
  // objectives then run at that cutoff (or the rule's, whichever is larger).
  int d_floor = 0;
  {
    const double r0 = squeeze_db_to_r(p.squeeze_db);
    if (spec.protocol == Protocol::cvbsm) {
      const ResolvedCutoff rc0 = run_cutoff(spec.input, spec.alpha, r0, false);
      const Settled s0 = settle_cutoff(
          [&](int d) {
            return cvbsm_f_at(spec.input, spec.alpha, std::tanh(r0), p.gain,
                              chan, d, spec.bloch);
          },
          rc0.d);
      d_floor = s0.d;
    } else {
      const ResolvedCutoff rc0 = run_cutoff(spec.input, spec.alpha, r0, true);
      const Settled s0 = settle_cutoff(
          [&](int d) {
            return hbsm_point(spec.input, spec.alpha, r0, d, rc0.clamped,
                              chan, make_ng(p), complete, spec.bloch)
                .f_bar;
          },
          rc0.d);
      d_floor = s0.d;
    }
  }
  auto evaluate = [&](const FreeParams& q) -> double {
    const double r = squeeze_db_to_r(q.squeeze_db);
    if (spec.protocol == Protocol::cvbsm) {
      const double lambda = std::tanh(r);
      const ResolvedCutoff rc = run_cutoff(spec.input, spec.alpha, r, false);
      return cvbsm_f_at(spec.input, spec.alpha, lambda, q.gain, chan,
                        std::max(rc.d, d_floor), spec.bloch);
    }
    const ResolvedCutoff rc = run_cutoff(spec.input, spec.alpha, r, true);
    return hbsm_point(spec.input, spec.alpha, r, std::max(rc.d, d_floor),
                      rc.clamped, chan, make_ng(q), complete, spec.bloch)
        .f_bar;
  };

  struct Coordinate {
    bool active;
    double lo, hi, step;
    double FreeParams::* field;
  };
  const bool opt_gain = spec.protocol == Protocol::cvbsm && spec.gain.optimize;
  const bool opt_tc = spec.ng_kind == NgKind::catalysis && spec.tc.optimize;
  const bool opt_ts = spec.ng_kind == NgKind::scissors && spec.ts.optimize;
  const std::vector<Coordinate> coords = {
      {spec.optimize_squeeze && !squeeze_db.has_value(), kSqueezeGridLo,
       kSqueezeGridHi, kSqueezeGridStep, &FreeParams::squeeze_db},
      {opt_gain, kGainGridLo, kGainGridHi, kGainGridStep, &FreeParams::gain},
      {opt_tc, kTransGridLo, kTransGridHi, kTransGridStep, &FreeParams::tc},
      {opt_ts, kTransGridLo, kTransGridHi, kTransGridStep, &FreeParams::ts},
  };
  int n_active = 0;
  for (const auto& c : coords) n_active += c.active ? 1 : 0;

  const int passes = (n_active > 1) ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    for (const auto& c : coords) {
      if (!c.active) continue;
      const Maximum best = maximize_scalar(
          [&](double x) {
            FreeParams q = p;
            q.*(c.field) = x;
            return evaluate(q);
          },
          c.lo, c.hi, c.step);
      p.*(c.field) = best.x;
    }
  }

  // Final guarded run at the resolved settings.
  const double r = squeeze_db_to_r(p.squeeze_db);
  SweepRow row;
  if (spec.protocol == Protocol::cvbsm) {
    row = run_cvbsm(spec.input, spec.alpha, r, OptParam::fixed(p.gain), chan,
                    spec.bloch, d_floor);
  } else {
    row = run_hbsm(spec.input, spec.alpha, r, chan, make_ng(p), complete,
                   spec.bloch, d_floor);
  }
  row.figure = spec.figure;
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int threads) {
  spec.validate();
  struct Point {
    double loss;
    std::optional<double> squeeze;
  };
  std::vector<Point> points;
  const bool per_loss_only =
      spec.protocol == Protocol::direct || spec.optimize_squeeze;
  for (double loss : spec.total_loss_db) {
    if (per_loss_only) {
      points.push_back({loss, std::nullopt});
    } else {
      for (double s : spec.squeeze_db) points.push_back({loss, s});
    }
  }
  std::vector<SweepRow> rows(points.size());
  parallel_for(long(points.size()), threads, [&](long i) {
    rows[i] = optimize_params(spec, points[i].loss, points[i].squeeze);
    rows[i].figure = spec.figure;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Supermatrix cross-check route.
// ---------------------------------------------------------------------------

double cvbsm_fidelity_supermatrix_route(InputKind input, double alpha,
                                        double r, double g,
                                        const ChannelSpec& chan) {
  const double lambda = std::tanh(r);
  const ResolvedCutoff rc = run_cutoff(input, alpha, r, false);
  const int d = rc.d;

  // Input state and the teleported mode.
  FockDims dims({d, 2});
  Vector psi;
  int mode = 0;
  int sector = 2;  // occupied levels of the teleported mode
  switch (input) {
    case InputKind::hybrid_dv:
      psi = hybrid_ket(alpha, d);
      mode = 1;
      sector = 2;
      break;
    case InputKind::hybrid_cv: {
      psi = hybrid_ket(alpha, d);
      mode = 0;
      // Effective support of the cat mode.
      const FockOperator red =
          partial_trace(pure_density(dims, psi), {0});
      double tail = 1.0;
      sector = d;
      for (int n = 0; n < d; ++n) {
        tail -= red.matrix()(n, n).real();
        if (tail < 1e-8) {
          sector = n + 1;
          break;
        }
      }
      break;
    }
    case InputKind::cv_qubit:
      throw PreconditionError(
          "cvbsm_fidelity_supermatrix_route: use a fixed input state");
  }

  // Reconstruction cutoff: enough headroom that the input sector is
  // trace-preserved through the channel within its contract.
  int d_e = std::max(12, int(std::ceil(g * g * sector)) + 10);
  Matrix s;
  for (;;) {
    const QuadratureGrid grid =
        QuadratureGrid::standard(double(d_e - 1), d_e);
    s = cvbsm_supermatrix(lambda, g, chan, d_e, grid);
    if (supermatrix_trace_defect(s, sector) < 2e-3 || d_e >= 26) break;
    d_e += 4;
  }
  if (supermatrix_trace_defect(s, sector) >= 2e-3)
    throw ConvergenceError(
        "cvbsm_fidelity_supermatrix_route: reconstruction cutoff exhausted");

  std::vector<int> grown = dims.per_mode();
  grown[mode] = d_e;
  const FockDims big(grown);
  const FockOperator rho_in = pure_density(big, pad_ket(psi, dims, big));
  const FockOperator rho_out = apply_supermatrix_on_mode(s, rho_in, mode);
  return fidelity_pure(rho_in, rho_out);
}

// ---------------------------------------------------------------------------
// CSV and config plumbing.
// ---------------------------------------------------------------------------

const char* kCsvHeader =
    "figure,protocol,input,alpha,total_loss_db,squeeze_db,g,tc,ts,ng_kind,"
    "ng_placement,f_bar,p_bsm,p_operation,p_total,route,converged";

namespace {

std::string fmt_field(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << kCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.figure << ',' << r.protocol << ',' << r.input << ','
       << fmt_field(r.alpha) << ',' << fmt_field(r.total_loss_db) << ','
       << fmt_field(r.squeeze_db) << ',' << fmt_field(r.g) << ','
       << fmt_field(r.tc) << ',' << fmt_field(r.ts) << ','
       << ng_kind_name(r.ng_kind) << ','
       << (r.ng_kind == NgKind::none ? "" : ng_placement_name(r.ng_placement))
       << ',' << fmt_field(r.f_bar) << ',' << fmt_field(r.p_bsm) << ','
       << fmt_field(r.p_operation) << ',' << fmt_field(r.p_total) << ','
       << r.route << ',' << (r.converged ? "true" : "false") << "\n";
  }
}

namespace {

std::vector<double> parse_grid(const std::string& text) {
  // Either a single number, a comma list, or start:end:step.
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a, b, s;
    char c1, c2;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0)
      throw ConfigError("bad grid: " + text);
    for (double x = a; x <= b + 1e-9; x += s) out.push_back(x);
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw ConfigError("empty grid: " + text);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentSpec parse_config(std::istream& is) {
  ExperimentSpec spec;
  std::optional<double> t1_db, t2_db;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty value");

    if (key == "figure") {
      spec.figure = value;
    } else if (key == "protocol") {
      spec.protocol = protocol_from_name(value);
    } else if (key == "input") {
      spec.input = input_from_name(value);
    } else if (key == "alpha") {
      spec.alpha = std::stod(value);
    } else if (key == "total_loss_db") {
      spec.total_loss_db = parse_grid(value);
    } else if (key == "t1_db") {
      t1_db = std::stod(value);
    } else if (key == "t2_db") {
      t2_db = std::stod(value);
    } else if (key == "squeeze_db") {
      if (value == "optimize") {
        spec.optimize_squeeze = true;
        spec.squeeze_db.clear();
      } else {
        spec.squeeze_db = parse_grid(value);
      }
    } else if (key == "gain") {
      spec.gain = (value == "optimize") ? OptParam::free()
                                        : OptParam::fixed(std::stod(value));
    } else if (key == "ng_kind") {
      spec.ng_kind = ng_kind_from_name(value);
    } else if (key == "ng_placement") {
      if (value == "before")
        spec.ng_placement = NgPlacement::before;
      else if (value == "after")
        spec.ng_placement = NgPlacement::after;
      else
        throw ConfigError("bad ng_placement: " + value);
    } else if (key == "ng_target") {
      if (value == "both")
        spec.ng_target = NgTarget::both;
      else if (value == "sender")
        spec.ng_target = NgTarget::sender;
      else if (value == "receiver")
        spec.ng_target = NgTarget::receiver;
      else
        throw ConfigError("bad ng_target: " + value);
    } else if (key == "tc") {
      spec.tc = (value == "optimize") ? OptParam::free()
                                      : OptParam::fixed(std::stod(value));
    } else if (key == "ts") {
      spec.ts = (value == "optimize") ? OptParam::free()
                                      : OptParam::fixed(std::stod(value));
    } else if (key == "bloch_theta_nodes") {
      spec.bloch.n_theta = std::stoi(value);
    } else if (key == "bloch_phi_nodes") {
      spec.bloch.n_phi = std::stoi(value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  if (t1_db.has_value() != t2_db.has_value())
    throw ConfigError("t1_db and t2_db must be given together");
  if (t1_db) spec.split_loss_db = std::make_pair(*t1_db, *t2_db);
  spec.validate();
  return spec;
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  int workers = threads > 0 ? threads
                            : int(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = int(std::min<long>(workers, n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr error;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace telesim
