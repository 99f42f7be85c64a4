#include "telesim/bsm.hpp"

#include <algorithm>
#include <cmath>

namespace telesim {

namespace {

constexpr double kMinBsmProbability = 1e-12;

// Bell amplitudes over the (measured resource, measured input) qubit pair.
struct BellVector {
  int x1[2];
  int x2[2];
  double amp[2];
};

BellVector bell_vector(BellKind kind) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::phi_plus:
      return {{0, 1}, {0, 1}, {s, s}};
    case BellKind::phi_minus:
      return {{0, 1}, {0, 1}, {s, -s}};
    case BellKind::psi_plus:
      return {{0, 1}, {1, 0}, {s, s}};
    case BellKind::psi_minus:
      return {{0, 1}, {1, 0}, {s, -s}};
  }
  throw PreconditionError("bell_vector: unknown kind");
}

std::vector<BellKind> kept_outcomes(bool complete) {
  if (complete)
    return {BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus,
            BellKind::psi_minus};
  return {BellKind::psi_plus, BellKind::psi_minus};
}

const char* correction_label(BellKind outcome, ResourceType type) {
  const bool flip = (type == ResourceType::psi_like);
  switch (outcome) {
    case BellKind::phi_plus:
      return flip ? "X" : "I";
    case BellKind::phi_minus:
      return flip ? "ZX" : "Z";
    case BellKind::psi_plus:
      return flip ? "I" : "X";
    case BellKind::psi_minus:
      return flip ? "Z" : "ZX";
  }
  return "I";
}

}  // namespace

std::vector<FockOperator> bell_projectors(bool complete, int d1, int d3) {
  if (d1 < 2 || d3 < 2)
    throw DimensionError("bell_projectors: both cutoffs must be >= 2");
  const FockDims dims({d1, d3});
  std::vector<FockOperator> out;
  for (BellKind kind : kept_outcomes(complete)) {
    const BellVector b = bell_vector(kind);
    Vector v = Vector::Zero(dims.total());
    for (int t = 0; t < 2; ++t) v(long(b.x1[t]) * d3 + b.x2[t]) = b.amp[t];
    out.push_back(pure_density(dims, v));
  }
  Matrix fail = Matrix::Identity(dims.total(), dims.total());
  for (const auto& p : out) fail -= p.matrix();
  out.emplace_back(dims, std::move(fail));
  return out;
}

Matrix correction_unitary(BellKind outcome, ResourceType type, int d) {
  if (d < 2) throw DimensionError("correction_unitary: cutoff must be >= 2");
  Matrix u = Matrix::Identity(d, d);
  const std::string label = correction_label(outcome, type);
  for (auto it = label.rbegin(); it != label.rend(); ++it) {
    Matrix step = Matrix::Identity(d, d);
    if (*it == 'X') {
      step(0, 0) = step(1, 1) = 0.0;
      step(0, 1) = step(1, 0) = 1.0;
    } else if (*it == 'Z') {
      step(1, 1) = -1.0;
    }
    u = step * u;
  }
  return u;
}

ProtocolResult hbsm_teleport(const FockOperator& rho_joint,
                             const Vector& target_ket,
                             const HbsmSetup& setup) {
  const FockDims& dims = rho_joint.dims();
  const int a = setup.resource_measured_mode;
  const int b = setup.input_mode;
  if (a == b || a < 0 || b < 0 || a >= dims.n_modes() || b >= dims.n_modes())
    throw DimensionError("hbsm_teleport: bad measured mode indices");
  if (dims.dim(a) < 2 || dims.dim(b) < 2)
    throw DimensionError("hbsm_teleport: measured modes need cutoff >= 2");

  std::vector<int> remaining;
  std::vector<int> rem_dims;
  for (int m = 0; m < dims.n_modes(); ++m) {
    if (m == a || m == b) continue;
    remaining.push_back(m);
    rem_dims.push_back(dims.dim(m));
  }
  if (remaining.empty())
    throw DimensionError("hbsm_teleport: no output mode remains");
  const FockDims out_dims(rem_dims);
  int out_pos = -1;
  for (size_t i = 0; i < remaining.size(); ++i)
    if (remaining[i] == setup.resource_output_mode) out_pos = int(i);
  if (out_pos < 0)
    throw DimensionError("hbsm_teleport: output mode was measured");
  if (target_ket.size() != out_dims.total())
    throw DimensionError("hbsm_teleport: target does not match output dims");

  const long stride_a = dims.stride(a);
  const long stride_b = dims.stride(b);
  auto full_index = [&](long rem_flat, int xa, int xb) {
    long idx = long(xa) * stride_a + long(xb) * stride_b;
    for (size_t i = remaining.size(); i-- > 0;) {
      idx += (rem_flat % out_dims.dim(int(i))) * dims.stride(remaining[i]);
      rem_flat /= out_dims.dim(int(i));
    }
    return idx;
  };

  const FockOperator target_rho = pure_density(out_dims, target_ket);
  ProtocolResult result;
  result.p_operation = setup.p_operation;

  for (BellKind kind : kept_outcomes(setup.complete)) {
    const BellVector bv = bell_vector(kind);
    Matrix sigma = Matrix::Zero(out_dims.total(), out_dims.total());
    for (int t = 0; t < 2; ++t) {
      for (int u = 0; u < 2; ++u) {
        const double coef = bv.amp[t] * bv.amp[u];
        for (long r = 0; r < out_dims.total(); ++r)
          for (long c = 0; c < out_dims.total(); ++c)
            sigma(r, c) +=
                coef * rho_joint.matrix()(full_index(r, bv.x1[t], bv.x2[t]),
                                          full_index(c, bv.x1[u], bv.x2[u]));
      }
    }
    HbsmOutcome o;
    o.outcome = kind;
    o.correction = correction_label(kind, setup.resource_type);
    o.probability = sigma.trace().real();
    if (o.probability > kMinBsmProbability) {
      const FockOperator u = lift_to_mode(
          correction_unitary(kind, setup.resource_type,
                             out_dims.dim(out_pos)),
          out_dims, out_pos);
      Matrix corrected =
          u.matrix() * (sigma / o.probability) * u.matrix().adjoint();
      const FockOperator cond{out_dims, std::move(corrected)};
      o.fidelity = fidelity_pure(target_rho, cond);
      if (setup.keep_states) {
        o.conditional = cond;
        o.has_state = true;
      }
    }
    result.outcomes.push_back(std::move(o));
  }

  double p_bsm = 0.0, f_acc = 0.0;
  for (const auto& o : result.outcomes) {
    p_bsm += o.probability;
    f_acc += o.probability * o.fidelity;
  }
  if (p_bsm < kMinBsmProbability)
    throw NoOutcomeError("hbsm_teleport: all outcome probabilities vanish");
  result.p_bsm = p_bsm;
  result.p_total = p_bsm * result.p_operation;
  result.f_bar = std::clamp(f_acc / p_bsm, 0.0, 1.0);
  return result;
}

ProtocolResult hbsm_teleport_ensemble(
    const Vector& input_ket, const FockDims& input_dims,
    int measured_input_mode, const PureEnsemble& resource,
    const Vector& target_ket, ResourceType resource_type, bool complete,
    double p_operation, bool keep_states) {
  if (resource.dims.n_modes() != 2)
    throw DimensionError("hbsm_teleport_ensemble: resource must have 2 modes");
  if (input_ket.size() != input_dims.total())
    throw DimensionError("hbsm_teleport_ensemble: input ket size mismatch");
  if (input_dims.dim(measured_input_mode) < 2 || resource.dims.dim(0) < 2)
    throw DimensionError(
        "hbsm_teleport_ensemble: measured modes need cutoff >= 2");
  const int d2 = resource.dims.dim(1);

  std::vector<int> spect_dims;
  for (int m = 0; m < input_dims.n_modes(); ++m)
    if (m != measured_input_mode) spect_dims.push_back(input_dims.dim(m));
  long spect_total = 1;
  for (int d : spect_dims) spect_total *= d;
  const long out_total = spect_total * d2;
  if (target_ket.size() != out_total)
    throw DimensionError("hbsm_teleport_ensemble: target size mismatch");

  const long in_stride = input_dims.stride(measured_input_mode);
  auto input_index = [&](long spect_flat, int xin) {
    long idx = long(xin) * in_stride;
    for (int m = input_dims.n_modes() - 1; m >= 0; --m) {
      if (m == measured_input_mode) continue;
      idx += (spect_flat % input_dims.dim(m)) * input_dims.stride(m);
      spect_flat /= input_dims.dim(m);
    }
    return idx;
  };
  const long res_stride = resource.dims.stride(0);

  std::vector<int> od = spect_dims;
  od.push_back(d2);
  const FockDims out_dims(od);

  ProtocolResult result;
  result.p_operation = p_operation;

  for (BellKind kind : kept_outcomes(complete)) {
    const BellVector bv = bell_vector(kind);
    const Matrix ucorr = correction_unitary(kind, resource_type, d2);
    HbsmOutcome o;
    o.outcome = kind;
    o.correction = correction_label(kind, resource_type);
    double p = 0.0, f_num = 0.0;
    Matrix cond;
    if (keep_states) cond = Matrix::Zero(out_total, out_total);

    for (const Vector& v : resource.vectors) {
      // w[spect, x2] = sum_t amp_t psi[spect; x_in = x2_t] v[x1_t, x2]
      Vector w = Vector::Zero(out_total);
      for (int t = 0; t < 2; ++t) {
        const long res_base = long(bv.x1[t]) * res_stride;
        for (long s = 0; s < spect_total; ++s) {
          const Complex psi_amp = input_ket(input_index(s, bv.x2[t]));
          if (psi_amp == Complex(0.0, 0.0)) continue;
          w.segment(s * d2, d2) +=
              (bv.amp[t] * psi_amp) * v.segment(res_base, d2);
        }
      }
      // Correction acts on the {0,1} block of the output mode.
      for (long s = 0; s < spect_total; ++s) {
        const Complex w0 = w(s * d2 + 0), w1 = w(s * d2 + 1);
        w(s * d2 + 0) = ucorr(0, 0) * w0 + ucorr(0, 1) * w1;
        w(s * d2 + 1) = ucorr(1, 0) * w0 + ucorr(1, 1) * w1;
      }
      const double wn = w.squaredNorm();
      p += wn;
      f_num += std::norm(target_ket.dot(w));
      if (keep_states) cond.noalias() += w * w.adjoint();
    }
    o.probability = p;
    o.fidelity =
        (p > kMinBsmProbability) ? std::clamp(f_num / p, 0.0, 1.0) : 0.0;
    if (keep_states && p > kMinBsmProbability) {
      o.conditional = FockOperator{out_dims, cond / p};
      o.has_state = true;
    }
    result.outcomes.push_back(std::move(o));
  }

  double p_bsm = 0.0, f_acc = 0.0;
  for (const auto& o : result.outcomes) {
    p_bsm += o.probability;
    f_acc += o.probability * o.fidelity;
  }
  if (p_bsm < kMinBsmProbability)
    throw NoOutcomeError(
        "hbsm_teleport_ensemble: all outcome probabilities vanish");
  result.p_bsm = p_bsm;
  result.p_total = p_bsm * p_operation;
  result.f_bar = std::clamp(f_acc / p_bsm, 0.0, 1.0);
  return result;
}

}  // namespace telesim
