#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "telesim/bsm.hpp"
#include "telesim/fock.hpp"
#include "telesim/loss.hpp"
#include "telesim/states.hpp"

using namespace telesim;

namespace {

Vector qubit_ket(double a, double b, int d) {
  Vector v = Vector::Zero(d);
  v(0) = a;
  v(1) = b;
  v.normalize();
  return v;
}

}  // namespace

TEST_CASE("bell projectors resolve the identity") {
  for (auto [d1, d3] : std::vector<std::pair<int, int>>{{2, 2}, {4, 3}}) {
    const auto set = bell_projectors(true, d1, d3);
    REQUIRE(set.size() == 5);
    Matrix sum = Matrix::Zero(d1 * d3, d1 * d3);
    for (const auto& p : set) sum += p.matrix();
    CHECK((sum - Matrix::Identity(d1 * d3, d1 * d3)).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK(set.back().min_eigenvalue() > -1e-10);
    for (size_t i = 0; i + 1 < set.size(); ++i)
      CHECK(set[i].is_idempotent(1e-12));
  }

  // P_phi+ fixes |Phi+> in the qubit sector.
  const auto set = bell_projectors(true, 3, 3);
  Vector phip = Vector::Zero(9);
  phip(0) = phip(4) = 1.0 / std::sqrt(2.0);  // |00> + |11> at d3 = 3
  CHECK((set[0].matrix() * phip - phip).norm() < 1e-14);

  const auto inc = bell_projectors(false, 2, 2);
  REQUIRE(inc.size() == 3);
  const Vector psip = bell_ket(BellKind::psi_plus);
  CHECK((inc[0].matrix() * psip - psip).norm() < 1e-14);

  CHECK_THROWS_AS(bell_projectors(true, 1, 4), DimensionError);
}

TEST_CASE("correction unitaries") {
  const Matrix id = correction_unitary(BellKind::phi_plus,
                                       ResourceType::phi_like, 5);
  CHECK((id - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix x = correction_unitary(BellKind::psi_plus,
                                      ResourceType::phi_like, 5);
  Vector zero = fock_ket(0, 5);
  CHECK((x * zero - Vector(fock_ket(1, 5))).norm() < 1e-15);

  for (BellKind k : {BellKind::phi_plus, BellKind::phi_minus,
                     BellKind::psi_plus, BellKind::psi_minus}) {
    for (ResourceType t : {ResourceType::phi_like, ResourceType::psi_like}) {
      const Matrix u = correction_unitary(k, t, 6);
      CHECK((u * u.adjoint() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <
            1e-14);
    }
  }

  // psi-like pre-composes a flip: (phi+, psi-like) acts as X.
  const Matrix xf = correction_unitary(BellKind::phi_plus,
                                       ResourceType::psi_like, 4);
  CHECK((xf * Vector(fock_ket(1, 4)) - Vector(fock_ket(0, 4))).norm() <
        1e-15);
}

TEST_CASE("ideal qubit teleportation is exact for all four corrections") {
  const Vector in = qubit_ket(std::cos(0.4), std::sin(0.4) * 0.8, 2);
  const FockOperator rho_in = pure_density(FockDims::single(2), in);
  const FockOperator joint = tensor(rho_in, bell_state(BellKind::phi_plus));

  HbsmSetup setup;
  setup.input_mode = 0;
  setup.resource_measured_mode = 1;
  setup.resource_output_mode = 2;
  setup.keep_states = true;
  const ProtocolResult res = hbsm_teleport(joint, in, setup);

  CHECK(res.p_bsm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.f_bar == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(res.outcomes.size() == 4);
  for (const auto& o : res.outcomes) {
    CHECK(o.probability == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(o.has_state);
    CHECK((o.conditional.matrix() - rho_in.matrix()).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("hand-derived cases: vacuum resource and |1> input") {
  // (|0> + |1>)/sqrt(2) through a lambda = 0 resource: F = 1/2, P = 1.
  const int d = 8;
  const Vector plus = qubit_ket(1.0, 1.0, d);
  const Vector res00 = tmsv_ket(0.0, d);
  PureEnsemble resource{FockDims({d, d}), {res00}};
  const ProtocolResult r1 = hbsm_teleport_ensemble(
      plus, FockDims::single(d), 0, resource, plus, ResourceType::phi_like,
      true);
  CHECK(r1.p_bsm == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r1.f_bar == doctest::Approx(0.5).epsilon(1e-9));

  // |1> through TMSV(lambda): F = 1, P = 1 - lambda^4. Use an untruncated-
  // grade cutoff so the geometric tail is below the tolerance.
  const double lambda = 0.5;
  const int dd = 18;
  const Vector one = fock_ket(1, dd);
  PureEnsemble res_l{FockDims({dd, dd}), {tmsv_ket(std::atanh(lambda), dd)}};
  const ProtocolResult r2 = hbsm_teleport_ensemble(
      one, FockDims::single(dd), 0, res_l, one, ResourceType::phi_like, true);
  CHECK(r2.f_bar == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r2.p_bsm ==
        doctest::Approx(1.0 - std::pow(lambda, 4)).epsilon(1e-9));
}

TEST_CASE("dense and ensemble routes agree") {
  std::mt19937 rng(349);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const int d = 6;
    const double alpha = 0.4 + 0.5 * u(rng);
    const double r = 0.3 + 0.5 * u(rng);
    const double t = 0.5 + 0.5 * u(rng);

    // Hybrid input, teleporting the DV mode against a lossy resource.
    const Vector psi = hybrid_ket(alpha, d);
    PureEnsemble resource{FockDims({d, d}), {tmsv_ket(r, d)}};
    resource = apply_loss_ensemble(resource, 0, t);
    resource = apply_loss_ensemble(resource, 1, t);

    const FockDims big({d, 2, d, d});
    const FockOperator joint =
        tensor(pure_density(FockDims({d, 2}), psi), resource.to_density());

    const Vector target = pad_ket(psi, FockDims({d, 2}), FockDims({d, d}));

    HbsmSetup setup;
    setup.input_mode = 1;              // DV mode of the hybrid input
    setup.resource_measured_mode = 2;  // first resource mode
    setup.resource_output_mode = 3;
    const ProtocolResult dense = hbsm_teleport(joint, target, setup);
    const ProtocolResult fast = hbsm_teleport_ensemble(
        psi, FockDims({d, 2}), 1, resource, target, ResourceType::phi_like,
        true);

    CHECK(fast.p_bsm == doctest::Approx(dense.p_bsm).epsilon(1e-10));
    CHECK(fast.f_bar == doctest::Approx(dense.f_bar).epsilon(1e-10));
    for (int i = 0; i < 4; ++i)
      CHECK(fast.outcomes[i].probability ==
            doctest::Approx(dense.outcomes[i].probability).epsilon(1e-10));
  }
}

TEST_CASE("outcome probabilities with the failure branch sum to one") {
  const int d = 7;
  const double t = 0.7;
  const Vector psi = hybrid_ket(0.8, d);
  const FockOperator rho_in = pure_density(FockDims({d, 2}), psi);
  FockOperator res = tmsv(TmsvParams{0.6}, d);
  res = apply_loss(apply_loss(res, 0, t), 1, t);
  const FockOperator joint = tensor(rho_in, res);

  // Reduced state of the measured pair (DV input, first resource mode);
  // Bell projectors are symmetric under pair exchange.
  const FockOperator measured = partial_trace(joint, {1, 2});
  const auto projectors = bell_projectors(true, 2, d);
  double total = 0.0;
  std::vector<double> kept;
  for (const auto& p : projectors) {
    const double prob = (p.matrix() * measured.matrix()).trace().real();
    CHECK(prob > -1e-12);
    total += prob;
    if (&p != &projectors.back()) kept.push_back(prob);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // The same probabilities come out of the protocol runner.
  PureEnsemble resource{FockDims({d, d}), {tmsv_ket(0.6, d)}};
  resource = apply_loss_ensemble(resource, 0, t);
  resource = apply_loss_ensemble(resource, 1, t);
  const Vector target = pad_ket(psi, FockDims({d, 2}), FockDims({d, d}));
  const ProtocolResult run = hbsm_teleport_ensemble(
      psi, FockDims({d, 2}), 1, resource, target, ResourceType::phi_like,
      true);
  double p_sum = 0.0;
  for (size_t i = 0; i < run.outcomes.size(); ++i) {
    p_sum += run.outcomes[i].probability;
    CHECK(run.outcomes[i].probability ==
          doctest::Approx(kept[i]).epsilon(1e-9));
  }
  CHECK(run.p_bsm == doctest::Approx(p_sum));
}

TEST_CASE("spectator entanglement survives a near-ideal teleport") {
  const int d = 10;
  const Vector psi = hybrid_ket(0.7, d);
  PureEnsemble resource{FockDims({d, d}), {tmsv_ket(std::atanh(0.999), d, 0.0)}};
  const Vector target = pad_ket(psi, FockDims({d, 2}), FockDims({d, d}));
  const ProtocolResult res = hbsm_teleport_ensemble(
      psi, FockDims({d, 2}), 1, resource, target, ResourceType::phi_like,
      true, 1.0, true);

  for (const auto& o : res.outcomes) {
    REQUIRE(o.has_state);
    CHECK(o.conditional.is_density_operator(1e-8, 1e-8, 1e-8));
    const FockOperator spect = partial_trace(o.conditional, {0});
    const FockOperator orig =
        partial_trace(pure_density(FockDims({d, 2}), psi), {0});
    CHECK((spect.matrix().topLeftCorner(6, 6) -
           orig.matrix().topLeftCorner(6, 6))
              .cwiseAbs()
              .maxCoeff() < 5e-3);
  }
}

TEST_CASE("no qubit-sector support raises NoOutcomeError") {
  const int d = 6;
  const Vector two = fock_ket(2, d);
  PureEnsemble resource{FockDims({d, d}), {tmsv_ket(0.4, d)}};
  CHECK_THROWS_AS(
      hbsm_teleport_ensemble(two, FockDims::single(d), 0, resource, two,
                             ResourceType::phi_like, true),
      NoOutcomeError);
}

TEST_CASE("incomplete H-BSM halves the DV-direction success probability") {
  const int d = 10;
  const double alpha = 0.5;
  for (double squeeze_db : {5.0, 10.0}) {
    for (double loss_db : {2.0, 8.0}) {
      const double r = squeeze_db_to_r(squeeze_db);
      const ChannelSpec chan = ChannelSpec::symmetric_from_total_db(loss_db);
      const Vector psi = hybrid_ket(alpha, d);
      PureEnsemble resource{FockDims({d, d}), {tmsv_ket(r, d)}};
      resource = apply_loss_ensemble(resource, 0, chan.t1);
      resource = apply_loss_ensemble(resource, 1, chan.t2);
      const Vector target = pad_ket(psi, FockDims({d, 2}), FockDims({d, d}));

      const ProtocolResult full = hbsm_teleport_ensemble(
          psi, FockDims({d, 2}), 1, resource, target,
          ResourceType::phi_like, true);
      const ProtocolResult inc = hbsm_teleport_ensemble(
          psi, FockDims({d, 2}), 1, resource, target,
          ResourceType::phi_like, false);

      CHECK(inc.p_total ==
            doctest::Approx(full.p_total / 2.0).epsilon(1e-9));
      CHECK(std::abs(inc.f_bar - full.f_bar) / full.f_bar < 0.05);
    }
  }
}
