#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "telesim/fock.hpp"
#include "telesim/loss.hpp"
#include "telesim/states.hpp"

using namespace telesim;

TEST_CASE("cat states: parity support and limits") {
  // alpha -> 0 even cat collapses to vacuum.
  const Vector tiny = cat_ket(1e-8, CatParity::even, 6);
  CHECK(std::abs(tiny(0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(cat_ket(0.0, CatParity::odd, 6), DegenerateStateError);

  const Vector odd = cat_ket(0.5, CatParity::odd, 12);
  for (int n = 0; n < 12; n += 2) CHECK(std::abs(odd(n)) == 0.0);

  // Oracle: expand |a> and |-a> directly in the Fock basis, subtract,
  // renormalize over the truncated window.
  Vector direct = Vector::Zero(12);
  for (int n = 0; n < 12; ++n) {
    const double c = std::exp(-0.125 + double(n) * std::log(0.5) -
                              0.5 * factorial_log(n));
    direct(n) = c - (n % 2 == 0 ? c : -c);
  }
  direct.normalize();
  CHECK((odd - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cat states are orthogonal across parity") {
  for (double alpha : {0.3, 0.7, 1.3}) {
    const Vector m = cat_ket(alpha, CatParity::odd, 16);
    const Vector p = cat_ket(alpha, CatParity::even, 16);
    CHECK(std::abs(m.dot(p)) < 1e-12);
  }
}

TEST_CASE("cv qubit endpoints") {
  CatQubitParams p;
  p.alpha = 0.8;
  p.theta = 0.0;
  const Vector at0 = cv_qubit_ket(p, 14);
  CHECK((at0 - cat_ket(0.8, CatParity::odd, 14)).cwiseAbs().maxCoeff() <
        1e-12);

  p.theta = M_PI;
  p.phi = 0.9;
  const FockOperator at_pi = cv_qubit(p, 14);
  const FockOperator even = cat_state(0.8, CatParity::even, 14);
  CHECK((at_pi.matrix() - even.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  p.theta = M_PI / 2;
  p.alpha = 0.0;
  CHECK_THROWS_AS(cv_qubit_ket(p, 14), DegenerateStateError);
}

TEST_CASE("hybrid state reductions") {
  const int d = 14;
  const FockOperator rho = hybrid_state(0.9, d);
  CHECK(rho.is_density_operator());

  const FockOperator dv = partial_trace(rho, {1});
  CHECK((dv.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);

  const FockOperator cv = partial_trace(rho, {0});
  const FockOperator mix =
      (cat_state(0.9, CatParity::odd, d) * Complex(0.5)) +
      (cat_state(0.9, CatParity::even, d) * Complex(0.5));
  CHECK((cv.matrix() - mix.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  // Orthogonal to the parity-swapped partner.
  const Vector cm = cat_ket(0.9, CatParity::odd, d);
  const Vector cp = cat_ket(0.9, CatParity::even, d);
  Vector swapped = Vector::Zero(2L * d);
  for (int n = 0; n < d; ++n) {
    swapped(2L * n) = cp(n) / std::sqrt(2.0);
    swapped(2L * n + 1) = cm(n) / std::sqrt(2.0);
  }
  const Vector h = hybrid_ket(0.9, d);
  CHECK(std::abs(swapped.dot(h)) < 1e-12);

  CHECK_THROWS_AS(hybrid_ket(0.0, d), DegenerateStateError);
}

TEST_CASE("tmsv amplitudes and truncation trace") {
  const Vector zero_r = tmsv_ket(0.0, 4);
  CHECK(std::abs(zero_r(0)) == doctest::Approx(1.0));

  // Pre-normalization trace of the d-term cut is 1 - lambda^(2d).
  const double r = 0.9;
  const double lambda = std::tanh(r);
  for (int d : {3, 5, 8}) {
    double trace = 0.0;
    for (int n = 0; n < d; ++n)
      trace += (1.0 - lambda * lambda) * std::pow(lambda, 2 * n);
    CHECK(trace == doctest::Approx(1.0 - std::pow(lambda, 2 * d)));
  }

  // Mean photon number per mode approaches sinh^2 r at generous cutoff.
  const int d = 30;
  const Vector v = tmsv_ket(r, d, 0.0);
  double mean = 0.0;
  for (int n = 0; n < d; ++n)
    mean += double(n) * std::norm(v(long(n) * d + n));
  CHECK(mean == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-6));

  // Schmidt coefficients are (1-l^2)^(1/2) l^n before truncation; the
  // renormalized cut rescales them all by (1 - l^(2d))^(-1/2).
  const double rescale = 1.0 / std::sqrt(1.0 - std::pow(lambda, 2 * d));
  for (int n = 0; n + 1 < 8; ++n) {
    CHECK(std::abs(v(long(n) * d + n)) >=
          std::abs(v(long(n + 1) * d + n + 1)));
    CHECK(std::abs(v(long(n) * d + n)) ==
          doctest::Approx(rescale * std::sqrt(1 - lambda * lambda) *
                          std::pow(lambda, n))
              .epsilon(1e-12));
  }
}

TEST_CASE("truncation_dim policy") {
  CHECK(truncation_dim(StateSpec::vacuum()) == 1);
  CHECK(truncation_dim(StateSpec::number(3)) == 4);
  CHECK(truncation_dim(StateSpec::bell()) == 2);

  // Cumulative Poisson oracle for the coherent rule.
  const double alpha = 0.5;
  double cum = 0.0;
  int expect = 0;
  for (int n = 0;; ++n) {
    cum += std::exp(-alpha * alpha + 2.0 * n * std::log(alpha) -
                    factorial_log(n));
    if (cum > 0.95) {
      expect = n + 1;
      break;
    }
  }
  CHECK(expect == 2);
  CHECK(truncation_dim(StateSpec::coherent(alpha)) == expect);

  // Geometric-sum oracle: lambda^2 = 0.5 needs d = 5.
  const double r_half = std::atanh(std::sqrt(0.5));
  CHECK(truncation_dim(StateSpec::tmsv(r_half)) == 5);

  // Past the per-mode ceiling the strict rule throws; the clamped variant
  // reports the cap.
  const double r_big = squeeze_db_to_r(16.0);
  CHECK_THROWS_AS(truncation_dim(StateSpec::tmsv(r_big)), TruncationError);
  const ResolvedCutoff rc = truncation_dim_clamped(StateSpec::tmsv(r_big));
  CHECK(rc.d == kMaxCutoff);
  CHECK(rc.clamped);

  const ResolvedCutoff run = resolve_run_cutoff(
      {StateSpec::hybrid(0.5), StateSpec::tmsv(squeeze_db_to_r(5.0))});
  CHECK(run.d >= truncation_dim(StateSpec::tmsv(squeeze_db_to_r(5.0))));
  CHECK_FALSE(run.clamped);
}

TEST_CASE("bell states") {
  const Vector phip = bell_ket(BellKind::phi_plus);
  const Vector phim = bell_ket(BellKind::phi_minus);
  CHECK(std::abs(phip.dot(phim)) < 1e-15);

  const FockOperator red =
      partial_trace(bell_state(BellKind::psi_minus), {1});
  CHECK((red.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-15);

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const FockOperator xx = tensor(FockOperator{FockDims::single(2), x},
                                 FockOperator{FockDims::single(2), x});
  const Complex corr = (phip.adjoint() * xx.matrix() * phip)(0);
  CHECK(corr.real() == doctest::Approx(1.0));
}

TEST_CASE("constructors produce valid densities") {
  for (double alpha : {0.4, 1.0}) {
    CHECK(cat_state(alpha, CatParity::odd, 16).is_density_operator());
    CHECK(cat_state(alpha, CatParity::even, 16).is_density_operator());
    CHECK(hybrid_state(alpha, 16).is_density_operator());
  }
  CatQubitParams p{1.1, 2.3, 0.7};
  CHECK(cv_qubit(p, 16).is_density_operator());
  CHECK(tmsv(TmsvParams{0.8}, 12).is_density_operator());
}
