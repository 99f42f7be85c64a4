#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "telesim/charfunc.hpp"
#include "telesim/fock.hpp"
#include "telesim/loss.hpp"
#include "telesim/states.hpp"

using namespace telesim;

namespace {

FockOperator random_density(int d, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return {FockDims::single(d), rho};
}

CF1 cf_of(const FockOperator& rho) {
  return [rho](Complex xi) { return chi_state(rho, xi); };
}

}  // namespace

TEST_CASE("tmsv characteristic function") {
  CHECK(std::abs(chi_tmsv(0.0, 0.0, 0.63) - 1.0) < 1e-15);

  const Complex x1{0.3, -0.4}, x2{-0.2, 0.8};
  const Complex at0 = chi_tmsv(x1, x2, 0.0);
  CHECK(std::abs(at0 - std::exp(Complex(-0.5 * (std::norm(x1) + std::norm(x2))))) <
        1e-14);

  // Numeric CF of the truncated state matches the closed form.
  const double r = 0.55;
  const double lambda = std::tanh(r);
  const FockOperator rho = tmsv(TmsvParams{r}, 18);
  for (const auto& [a, b] :
       std::vector<std::pair<Complex, Complex>>{{{0.4, 0.2}, {-0.3, 0.5}},
                                                {{1.0, 0.0}, {0.0, -1.0}},
                                                {{-0.7, 0.7}, {0.6, 0.1}}}) {
    const Complex closed = chi_tmsv(a, b, lambda);
    const Complex numeric = chi_state(rho, {a, b});
    CHECK(std::abs(closed - numeric) < 1e-6);
  }
}

TEST_CASE("lossy tmsv characteristic function") {
  const double lambda = 0.48;
  const ChannelSpec ideal{1.0, 1.0};
  const Complex x1{0.5, -0.1}, x2{0.2, 0.3};
  CHECK(std::abs(chi_tmsv_lossy(x1, x2, lambda, ideal) -
                 chi_tmsv(x1, x2, lambda)) < 1e-14);

  const ChannelSpec chan{0.7, 0.45};
  CHECK(std::abs(chi_tmsv_lossy(x1, x2, 0.0, chan) -
                 std::exp(Complex(-0.5 * (std::norm(x1) + std::norm(x2))))) <
        1e-14);

  // Against the Kraus route: loss applied in Fock space, then numeric CF.
  const double r = 0.5;
  FockOperator rho = tmsv(TmsvParams{r}, 16);
  rho = apply_loss(apply_loss(rho, 0, chan.t1), 1, chan.t2);
  for (const auto& [a, b] :
       std::vector<std::pair<Complex, Complex>>{{{0.4, 0.1}, {-0.2, 0.6}},
                                                {{0.9, -0.5}, {0.3, 0.2}}}) {
    CHECK(std::abs(chi_tmsv_lossy(a, b, std::tanh(r), chan) -
                   chi_state(rho, {a, b})) < 1e-6);
  }
}

TEST_CASE("chi_state basics") {
  const FockOperator vac =
      pure_density(FockDims::single(8), fock_ket(0, 8));
  const Complex xi{0.7, -0.2};
  CHECK(std::abs(chi_state(vac, xi) - std::exp(-0.5 * std::norm(xi))) <
        1e-12);

  const FockOperator one =
      pure_density(FockDims::single(12), fock_ket(1, 12));
  CHECK(std::abs(chi_state(one, xi) -
                 (1.0 - std::norm(xi)) * std::exp(-0.5 * std::norm(xi))) <
        1e-12);

  std::mt19937 rng(11);
  const FockOperator rho = random_density(6, rng);
  CHECK(std::abs(chi_state(rho, Complex(0.0)) - 1.0) < 1e-12);
}

TEST_CASE("chi_state magnitude bound on grid nodes") {
  std::mt19937 rng(13);
  const FockOperator rho = random_density(7, rng);
  const QuadratureGrid grid = QuadratureGrid::standard(6.0, 7);
  for (size_t i = 0; i < grid.r.size(); i += 7) {
    for (int k = 0; k < grid.n_angular; k += 9) {
      const Complex xi = std::polar(grid.r[i], 2 * M_PI * k / grid.n_angular);
      CHECK(std::abs(chi_state(rho, xi)) <= 1.0 + 1e-8);
    }
  }
}

TEST_CASE("cat pair CF matches the truncated numeric CF") {
  const double alpha = 0.9;
  const int d = 24;
  const Vector cm = cat_ket(alpha, CatParity::odd, d);
  const Vector cp = cat_ket(alpha, CatParity::even, d);
  const FockDims dims = FockDims::single(d);
  Matrix cross = cp * cm.adjoint();  // |cat_+><cat_-|
  const FockOperator sigma{dims, cross};
  for (const Complex xi : {Complex{0.3, 0.4}, Complex{-0.8, 0.1}}) {
    // tr{|k><b| D} = <b|D|k>
    const Complex numeric = chi_state(sigma, xi);
    const Complex analytic = cat_pair_cf(alpha, false, true, xi);
    CHECK(std::abs(numeric - analytic) < 1e-9);
  }
}

TEST_CASE("chi_out_single composition") {
  CF1 vac_cf = [](Complex xi) {
    return std::exp(Complex(-0.5 * std::norm(xi)));
  };
  const ChannelSpec ideal{1.0, 1.0};
  const Complex xi{0.5, 0.6};
  // lambda = 0, g = 1, T = 1: thermal with nbar = 1.
  const Complex out = chi_out_single(xi, vac_cf, 0.0, 1.0, ideal);
  CHECK(std::abs(out - std::exp(-1.5 * std::norm(xi))) < 1e-12);
  CHECK(std::abs(chi_out_single(0.0, vac_cf, 0.37, 1.4, ideal) - 1.0) <
        1e-14);
}

TEST_CASE("fidelity_cf_single: closed-form benchmarks") {
  const QuadratureGrid grid = QuadratureGrid::standard(1.0, 8);
  CF1 vac_cf = [](Complex xi) {
    return std::exp(Complex(-0.5 * std::norm(xi)));
  };
  CHECK(fidelity_cf_single(vac_cf, vac_cf, grid) ==
        doctest::Approx(1.0).epsilon(1e-6));

  CF1 thermal1 = [](Complex xi) {
    return std::exp(Complex(-1.5 * std::norm(xi)));
  };
  CHECK(fidelity_cf_single(vac_cf, thermal1, grid) ==
        doctest::Approx(0.5).epsilon(1e-6));

  // Teleported coherent state, unit gain, lossless: F = 1/(1 + e^(-2r)).
  const ChannelSpec ideal{1.0, 1.0};
  for (double r : {0.0, 0.3466, 1.0}) {
    const double beta = 0.6;
    CF1 coh = [beta](Complex xi) {
      return std::exp(Complex(-0.5 * std::norm(xi)) + xi * beta -
                      std::conj(xi) * beta);
    };
    const CF1 out = make_chi_out_single(coh, std::tanh(r), 1.0, ideal);
    const double f = fidelity_cf_single(coh, out, grid, Convergence::doubled);
    CHECK(f == doctest::Approx(1.0 / (1.0 + std::exp(-2.0 * r)))
                   .epsilon(2e-6));
  }
}

TEST_CASE("fidelity_cf_single: Parseval identity on random pairs") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + int(rng() % 7);
    const FockOperator rho = random_density(d, rng);
    const FockOperator sig = random_density(d, rng);
    const double direct = (rho.matrix() * sig.matrix()).trace().real();
    const QuadratureGrid grid = QuadratureGrid::standard(double(d), d);
    const double via_cf = fidelity_cf_single(cf_of(rho), cf_of(sig), grid);
    CHECK(via_cf == doctest::Approx(direct).epsilon(1e-4));
  }
}

TEST_CASE("fidelity_cf_single: non-convergent grid raises") {
  // A 3-node radial rule cannot resolve these integrands.
  const QuadratureGrid bad = QuadratureGrid::polar(6.0, 3, 8);
  std::mt19937 rng(31);
  const FockOperator rho = random_density(6, rng);
  CHECK_THROWS_AS(
      fidelity_cf_single(cf_of(rho), cf_of(rho), bad, Convergence::doubled),
      ConvergenceError);
}

TEST_CASE("chi_out_hybrid: normalization, ideal limit, spectator slice") {
  const int d = 12;
  const FockOperator hyb = hybrid_state(0.8, d);
  CF2 chi_in = [hyb](Complex a, Complex b) {
    return chi_state(hyb, {a, b});
  };
  const ChannelSpec ideal{1.0, 1.0};

  CHECK(std::abs(chi_out_hybrid(0.0, 0.0, chi_in, 0.4, 1.0, ideal, 1) - 1.0) <
        1e-12);

  // lambda -> 1, T = 1, g = 1 approaches the identity channel.
  for (const auto& [a, b] :
       std::vector<std::pair<Complex, Complex>>{{{0.5, 0.1}, {-0.4, 0.3}},
                                                {{1.2, -0.3}, {0.2, 0.9}}}) {
    const Complex out = chi_out_hybrid(a, b, chi_in, 0.999, 1.0, ideal, 1);
    CHECK(std::abs(out - chi_in(a, b)) < 1e-3);
  }

  // With the teleported argument at zero the spectator slice is untouched.
  const Complex a{0.9, -0.6};
  CHECK(std::abs(chi_out_hybrid(a, 0.0, chi_in, 0.5, 1.3, ideal, 1) -
                 chi_in(a, 0.0)) < 1e-12);
}

TEST_CASE("hybrid fidelity: ideal channel and separable product") {
  const int d = 10;
  const FockOperator hyb = hybrid_state(0.7, d);
  CF2 chi_in = [hyb](Complex a, Complex b) {
    return chi_state(hyb, {a, b});
  };
  const QuadratureGrid coarse = QuadratureGrid::polar(6.0, 20, 28);
  CHECK(fidelity_cf_hybrid(chi_in, chi_in, coarse, coarse) ==
        doctest::Approx(1.0).epsilon(1e-4));

  // Product CFs factorize the 4D integral.
  CF1 vac = [](Complex xi) {
    return std::exp(Complex(-0.5 * std::norm(xi)));
  };
  CF1 th = [](Complex xi) {
    return std::exp(Complex(-1.5 * std::norm(xi)));
  };
  CF2 prod_in = [&](Complex a, Complex b) { return vac(a) * vac(b); };
  CF2 prod_out = [&](Complex a, Complex b) { return vac(a) * th(b); };
  const double f4 = fidelity_cf_hybrid(prod_in, prod_out, coarse, coarse);
  CHECK(f4 == doctest::Approx(1.0 * 0.5).epsilon(1e-4));
}

TEST_CASE("factorized route agrees with direct 4D quadrature") {
  const int d = 8;
  const double alpha = 0.6, lambda = 0.45, g = 1.1;
  const ChannelSpec chan{0.8, 0.9};
  const FockOperator hyb = hybrid_state(alpha, d);
  const Vector psi = hybrid_ket(alpha, d);

  CF2 chi_in = [hyb](Complex a, Complex b) {
    return chi_state(hyb, {a, b});
  };
  const CF2 chi_out = make_chi_out_hybrid(chi_in, lambda, g, chan, 1);
  const QuadratureGrid coarse = QuadratureGrid::polar(6.0, 20, 36);
  const double direct = fidelity_cf_hybrid(chi_in, chi_out, coarse, coarse);

  const PairTensor pt = pair_tensor_pure(psi, FockDims({d, 2}), 1);
  const QuadratureGrid grid = QuadratureGrid::standard(1.0, 2);
  const double fact = cvbsm_pair_fidelity(pt, lambda, g, chan, grid);
  CHECK(fact == doctest::Approx(direct).epsilon(1e-3));
}

TEST_CASE("factorized route matches closed-form coherent benchmark") {
  // Encoded as a single-mode pair tensor.
  const int d = 18;
  const double beta = 0.5;
  const FockOperator rho =
      pure_density(FockDims::single(d), coherent_ket(beta, d, 0.0));
  const PairTensor pt = pair_tensor_single(rho);
  const ChannelSpec ideal{1.0, 1.0};
  const QuadratureGrid grid = QuadratureGrid::standard(1.0, d);
  for (double r : {0.0, 0.3466, 1.0}) {
    const double f = cvbsm_pair_fidelity(pt, std::tanh(r), 1.0, ideal, grid,
                                         Convergence::doubled);
    CHECK(f == doctest::Approx(1.0 / (1.0 + std::exp(-2.0 * r)))
                   .epsilon(1e-4));
  }
}

TEST_CASE("supermatrix: thermal image, ideal limit, TP and CP") {
  const ChannelSpec ideal{1.0, 1.0};
  const int d = 14;
  const QuadratureGrid grid = QuadratureGrid::standard(double(d - 1), d);

  // lambda = 0, g = 1, T = 1 maps vacuum to the nbar = 1 thermal state.
  const Matrix s = cvbsm_supermatrix(0.0, 1.0, ideal, d, grid);
  const FockOperator vac = pure_density(FockDims::single(d), fock_ket(0, d));
  const FockOperator out = apply_supermatrix_on_mode(s, vac, 0);
  for (int n = 0; n < 6; ++n)
    CHECK(out.matrix()(n, n).real() ==
          doctest::Approx(0.5 * std::pow(0.5, n)).epsilon(2e-3));

  CHECK(supermatrix_trace_defect(s, 2) < 2e-3);
  CHECK(choi_min_eigenvalue(s) > -1e-3);

  // Near-unit lambda: identity on the low sectors.
  const Matrix sid = cvbsm_supermatrix(0.999, 1.0, ideal, d, grid);
  const FockOperator in2 = pure_density(
      FockDims::single(d), cv_qubit_ket(CatQubitParams{1.2, 0.4, 0.7}, d));
  const FockOperator out2 = apply_supermatrix_on_mode(sid, in2, 0);
  CHECK((out2.matrix().topLeftCorner(6, 6) -
         in2.matrix().topLeftCorner(6, 6))
            .cwiseAbs()
            .maxCoeff() < 5e-3);
}

TEST_CASE("supermatrix route reproduces the factorized hybrid fidelity") {
  const int d = 8;
  const double alpha = 0.8, g = 0.95;
  const double lambda = std::tanh(squeeze_db_to_r(6.0));
  const ChannelSpec chan = ChannelSpec::symmetric_from_total_db(3.0);

  const Vector psi = hybrid_ket(alpha, d);
  const PairTensor pt = pair_tensor_pure(psi, FockDims({d, 2}), 1);
  const QuadratureGrid grid = QuadratureGrid::standard(1.0, 8);
  const double f_cf = cvbsm_pair_fidelity(pt, lambda, g, chan, grid);

  // Fock route: reconstruct the channel at a widened cutoff, apply on the
  // DV mode, then overlap with the input.
  const int de = 10;
  const QuadratureGrid sgrid = QuadratureGrid::standard(double(de - 1), de);
  const Matrix s = cvbsm_supermatrix(lambda, g, chan, de, sgrid);
  const FockDims big({d, de});
  const Vector padded = pad_ket(psi, FockDims({d, 2}), big);
  const FockOperator rho_in = pure_density(big, padded);
  const FockOperator rho_out = apply_supermatrix_on_mode(s, rho_in, 1);
  const double f_fock = fidelity_pure(rho_in, rho_out);

  CHECK(f_fock == doctest::Approx(f_cf).epsilon(1e-3));
}
