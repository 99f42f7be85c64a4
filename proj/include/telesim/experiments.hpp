#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "telesim/bsm.hpp"
#include "telesim/charfunc.hpp"
#include "telesim/loss.hpp"
#include "telesim/nongauss.hpp"

namespace telesim {

enum class Protocol { cvbsm, hbsm, hbsm_incomplete, direct };
enum class InputKind { cv_qubit, hybrid_dv, hybrid_cv };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);
const char* input_name(InputKind k);
InputKind input_from_name(const std::string& name);

/// A sweep parameter that is either fixed or handed to the optimizer.
struct OptParam {
  double value = 0.0;
  bool optimize = false;
  static OptParam fixed(double v) { return {v, false}; }
  static OptParam free() { return {0.0, true}; }
};

struct BlochNodes {
  int n_theta = 8;
  int n_phi = 8;
};

struct ExperimentSpec {
  std::string figure;  // set for figure reproduction, empty for custom runs
  Protocol protocol = Protocol::hbsm;
  InputKind input = InputKind::hybrid_cv;
  double alpha = 0.5;
  std::vector<double> total_loss_db = {0.0};
  std::optional<std::pair<double, double>> split_loss_db;  // asymmetric T1/T2
  std::vector<double> squeeze_db = {3.0};
  bool optimize_squeeze = false;
  OptParam gain = OptParam::fixed(1.0);
  NgKind ng_kind = NgKind::none;
  NgPlacement ng_placement = NgPlacement::before;
  NgTarget ng_target = NgTarget::both;
  OptParam tc = OptParam::fixed(0.5);
  OptParam ts = OptParam::fixed(0.5);
  BlochNodes bloch;

  void validate() const;
};

struct SweepRow {
  std::string figure;
  std::string protocol;
  std::string input;
  double alpha = 0.0;
  double total_loss_db = 0.0;
  double squeeze_db = std::nan("");
  double g = std::nan("");
  double tc = std::nan("");
  double ts = std::nan("");
  NgKind ng_kind = NgKind::none;
  NgPlacement ng_placement = NgPlacement::before;
  double f_bar = 0.0;
  double p_bsm = 1.0;
  double p_operation = 1.0;
  double p_total = 1.0;
  std::string route;
  bool converged = true;
};

/// Average over qubits drawn uniformly from the Bloch sphere,
/// P(theta, phi) = sin(theta)/(4 pi): Gauss-Legendre in cos(theta),
/// uniform nodes in phi. Doubling both node counts must move the result by
/// less than 1e-4 or a ConvergenceError is raised (check = doubled).
double bloch_average(const std::function<double(double, double)>& f,
                     const BlochNodes& nodes = {},
                     Convergence check = Convergence::off);

/// Deterministic scalar maximizer: grid scan (first strict improvement
/// wins, so ties resolve to the smallest argument) followed by
/// golden-section refinement around the best cell to the given tolerance.
struct Maximum {
  double x = 0.0;
  double value = 0.0;
};
Maximum maximize_scalar(const std::function<double(double)>& f, double lo,
                        double hi, double step, double tol = 1e-4);

// --- single-row protocol runners ---------------------------------------

/// d_floor lifts the starting cutoff of the refinement ladder (used by the
/// optimizer so the headline run starts where its objective settled).
SweepRow run_cvbsm(InputKind input, double alpha, double r, OptParam gain,
                   const ChannelSpec& chan, const BlochNodes& bloch = {},
                   int d_floor = 0);

SweepRow run_hbsm(InputKind input, double alpha, double r,
                  const ChannelSpec& chan, const NgOpSpec& ng, bool complete,
                  const BlochNodes& bloch = {}, int d_floor = 0);

SweepRow run_direct(InputKind input, double alpha, const ChannelSpec& chan,
                    const BlochNodes& bloch = {});

/// Resolves every `optimize` parameter of the spec at one grid point and
/// returns the optimized row. Coordinate order: squeeze, gain, tc, ts; two
/// passes when more than one coordinate is free.
SweepRow optimize_params(const ExperimentSpec& spec, double total_loss_db,
                         std::optional<double> squeeze_db = std::nullopt);

/// Full sweep over the spec's loss/squeeze grids.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int threads = 0);

/// Fock-space cross-check of the CV-BSM fidelity through the reconstructed
/// channel supermatrix; used by the consistency checks, not by sweeps.
double cvbsm_fidelity_supermatrix_route(InputKind input, double alpha,
                                        double r, double g,
                                        const ChannelSpec& chan);

// --- IO ------------------------------------------------------------------

extern const char* kCsvHeader;
void write_csv(const std::vector<SweepRow>& rows, std::ostream& os);
ExperimentSpec parse_config(std::istream& is);

/// Index-parallel loop over [0, n) with a bounded worker pool; results must
/// be written to preallocated slots so the outcome is independent of the
/// worker count. threads <= 0 uses the hardware concurrency.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

}  // namespace telesim
