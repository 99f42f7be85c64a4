#include "telesim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "telesim/experiments.hpp"
#include "telesim/figures.hpp"
#include "telesim/states.hpp"

namespace telesim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Reporter {
  std::ostream& os;
  bool all_ok = true;

  void report(int id, bool ok, const std::string& text) {
    os << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << text
       << "\n";
    all_ok = all_ok && ok;
  }
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream ss;
  ss << std::setprecision(prec) << v;
  return ss.str();
}

// --- criterion 1: coherent-state benchmark, both routes -------------------

void criterion_coherent_benchmark(Reporter& rep) {
  const auto t0 = Clock::now();
  const double beta = 0.5;
  const int d_in = 14, d_e = 22;
  const ChannelSpec ideal{1.0, 1.0};
  const FockOperator rho =
      pure_density(FockDims::single(d_in), coherent_ket(beta, d_in, 0.0));
  const PairTensor pt = pair_tensor_single(rho);
  const QuadratureGrid grid = QuadratureGrid::standard(1.0, d_in);
  const QuadratureGrid sgrid = QuadratureGrid::standard(double(d_e - 1), d_e);

  bool ok = true;
  double worst_cf = 0.0, worst_fock = 0.0;
  for (double r : {0.0, 0.3466, 1.0}) {
    const double lambda = std::tanh(r);
    const double expect = 1.0 / (1.0 + std::exp(-2.0 * r));
    const double f_cf = cvbsm_pair_fidelity(pt, lambda, 1.0, ideal, grid,
                                            Convergence::doubled);
    worst_cf = std::max(worst_cf, std::abs(f_cf - expect));

    const Matrix s = cvbsm_supermatrix(lambda, 1.0, ideal, d_e, sgrid);
    ok = ok && supermatrix_trace_defect(s, 6) < 2e-3;
    ok = ok && choi_min_eigenvalue(s) > -1e-3;
    const FockOperator padded =
        pure_density(FockDims::single(d_e), coherent_ket(beta, d_e, 0.0));
    const double f_fock =
        fidelity_pure(padded, apply_supermatrix_on_mode(s, padded, 0));
    worst_fock = std::max(worst_fock, std::abs(f_fock - expect));
  }
  const double dt = seconds_since(t0);
  ok = ok && worst_cf < 1e-3 && worst_fock < 1e-3 && dt < 10.0;
  rep.report(1, ok,
             "coherent benchmark F = 1/(1+e^-2r): |dF_cf| = " + fmt(worst_cf) +
                 ", |dF_fock| = " + fmt(worst_fock) + ", " + fmt(dt, 3) +
                 " s");
}

// --- criterion 2: two-route consistency on a random grid ------------------

void criterion_two_route(Reporter& rep) {
  const auto t0 = Clock::now();
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double alpha = 0.2 + 0.8 * u(rng);
    const double loss_db = 10.0 * u(rng);
    const double r_db = 0.5 + 9.5 * u(rng);
    const double g = 0.5 + u(rng);
    const ChannelSpec chan = ChannelSpec::symmetric_from_total_db(loss_db);
    const double r = squeeze_db_to_r(r_db);
    const SweepRow cf =
        run_cvbsm(InputKind::hybrid_dv, alpha, r, OptParam::fixed(g), chan);
    const double fock = cvbsm_fidelity_supermatrix_route(
        InputKind::hybrid_dv, alpha, r, g, chan);
    worst = std::max(worst, std::abs(cf.f_bar - fock));
  }
  const double dt = seconds_since(t0);
  const bool ok = worst < 1e-3 && dt < 300.0;
  rep.report(2, ok,
             "two-route consistency over 20 random points: max |dF| = " +
                 fmt(worst) + ", " + fmt(dt, 3) + " s");
}

// --- criterion 3: Parseval identity ---------------------------------------

void criterion_parseval(Reporter& rep) {
  const auto t0 = Clock::now();
  std::mt19937 rng(7131);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + int(rng() % 7);
    auto random_density = [&] {
      Matrix a(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
      Matrix m = a * a.adjoint();
      m /= m.trace();
      return FockOperator{FockDims::single(d), m};
    };
    const FockOperator rho = random_density();
    const FockOperator sig = random_density();
    const double direct = (rho.matrix() * sig.matrix()).trace().real();
    const QuadratureGrid grid = QuadratureGrid::standard(double(d), d);
    const double via_cf = fidelity_cf_single(
        [&](Complex xi) { return chi_state(rho, xi); },
        [&](Complex xi) { return chi_state(sig, xi); }, grid);
    worst = std::max(worst, std::abs(via_cf - direct));
  }
  const double dt = seconds_since(t0);
  const bool ok = worst < 1e-4 && dt < 60.0;
  rep.report(3, ok,
             "Parseval identity on 50 random pairs: max |dF| = " +
                 fmt(worst) + ", " + fmt(dt, 3) + " s");
}

// --- criterion 4: exact qubit teleportation --------------------------------

void criterion_hbsm_exact(Reporter& rep) {
  Vector in(2);
  in(0) = std::cos(0.35);
  in(1) = std::polar(std::sin(0.35), 0.9);
  const FockOperator joint = tensor(pure_density(FockDims::single(2), in),
                                    bell_state(BellKind::phi_plus));
  HbsmSetup setup;
  setup.input_mode = 0;
  setup.resource_measured_mode = 1;
  setup.resource_output_mode = 2;
  setup.keep_states = true;
  const ProtocolResult res = hbsm_teleport(joint, in, setup);
  bool ok = std::abs(res.f_bar - 1.0) < 1e-10 &&
            std::abs(res.p_bsm - 1.0) < 1e-10 && res.outcomes.size() == 4;
  std::map<std::string, int> seen;
  for (const auto& o : res.outcomes) {
    ok = ok && std::abs(o.fidelity - 1.0) < 1e-10;
    seen[o.correction]++;
  }
  ok = ok && seen.size() == 4;  // I, Z, X, ZX all exercised
  rep.report(4, ok,
             "ideal Bell resource: F = " + fmt(res.f_bar, 12) +
                 ", P = " + fmt(res.p_bsm, 12) + ", corrections I/Z/X/ZX");
}

// --- criterion 5: hand-derived cases ---------------------------------------

void criterion_hand_cases(Reporter& rep) {
  const int d = 18;
  Vector plus = Vector::Zero(d);
  plus(0) = plus(1) = 1.0 / std::sqrt(2.0);
  PureEnsemble vacuum_res{FockDims({d, d}), {tmsv_ket(0.0, d)}};
  const ProtocolResult r1 =
      hbsm_teleport_ensemble(plus, FockDims::single(d), 0, vacuum_res, plus,
                             ResourceType::phi_like, true);

  const double lambda = 0.5;
  PureEnsemble half_res{FockDims({d, d}),
                        {tmsv_ket(std::atanh(lambda), d, 0.0)}};
  const Vector one = fock_ket(1, d);
  const ProtocolResult r2 =
      hbsm_teleport_ensemble(one, FockDims::single(d), 0, half_res, one,
                             ResourceType::phi_like, true);

  const bool ok = std::abs(r1.f_bar - 0.5) < 1e-9 &&
                  std::abs(r1.p_bsm - 1.0) < 1e-9 &&
                  std::abs(r2.f_bar - 1.0) < 1e-9 &&
                  std::abs(r2.p_bsm - 0.9375) < 1e-9;
  rep.report(5, ok,
             "hand-derived cases: F(+) = " + fmt(r1.f_bar, 10) + ", P(+) = " +
                 fmt(r1.p_bsm, 10) + "; F(1) = " + fmt(r2.f_bar, 10) +
                 ", P(1) = " + fmt(r2.p_bsm, 10));
}

// --- criterion 6: alpha independence ---------------------------------------

void criterion_alpha_independence(Reporter& rep) {
  double worst_cv = 0.0, worst_h = 0.0;
  for (double loss : {0.0, 4.0, 8.0}) {
    for (double squeeze : {3.0, 6.0, 9.0}) {
      const ChannelSpec chan = ChannelSpec::symmetric_from_total_db(loss);
      const double r = squeeze_db_to_r(squeeze);
      const SweepRow cv_half =
          run_cvbsm(InputKind::hybrid_dv, 0.5, r, OptParam::free(), chan);
      const SweepRow cv_one =
          run_cvbsm(InputKind::hybrid_dv, 1.0, r, OptParam::free(), chan);
      worst_cv = std::max(worst_cv, std::abs(cv_half.f_bar - cv_one.f_bar));
      const SweepRow h_half =
          run_hbsm(InputKind::hybrid_dv, 0.5, r, chan, {}, true, {}, 12);
      const SweepRow h_one =
          run_hbsm(InputKind::hybrid_dv, 1.0, r, chan, {}, true, {}, 12);
      worst_h = std::max(worst_h, std::abs(h_half.f_bar - h_one.f_bar));
    }
  }
  const bool ok = worst_cv < 1e-6 && worst_h < 1e-6;
  rep.report(6, ok,
             "alpha independence (DV direction): max |dF_cvbsm| = " +
                 fmt(worst_cv) + ", max |dF_hbsm| = " + fmt(worst_h));
}

// --- criterion 7: incomplete H-BSM halving ---------------------------------

void criterion_incomplete(Reporter& rep) {
  // Exact halving holds in the DV direction, where the measured input qubit
  // is maximally mixed; the CV direction obeys the same statement only at
  // the percent level, so it is tracked alongside at that tolerance.
  const int d = 14;
  const double alpha = 0.5;
  double worst_ratio = 0.0, worst_df = 0.0, worst_ratio_cv = 0.0;
  for (double squeeze : {5.0, 10.0}) {
    for (double loss = 0.0; loss <= 15.0 + 1e-9; loss += 0.5) {
      const ChannelSpec chan = ChannelSpec::symmetric_from_total_db(loss);
      const double r = squeeze_db_to_r(squeeze);
      PureEnsemble res{FockDims({d, d}), {tmsv_ket(r, d, 0.0)}};
      res = apply_loss_ensemble(res, 0, chan.t1);
      res = apply_loss_ensemble(res, 1, chan.t2);
      const Vector psi = hybrid_ket(alpha, d);

      const Vector target_dv = pad_ket(psi, FockDims({d, 2}), FockDims({d, d}));
      const ProtocolResult full = hbsm_teleport_ensemble(
          psi, FockDims({d, 2}), 1, res, target_dv, ResourceType::phi_like,
          true);
      const ProtocolResult inc = hbsm_teleport_ensemble(
          psi, FockDims({d, 2}), 1, res, target_dv, ResourceType::phi_like,
          false);
      worst_ratio =
          std::max(worst_ratio, std::abs(inc.p_total - 0.5 * full.p_total));
      worst_df =
          std::max(worst_df, std::abs(inc.f_bar - full.f_bar) / full.f_bar);

      const Vector target_cv = swap_modes(psi, FockDims({d, 2}), 0, 1);
      const ProtocolResult full_cv = hbsm_teleport_ensemble(
          psi, FockDims({d, 2}), 0, res, target_cv, ResourceType::phi_like,
          true);
      const ProtocolResult inc_cv = hbsm_teleport_ensemble(
          psi, FockDims({d, 2}), 0, res, target_cv, ResourceType::phi_like,
          false);
      worst_ratio_cv = std::max(
          worst_ratio_cv, std::abs(inc_cv.p_total / full_cv.p_total - 0.5));
    }
  }
  const bool ok =
      worst_ratio < 1e-9 && worst_df < 0.05 && worst_ratio_cv < 0.02;
  rep.report(7, ok,
             "incomplete H-BSM: DV halving defect = " + fmt(worst_ratio) +
                 ", |dF|/F = " + fmt(worst_df) +
                 "; CV-direction ratio within " + fmt(worst_ratio_cv) +
                 " of 1/2");
}

// --- criteria 8 and 9: photon subtraction identities ------------------------

double ng_hbsm_f(double alpha, double squeeze_db, double loss_db, NgKind kind,
                 NgPlacement placement) {
  NgOpSpec ng;
  ng.kind = kind;
  ng.placement = placement;
  const ChannelSpec chan = ChannelSpec::symmetric_from_total_db(loss_db);
  // A shared cutoff floor: the compared runs must resolve at the same rung,
  // and the subtraction/addition identity of the ideal states carries a
  // truncated-edge correction that loss makes visible (it scales with
  // lambda^(2d), so moderate squeezing keeps it far below the tolerance).
  return run_hbsm(InputKind::hybrid_cv, alpha, squeeze_db_to_r(squeeze_db),
                  chan, ng, true, {}, 16)
      .f_bar;
}

void criterion_ps_commutation(Reporter& rep) {
  double worst = 0.0;
  for (double loss : {2.0, 6.0, 10.0})
    for (double squeeze : {2.0, 4.0, 6.0})
      worst = std::max(
          worst, std::abs(ng_hbsm_f(0.5, squeeze, loss, NgKind::symmetric_ps,
                                    NgPlacement::before) -
                          ng_hbsm_f(0.5, squeeze, loss, NgKind::symmetric_ps,
                                    NgPlacement::after)));
  rep.report(8, worst < 1e-6,
             "symmetric subtraction before vs after the channel: max |dF| = " +
                 fmt(worst));
}

void criterion_deloc_symmetry(Reporter& rep) {
  double worst = 0.0;
  for (double loss : {2.0, 6.0, 10.0})
    for (double squeeze : {2.0, 4.0, 6.0})
      worst = std::max(
          worst,
          std::abs(ng_hbsm_f(0.5, squeeze, loss, NgKind::delocalized_ps,
                             NgPlacement::before) -
                   ng_hbsm_f(0.5, squeeze, loss, NgKind::delocalized_pa,
                             NgPlacement::before)));
  rep.report(9, worst < 1e-6,
             "delocalized subtraction vs addition: max |dF| = " + fmt(worst));
}

// --- figure-level criteria --------------------------------------------------

using Surface = std::map<std::pair<double, double>, const SweepRow*>;

Surface index_surface(const FigureCurve& curve, bool by_alpha = false) {
  Surface out;
  for (const auto& r : curve.rows)
    out[{r.total_loss_db, by_alpha ? r.alpha : r.squeeze_db}] = &r;
  return out;
}

const FigureCurve* find_curve(const FigureOutput& fig,
                              const std::string& name) {
  for (const auto& c : fig.curves)
    if (c.name == name) return &c;
  return nullptr;
}

double crossing_loss(const FigureCurve& curve, double level) {
  // Largest loss at which any squeezing stays at or above the level.
  double best = -1.0;
  for (const auto& r : curve.rows)
    if (r.f_bar >= level) best = std::max(best, r.total_loss_db);
  return best;
}

void criterion_fig2(Reporter& rep, const FigureOutput& f2a,
                    const FigureOutput& f2b) {
  const double cross_h = crossing_loss(*find_curve(f2a, "hbsm"), 2.0 / 3.0);
  const double cross_cv = crossing_loss(*find_curve(f2a, "cvbsm"), 2.0 / 3.0);

  const Surface scv = index_surface(*find_curve(f2b, "cvbsm"));
  bool cv_dominates = true;
  double boundary = 0.0;  // squeezing below which the H-BSM still wins
  for (const auto& r : find_curve(f2b, "hbsm")->rows) {
    const auto it = scv.find({r.total_loss_db, r.squeeze_db});
    if (it == scv.end() || it->second->f_bar < r.f_bar - 1e-9) {
      cv_dominates = false;
      boundary = std::max(boundary, r.squeeze_db);
    }
  }
  const bool ok = cross_h > cross_cv && cv_dominates;
  rep.report(
      10, ok,
      "qubit surfaces: classical-limit crossing " + fmt(cross_h, 4) +
          " dB (H-BSM) vs " + fmt(cross_cv, 4) +
          " dB (CV-BSM) at alpha = 0.5; CV-BSM dominates at alpha = 1: " +
          (cv_dominates
               ? "yes"
               : "no (post-selected H-BSM wins for squeezing up to " +
                     fmt(boundary, 3) + " dB; see decisions ledger)"));
}

void criterion_fig5(Reporter& rep, const FigureOutput& f5) {
  const Surface cv = index_surface(*find_curve(f5, "cvbsm"), true);
  const Surface hb = index_surface(*find_curve(f5, "hbsm"), true);
  const Surface dt = index_surface(*find_curve(f5, "direct"), true);

  // The quoted small-loss threshold is approximate ("e.g."); require that
  // direct transmission wins the low-loss region and that the first
  // overtaking happens near 5 dB of total loss.
  double crossover = 16.0;
  for (const auto& [key, row] : dt) {
    if (std::abs(key.second - 1.0) > 1e-9) continue;  // alpha = 1 slice
    if (key.first <= 0.0) continue;
    const bool cv_wins = cv.count(key) && cv.at(key)->f_bar >= row->f_bar;
    const bool hb_wins = hb.count(key) && hb.at(key)->f_bar >= row->f_bar;
    if (cv_wins || hb_wins) crossover = std::min(crossover, key.first);
  }
  const bool direct_wins_small_loss = crossover > 3.0 && crossover <= 5.0;
  bool hbsm_below_at_large_alpha = true;
  for (const auto& [key, row] : hb) {
    if (std::abs(key.second - 2.0) > 1e-9) continue;  // alpha = 2 slice
    if (cv.count(key) && row->f_bar > cv.at(key)->f_bar + 1e-9)
      hbsm_below_at_large_alpha = false;
  }
  const bool ok = direct_wins_small_loss && hbsm_below_at_large_alpha;
  rep.report(11, ok,
             "optimized protocols at alpha = 1: direct transmission wins "
             "until " +
                 fmt(crossover, 3) +
                 " dB total loss (claimed threshold ~5 dB); H-BSM falls "
                 "below CV-BSM at alpha = 2 (" +
                 (hbsm_below_at_large_alpha ? "yes" : "no") + ")");
}

void criterion_fig8(Reporter& rep, const FigureOutput& f8) {
  const Surface qs = index_surface(*find_curve(f8, "qs-symmetric"));
  const Surface pc_tx = index_surface(*find_curve(f8, "pc-sender"));
  const Surface pc_rx = index_surface(*find_curve(f8, "pc-receiver"));
  const Surface pc_sym = index_surface(*find_curve(f8, "pc-symmetric"));

  bool qs_beats_pc = true, rx_beats_tx = true, p_total_band = true;
  double p_lo = 1.0, p_hi = 0.0;
  for (const auto& [key, row] : qs) {
    const double fq = row->f_bar;
    for (const Surface* pc : {&pc_tx, &pc_rx, &pc_sym})
      if (pc->count(key) && pc->at(key)->f_bar > fq + 1e-6)
        qs_beats_pc = false;
    if (key.first > 10.0) {
      p_lo = std::min(p_lo, row->p_total);
      p_hi = std::max(p_hi, row->p_total);
      if (row->p_total < 1e-3 || row->p_total > 1e-1) p_total_band = false;
    }
  }
  for (const auto& [key, row] : pc_rx)
    if (pc_tx.count(key) && row->f_bar < pc_tx.at(key)->f_bar - 1e-6)
      rx_beats_tx = false;

  const bool ok = qs_beats_pc && rx_beats_tx && p_total_band;
  rep.report(12, ok,
             std::string("scissors vs catalysis: scissors dominate (") +
                 (qs_beats_pc ? "yes" : "no") + "), receiver >= sender (" +
                 (rx_beats_tx ? "yes" : "no") +
                 "), scissors p_total above 10 dB in [" + fmt(p_lo, 3) +
                 ", " + fmt(p_hi, 3) + "]");
}

void criterion_figure_suite(Reporter& rep,
                            const std::vector<FigureOutput>& figures,
                            double wall_seconds) {
  bool rows_ok = true;
  bool monotone_ok = true;
  long n_rows = 0;
  double worst_defect = 0.0;
  std::string worst_where;
  for (const auto& fig : figures) {
    for (const auto& curve : fig.curves) {
      for (const auto& r : curve.rows) {
        ++n_rows;
        if (!(r.f_bar >= 0.0 && r.f_bar <= 1.0)) rows_ok = false;
        if (r.p_bsm > 1.0 + 1e-9) rows_ok = false;
        if (std::abs(r.p_total - r.p_bsm * r.p_operation) > 1e-12)
          rows_ok = false;
      }
      const double defect = monotonicity_defect(curve);
      if (defect > 1e-4) {
        monotone_ok = false;
        if (defect > worst_defect) {
          worst_defect = defect;
          worst_where = "fig" + fig.id + "/" + curve.name;
        }
      }
    }
  }

  // Success probability grows with loss on the fixed-squeezing H-BSM
  // curves (the distributed resource thermalizes toward the qubit sector).
  bool p_grows = true;
  for (const auto& fig : figures) {
    if (fig.id != "4a" && fig.id != "4b") continue;
    for (const auto& curve : fig.curves) {
      if (curve.name.rfind("hbsm", 0) != 0) continue;
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : curve.rows)
        pts.push_back({r.total_loss_db, r.p_total});
      std::sort(pts.begin(), pts.end());
      for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].second < pts[i - 1].second - 1e-9) p_grows = false;
    }
  }

  // With optimized squeezing only subtraction and the delocalized
  // operations can improve on performing no operation at all; photon
  // addition improves nowhere. (The delocalized operations help only at
  // small loss and fall below the no-op baseline elsewhere, where their
  // psi-sector character has thermalized away.)
  bool improvers_ok = true;
  for (const auto& fig : figures) {
    if (fig.id != "7b") continue;
    const Surface none = index_surface(*find_curve(fig, "none"));
    auto improves_somewhere = [&](const char* name) {
      const FigureCurve* c = find_curve(fig, name);
      for (const auto& r : c->rows) {
        const auto it = none.find({r.total_loss_db, r.squeeze_db});
        if (it != none.end() && r.f_bar > it->second->f_bar + 1e-6)
          return true;
      }
      return false;
    };
    improvers_ok = improves_somewhere("sym-ps-tx") &&
                   improves_somewhere("sym-ps-rx") &&
                   improves_somewhere("deloc-ps") &&
                   improves_somewhere("deloc-pa") &&
                   !improves_somewhere("sym-pa-tx") &&
                   !improves_somewhere("sym-pa-rx");
  }

  const bool ok = rows_ok && monotone_ok && p_grows && improvers_ok &&
                  wall_seconds < 1800.0;
  std::string monotone_note =
      monotone_ok
          ? "loss-monotone at 1e-4"
          : "NOT loss-monotone: " + worst_where + " re-gains " +
                fmt(worst_defect, 3) +
                " per step (converged rows; genuine model behavior of the "
                "post-selected/over-squeezed corners, see decisions ledger)";
  rep.report(13, ok,
             std::to_string(n_rows) + " figure rows sane; " + monotone_note +
                 "; success probability grows with loss (" +
                 (p_grows ? "yes" : "no") + "); improver set matches (" +
                 (improvers_ok ? "yes" : "no") + "); wall time " +
                 fmt(wall_seconds, 4) + " s < 1800 s");
}

}  // namespace

bool run_acceptance(std::ostream& os, int threads,
                    const std::string& out_dir) {
  Reporter rep{os};
  criterion_coherent_benchmark(rep);
  criterion_two_route(rep);
  criterion_parseval(rep);
  criterion_hbsm_exact(rep);
  criterion_hand_cases(rep);
  criterion_alpha_independence(rep);
  criterion_incomplete(rep);
  criterion_ps_commutation(rep);
  criterion_deloc_symmetry(rep);

  const auto t0 = Clock::now();
  std::vector<FigureOutput> figures;
  for (const std::string& id : figure_ids()) {
    const auto tf = Clock::now();
    figures.push_back(run_figure(id, out_dir, false, threads));
    os << "  [figure " << id << "] " << fmt(seconds_since(tf), 4) << " s\n";
  }
  const double wall = seconds_since(t0);

  const FigureOutput* f2a = nullptr;
  const FigureOutput* f2b = nullptr;
  const FigureOutput* f5 = nullptr;
  const FigureOutput* f8 = nullptr;
  for (const auto& f : figures) {
    if (f.id == "2a") f2a = &f;
    if (f.id == "2b") f2b = &f;
    if (f.id == "5") f5 = &f;
    if (f.id == "8") f8 = &f;
  }
  criterion_fig2(rep, *f2a, *f2b);
  criterion_fig5(rep, *f5);
  criterion_fig8(rep, *f8);
  criterion_figure_suite(rep, figures, wall);

  os << (rep.all_ok ? "acceptance: all criteria passed\n"
                    : "acceptance: FAILURES above\n");
  return rep.all_ok;
}

}  // namespace telesim
