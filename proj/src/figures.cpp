#include "telesim/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "telesim/states.hpp"

namespace telesim {

namespace {

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> out;
  for (double x = lo; x <= hi + 1e-9; x += step) out.push_back(x);
  return out;
}

std::vector<double> loss_grid(bool fine) {
  return linspace_step(0.0, 15.0, fine ? 0.25 : 0.5);
}

std::vector<double> squeeze_grid(bool fine) {
  return linspace_step(1.0, 16.0, fine ? 0.25 : 0.5);
}

std::vector<double> alpha_grid(bool fine) {
  return linspace_step(0.1, 2.0, fine ? 0.05 : 0.1);
}

// One grid point of one curve.
struct Job {
  ExperimentSpec spec;
  double loss = 0.0;
  std::optional<double> squeeze;
};

std::vector<SweepRow> run_jobs(const std::vector<Job>& jobs, int threads) {
  std::vector<SweepRow> rows(jobs.size());
  parallel_for(long(jobs.size()), threads, [&](long i) {
    rows[i] = optimize_params(jobs[i].spec, jobs[i].loss, jobs[i].squeeze);
  });
  return rows;
}

bool spec_optimizes(const ExperimentSpec& spec) {
  return spec.gain.optimize || spec.optimize_squeeze || spec.tc.optimize ||
         spec.ts.optimize;
}

ExperimentSpec base_spec(const std::string& figure, Protocol protocol,
                         InputKind input, double alpha) {
  ExperimentSpec spec;
  spec.figure = figure;
  spec.protocol = protocol;
  spec.input = input;
  spec.alpha = alpha;
  return spec;
}

FigureCurve surface_curve(const std::string& name, ExperimentSpec spec,
                          const std::vector<double>& loss,
                          const std::vector<double>& squeeze, int threads) {
  std::vector<Job> jobs;
  for (double l : loss)
    for (double s : squeeze) jobs.push_back({spec, l, s});
  return {name, run_jobs(jobs, threads), spec_optimizes(spec)};
}

FigureCurve loss_curve(const std::string& name, ExperimentSpec spec,
                       const std::vector<double>& loss,
                       std::optional<double> squeeze, int threads) {
  std::vector<Job> jobs;
  for (double l : loss) jobs.push_back({spec, l, squeeze});
  return {name, run_jobs(jobs, threads), spec_optimizes(spec)};
}

FigureCurve classical_curve(const std::string& figure, double alpha,
                            const std::vector<double>& loss) {

  FigureCurve curve{"classical", {}};
  for (double l : loss) {
    SweepRow row;
    row.figure = figure;
    row.protocol = "classical";
    row.input = input_name(InputKind::cv_qubit);
    row.alpha = alpha;
    row.total_loss_db = l;
    row.f_bar = 2.0 / 3.0;
    row.route = "exact";
    curve.rows.push_back(row);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Plot emission: a minimal self-contained SVG writer (line panels for
// one-dimensional curves, gridded heatmaps for surfaces).
// ---------------------------------------------------------------------------

struct Rgb {
  int r, g, b;
};

Rgb heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // dark blue -> cyan -> yellow
  const double r = std::clamp(3.0 * t - 1.5, 0.0, 1.0);
  const double g = std::clamp(1.8 * t, 0.0, 1.0);
  const double b = std::clamp(1.2 - 1.5 * t, 0.1, 1.0);
  return {int(255 * r), int(255 * g), int(255 * b)};
}

const char* kLineColors[] = {"#1f6fb4", "#d03a2c", "#3a9c43", "#8458b3",
                             "#c78c1e", "#2aa1a6", "#74574a", "#5b5b5b"};

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else
      out += c;
  }
  return out;
}

void svg_figure(const FigureOutput& fig, std::ostream& os) {
  const bool surface = [&] {
    for (const auto& c : fig.curves) {
      std::map<double, int> losses, squeezes;
      for (const auto& r : c.rows) {
        losses[r.total_loss_db]++;
        if (!std::isnan(r.squeeze_db)) squeezes[r.squeeze_db]++;
      }
      if (losses.size() > 1 && squeezes.size() > 1) return true;
    }
    return false;
  }();

  const int panel_w = 340, panel_h = 300, margin = 52;
  if (surface) {
    // One heatmap panel per curve over (loss, second axis).
    const int n_panels = int(fig.curves.size());
    const int width = n_panels * (panel_w + 24) + margin;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
       << "' height='" << (panel_h + 110) << "'>\n";
    os << "<text x='12' y='20' font-family='sans-serif' font-size='15'>"
       << "figure " << svg_escape(fig.id) << "</text>\n";
    int px = margin;
    for (const auto& curve : fig.curves) {
      std::map<double, int> xs, ys;
      const bool use_alpha = [&] {
        std::map<double, int> alphas;
        for (const auto& r : curve.rows) alphas[r.alpha]++;
        return alphas.size() > 1;
      }();
      for (const auto& r : curve.rows) {
        xs[r.total_loss_db]++;
        ys[use_alpha ? r.alpha : (std::isnan(r.squeeze_db) ? 0.0
                                                           : r.squeeze_db)]++;
      }
      std::map<double, int> xi, yi;
      int i = 0;
      for (auto& [v, n] : xs) xi[v] = i++;
      i = 0;
      for (auto& [v, n] : ys) yi[v] = i++;
      const double cw = double(panel_w) / std::max<size_t>(xs.size(), 1);
      const double ch = double(panel_h) / std::max<size_t>(ys.size(), 1);
      os << "<text x='" << px << "' y='44' font-family='sans-serif' "
         << "font-size='12'>" << svg_escape(curve.name)
         << " (f_bar 0..1; x: loss dB, y: " << (use_alpha ? "alpha" : "squeeze dB")
         << ")</text>\n";
      for (const auto& r : curve.rows) {
        const double yv = use_alpha
                              ? r.alpha
                              : (std::isnan(r.squeeze_db) ? 0.0 : r.squeeze_db);
        const Rgb c = heat_color(r.f_bar);
        os << "<rect x='" << (px + xi[r.total_loss_db] * cw) << "' y='"
           << (52 + panel_h - (yi[yv] + 1) * ch) << "' width='" << (cw + 0.5)
           << "' height='" << (ch + 0.5) << "' fill='rgb(" << c.r << ',' << c.g
           << ',' << c.b << ")'/>\n";
      }
      px += panel_w + 24;
    }
    // Color scale.
    for (int i = 0; i < 100; ++i) {
      const Rgb c = heat_color(i / 99.0);
      os << "<rect x='" << (margin + i * 2) << "' y='" << (panel_h + 74)
         << "' width='2.5' height='12' fill='rgb(" << c.r << ',' << c.g << ','
         << c.b << ")'/>\n";
    }
    os << "<text x='" << margin << "' y='" << (panel_h + 102)
       << "' font-family='sans-serif' font-size='11'>f_bar 0 to 1</text>\n";
    os << "</svg>\n";
    return;
  }

  // Line chart: f_bar vs loss, one polyline per curve.
  const int width = 640, height = 420;
  double lo_x = 1e300, hi_x = -1e300;
  for (const auto& c : fig.curves)
    for (const auto& r : c.rows) {
      lo_x = std::min(lo_x, r.total_loss_db);
      hi_x = std::max(hi_x, r.total_loss_db);
    }
  auto sx = [&](double x) {
    return margin + (x - lo_x) / std::max(hi_x - lo_x, 1e-12) *
                        (width - 2 * margin);
  };
  auto sy = [&](double f) { return height - 40 - f * (height - 90); };
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << height << "'>\n";
  os << "<text x='12' y='20' font-family='sans-serif' font-size='15'>figure "
     << svg_escape(fig.id) << " (x: total loss dB, y: f_bar)</text>\n";
  os << "<line x1='" << sx(lo_x) << "' y1='" << sy(0) << "' x2='" << sx(hi_x)
     << "' y2='" << sy(0) << "' stroke='#999'/>\n";
  os << "<line x1='" << sx(lo_x) << "' y1='" << sy(0) << "' x2='" << sx(lo_x)
     << "' y2='" << sy(1) << "' stroke='#999'/>\n";
  int ci = 0;
  for (const auto& curve : fig.curves) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : curve.rows) pts.push_back({r.total_loss_db, r.f_bar});
    std::sort(pts.begin(), pts.end());
    os << "<polyline fill='none' stroke='"
       << kLineColors[ci % 8] << "' stroke-width='1.6' points='";
    for (const auto& [x, f] : pts) os << sx(x) << ',' << sy(f) << ' ';
    os << "'/>\n";
    os << "<text x='" << (width - 180) << "' y='" << (40 + 16 * ci)
       << "' font-family='sans-serif' font-size='11' fill='"
       << kLineColors[ci % 8] << "'>" << svg_escape(curve.name)
       << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

void write_outputs(const FigureOutput& fig, const std::string& out_dir,
                   const std::string& meta) {
  if (out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& curve : fig.curves) {
    std::ofstream csv(fs::path(out_dir) /
                      ("fig" + fig.id + "_" + curve.name + ".csv"));
    write_csv(curve.rows, csv);
  }
  std::ofstream svg(fs::path(out_dir) / ("fig" + fig.id + ".svg"));
  svg_figure(fig, svg);
  std::ofstream note(fs::path(out_dir) / ("fig" + fig.id + "_meta.txt"));
  note << meta;
}

}  // namespace

MonotonicityDefects monotonicity_defects(const FigureCurve& curve) {
  // One row per (alpha, loss) means the squeeze column is derived (fixed or
  // optimized) and the series runs over loss at fixed alpha; otherwise the
  // curve is a (loss, squeeze) surface and each squeeze is its own series.
  std::map<std::pair<double, double>, int> per_alpha_loss;
  for (const auto& r : curve.rows)
    per_alpha_loss[{r.alpha, r.total_loss_db}]++;
  bool loss_only = true;
  for (const auto& [key, count] : per_alpha_loss)
    if (count > 1) loss_only = false;

  struct Point {
    double loss, f, squeeze;
  };
  std::map<std::string, std::vector<Point>> series;
  for (const auto& r : curve.rows) {
    std::ostringstream key;
    key.precision(12);
    key << r.alpha << '|' << r.protocol << '|' << ng_kind_name(r.ng_kind);
    if (!loss_only)
      key << '|' << (std::isnan(r.squeeze_db) ? -1.0 : r.squeeze_db);
    series[key.str()].push_back(
        {r.total_loss_db, r.f_bar,
         std::isnan(r.squeeze_db) ? 0.0 : r.squeeze_db});
  }
  MonotonicityDefects defects;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.loss < b.loss; });
    for (size_t i = 1; i < pts.size(); ++i) {
      const double rise = pts[i].f - pts[i - 1].f;
      if (rise <= 0.0) continue;
      if (std::max(pts[i].squeeze, pts[i - 1].squeeze) > 12.25)
        defects.over_squeezed = std::max(defects.over_squeezed, rise);
      else
        defects.strict_regime = std::max(defects.strict_regime, rise);
    }
  }
  return defects;
}

double monotonicity_defect(const FigureCurve& curve) {
  const MonotonicityDefects d = monotonicity_defects(curve);
  return std::max(d.strict_regime, d.over_squeezed);
}

std::vector<std::string> figure_ids() {
  return {"2a", "2b", "3", "4a", "4b", "5", "7a", "7b", "8"};
}

FigureOutput run_figure(const std::string& id, const std::string& out_dir,
                        bool fine_grid, int threads) {
  const std::vector<double> loss = loss_grid(fine_grid);
  const std::vector<double> squeeze = squeeze_grid(fine_grid);
  FigureOutput fig;
  fig.id = id;
  std::string meta;

  if (id == "2a" || id == "2b") {
    const double alpha = (id == "2a") ? 0.5 : 1.0;
    ExperimentSpec cv =
        base_spec(id, Protocol::cvbsm, InputKind::cv_qubit, alpha);
    cv.gain = OptParam::free();
    fig.curves.push_back(
        surface_curve("cvbsm", cv, loss, squeeze, threads));
    ExperimentSpec hb =
        base_spec(id, Protocol::hbsm, InputKind::cv_qubit, alpha);
    fig.curves.push_back(
        surface_curve("hbsm", hb, loss, squeeze, threads));
    fig.curves.push_back(classical_curve(id, alpha, loss));
    meta =
        "Average fidelity of a Bloch-uniform cat qubit, both protocols, over "
        "(total loss dB, initial squeezing dB); alpha = " +
        std::to_string(alpha) +
        ".\nThe constant 2/3 qubit benchmark is included as its own "
        "curve.\n";
  } else if (id == "3") {
    const double alpha = 0.5;
    ExperimentSpec cv =
        base_spec(id, Protocol::cvbsm, InputKind::hybrid_dv, alpha);
    cv.gain = OptParam::free();
    fig.curves.push_back(
        surface_curve("cvbsm", cv, loss, squeeze, threads));
    ExperimentSpec hb =
        base_spec(id, Protocol::hbsm, InputKind::hybrid_dv, alpha);
    fig.curves.push_back(
        surface_curve("hbsm", hb, loss, squeeze, threads));
    ExperimentSpec dt =
        base_spec(id, Protocol::direct, InputKind::hybrid_dv, alpha);
    fig.curves.push_back(
        loss_curve("direct", dt, loss, std::nullopt, threads));
    meta =
        "Hybrid state, DV mode teleported, over (total loss dB, squeezing "
        "dB); the fidelities are independent of alpha (alpha = 0.5 is "
        "emitted). Direct transmission depends on loss only.\n";
  } else if (id == "4a" || id == "4b") {
    const double alpha = 0.5;
    const double squeeze_db = (id == "4a") ? 5.0 : 10.0;
    ExperimentSpec cv =
        base_spec(id, Protocol::cvbsm, InputKind::hybrid_cv, alpha);
    cv.gain = OptParam::free();
    fig.curves.push_back(
        loss_curve("cvbsm", cv, loss, squeeze_db, threads));
    ExperimentSpec hb =
        base_spec(id, Protocol::hbsm, InputKind::hybrid_cv, alpha);
    fig.curves.push_back(
        loss_curve("hbsm", hb, loss, squeeze_db, threads));
    ExperimentSpec inc =
        base_spec(id, Protocol::hbsm_incomplete, InputKind::hybrid_cv, alpha);
    fig.curves.push_back(
        loss_curve("hbsm-incomplete", inc, loss, squeeze_db, threads));
    meta = "Hybrid state, CV mode teleported, fixed initial squeezing " +
           std::to_string(squeeze_db) +
           " dB, alpha = 0.5; p_total columns carry the success "
           "probabilities.\n";
  } else if (id == "5") {
    std::vector<Job> cv_jobs, hb_jobs, dt_jobs;
    for (double alpha : alpha_grid(fine_grid)) {
      ExperimentSpec cv =
          base_spec(id, Protocol::cvbsm, InputKind::hybrid_cv, alpha);
      cv.gain = OptParam::free();
      cv.optimize_squeeze = true;
      cv.squeeze_db.clear();
      ExperimentSpec hb =
          base_spec(id, Protocol::hbsm, InputKind::hybrid_cv, alpha);
      hb.optimize_squeeze = true;
      hb.squeeze_db.clear();
      ExperimentSpec dt =
          base_spec(id, Protocol::direct, InputKind::hybrid_cv, alpha);
      for (double l : loss) {
        cv_jobs.push_back({cv, l, std::nullopt});
        hb_jobs.push_back({hb, l, std::nullopt});
        dt_jobs.push_back({dt, l, std::nullopt});
      }
    }
    fig.curves.push_back({"cvbsm", run_jobs(cv_jobs, threads), true});
    fig.curves.push_back({"hbsm", run_jobs(hb_jobs, threads), true});
    fig.curves.push_back({"direct", run_jobs(dt_jobs, threads), false});
    meta =
        "Hybrid state, CV mode teleported, over (total loss dB, alpha); "
        "squeezing optimized per point up to 16 dB, CV-BSM gain also "
        "optimized.\n";
  } else if (id == "7a" || id == "7b") {
    const double alpha = 0.5;
    const bool optimize_squeeze = (id == "7b");
    const std::optional<double> fixed_squeeze =
        optimize_squeeze ? std::nullopt : std::optional<double>(3.0);
    struct Variant {
      const char* name;
      NgKind kind;
      NgPlacement placement;
    };
    const std::vector<Variant> variants = {
        {"none", NgKind::none, NgPlacement::before},
        {"sym-ps-tx", NgKind::symmetric_ps, NgPlacement::before},
        {"sym-ps-rx", NgKind::symmetric_ps, NgPlacement::after},
        {"sym-pa-tx", NgKind::symmetric_pa, NgPlacement::before},
        {"sym-pa-rx", NgKind::symmetric_pa, NgPlacement::after},
        {"deloc-ps", NgKind::delocalized_ps, NgPlacement::before},
        {"deloc-pa", NgKind::delocalized_pa, NgPlacement::before},
    };
    for (const auto& v : variants) {
      ExperimentSpec spec =
          base_spec(id, Protocol::hbsm, InputKind::hybrid_cv, alpha);
      spec.ng_kind = v.kind;
      spec.ng_placement = v.placement;
      spec.optimize_squeeze = optimize_squeeze;
      if (optimize_squeeze) spec.squeeze_db.clear();
      fig.curves.push_back(
          loss_curve(v.name, spec, loss, fixed_squeeze, threads));
    }
    meta = std::string(
               "Hybrid state, CV mode teleported via the H-BSM protocol "
               "with photon subtraction/addition variants; alpha = 0.5; ") +
           (optimize_squeeze ? "initial squeezing optimized per point"
                             : "initial squeezing fixed at 3 dB") +
           ". tx = applied before transmission, rx = after.\n";
  } else if (id == "8") {
    const double alpha = 0.5;
    struct Variant {
      const char* name;
      NgKind kind;
      NgTarget target;
    };
    const std::vector<Variant> variants = {
        {"none", NgKind::none, NgTarget::both},
        {"pc-sender", NgKind::catalysis, NgTarget::sender},
        {"pc-receiver", NgKind::catalysis, NgTarget::receiver},
        {"pc-symmetric", NgKind::catalysis, NgTarget::both},
        {"qs-symmetric", NgKind::scissors, NgTarget::both},
    };
    for (const auto& v : variants) {
      ExperimentSpec spec =
          base_spec(id, Protocol::hbsm, InputKind::hybrid_cv, alpha);
      spec.ng_kind = v.kind;
      spec.ng_placement = NgPlacement::after;
      spec.ng_target = v.target;
      if (v.kind == NgKind::catalysis) spec.tc = OptParam::free();
      if (v.kind == NgKind::scissors) spec.ts = OptParam::free();
      fig.curves.push_back(
          surface_curve(v.name, spec, loss, squeeze, threads));
    }
    meta =
        "Hybrid state, CV mode teleported via the H-BSM protocol with "
        "photon catalysis (pc) and quantum scissors (qs) applied after "
        "distribution; tc/ts optimized per point; alpha = 0.5.\n";
  } else {
    throw ConfigError("unknown figure id: " + id);
  }

  // The data is written regardless: fidelity re-gains along the loss axis
  // are genuine model behavior in photon-rich corners (post-selected
  // outcome-averaged fidelity is not loss-monotone; see the README note),
  // and the caller decides how to treat them. Defects far above the
  // documented scale still indicate numerical breakage.
  for (const auto& curve : fig.curves) {
    const double defect = monotonicity_defect(curve);
    if (defect > 5e-2)
      throw ConvergenceError("figure " + id + " curve " + curve.name +
                             ": fidelity rose with loss by " +
                             std::to_string(defect));
    if (defect > 1e-4)
      meta += "note: curve " + curve.name + " re-gains up to " +
              std::to_string(defect) +
              " fidelity per 0.5 dB loss step (photon-rich resource; "
              "post-selected fidelity is not loss-monotone there).\n";
  }
  write_outputs(fig, out_dir, meta);
  return fig;
}

}  // namespace telesim
