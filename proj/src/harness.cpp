#include "lrgeom/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "lrgeom/adversarial.hpp"
#include "lrgeom/error.hpp"
#include "lrgeom/frames.hpp"
#include "lrgeom/geometry.hpp"
#include "lrgeom/random.hpp"
#include "lrgeom/serialize.hpp"
#include "lrgeom/smallball.hpp"

#ifndef LRGEOM_BUILD_ID
#define LRGEOM_BUILD_ID "unknown"
#endif

namespace lrgeom {

const char* build_id() { return LRGEOM_BUILD_ID; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
std::string fmt(Index v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }
std::string fmt(int v) { return std::to_string(v); }

// One CSV row assembled by column name, then laid out by a fixed header.
class Row {
 public:
  template <class T>
  Row& set(const std::string& k, const T& v) {
    if constexpr (std::is_convertible_v<T, std::string>)
      cells_[k] = std::string(v);
    else
      cells_[k] = fmt(v);
    return *this;
  }
  std::vector<std::string> layout(const std::vector<std::string>& header) const {
    std::vector<std::string> out;
    out.reserve(header.size());
    for (const auto& h : header) {
      auto it = cells_.find(h);
      out.push_back(it == cells_.end() ? "" : it->second);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> cells_;
};

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json base_summary(const ExperimentConfig& cfg) {
  return json{{"schema_version", kSchemaVersion}, {"build_id", build_id()}, {"config", config_to_json(cfg)}};
}

FrameMatrix make_frame(const std::string& kind, Index L, Index K, std::uint64_t seed) {
  if (kind == "tetris") return spectral_tetris(L, K);
  if (kind == "haar") return haar_frame(L, K, seed);
  if (kind == "repeated") return repeated_basis(L, K);
  throw ConfigError("unknown frame kind '" + kind + "'");
}

std::string deconv_precondition(Index K, Index N, Index L) {
  if (K < 3) return "K<3";
  if (2 * K > L) return "2K>L";
  if (36.0 * static_cast<double>(L) > static_cast<double>(K) * static_cast<double>(N)) return "L>KN/36";
  return "";
}

std::string completion_precondition(Index n1, Index n2, Index r, Index m) {
  if (n1 < n2) return "n1<n2";
  if (r < 1 || r > n2) return "rank";
  if (32.0 * static_cast<double>(m) > static_cast<double>(n1) * static_cast<double>(n2)) return "m>n1n2/32";
  return "";
}

template <class Task>
std::vector<std::vector<Row>> run_tasks(Index n, int jobs, Task task) {
  std::vector<std::vector<Row>> out(static_cast<size_t>(n));
  parallel_for(n, jobs, [&](Index i) { out[static_cast<size_t>(i)] = task(i); });
  return out;
}

Table assemble(std::vector<std::string> header, const std::vector<std::vector<Row>>& parts) {
  Table t;
  t.header = std::move(header);
  for (const auto& part : parts)
    for (const auto& r : part) t.rows.push_back(r.layout(t.header));
  return t;
}

const std::vector<std::string> kScalingDeconvHeader{
    "schema_version", "problem", "point", "K", "N", "L", "seed", "status", "reason", "event1", "event2",
    "ratio", "ratio_bound", "within_bound", "sqrt_L_over_KN", "tau0", "AZ_norm", "beta", "Z_frob", "AW_norm",
    "cone_margin", "eps_star", "mu_h0", "block", "par_norm_sq", "cert_hash"};

const std::vector<std::string> kScalingCompletionHeader{
    "schema_version", "problem", "point", "n1", "n2", "r", "m", "seed", "status", "reason", "event1", "event2",
    "ratio", "ratio_bound", "within_bound", "sqrt_m_over_rn1n2", "tau0", "AZ_norm", "beta", "Z_frob", "AW_norm",
    "tperp_nuclear_Z", "proj_norm", "proj_threshold", "cone_margin", "eps_star", "row", "cert_hash"};

Row deconv_cert_row(const ExperimentConfig& cfg, size_t point, std::uint64_t seed) {
  const auto [K, N, L] = cfg.deconv_grid[point];
  Row row;
  row.set("schema_version", kSchemaVersion).set("problem", "deconv").set("point", static_cast<Index>(point));
  row.set("K", K).set("N", N).set("L", L).set("seed", seed);
  row.set("sqrt_L_over_KN", std::sqrt(static_cast<double>(L) / (static_cast<double>(K) * static_cast<double>(N))));
  const std::string pre = deconv_precondition(K, N, L);
  if (!pre.empty() || cfg.frame != "tetris") {
    row.set("status", "skipped").set("reason", pre.empty() ? "frame_not_tetris" : pre);
    return row;
  }
  try {
    const auto inst = make_deconv_instance(spectral_tetris(L, K), N, seed, cfg.signal);
    const auto c = deconv_certificate(inst);
    row.set("status", "ok").set("event1", c.event1).set("event2", c.event2);
    row.set("ratio", c.ratio).set("ratio_bound", c.ratio_bound).set("within_bound", c.ratio_within_bound);
    row.set("tau0", c.tau0 * c.scale).set("AZ_norm", 2.0 * c.tau0).set("beta", c.beta);
    row.set("Z_frob", c.Z_frob).set("AW_norm", c.AW_norm).set("cone_margin", c.cone_margin);
    row.set("eps_star", c.eps_star).set("mu_h0", c.mu_h0).set("block", c.block_index);
    row.set("par_norm_sq", c.par_norms_sq[static_cast<size_t>(c.block_index)]);
    row.set("cert_hash", content_hash({&c.W, &c.Z}));
  } catch (const AdmissibilityError& e) {
    row.set("status", "event2_fail").set("reason", "no_admissible_block").set("event2", false);
  } catch (const DegenerateInputError& e) {
    row.set("status", "degenerate").set("reason", e.what());
  }
  return row;
}

Row completion_cert_row(const ExperimentConfig& cfg, size_t point, std::uint64_t seed) {
  const auto [n1, n2, r, m] = cfg.completion_grid[point];
  Row row;
  row.set("schema_version", kSchemaVersion).set("problem", "completion").set("point", static_cast<Index>(point));
  row.set("n1", n1).set("n2", n2).set("r", r).set("m", m).set("seed", seed);
  row.set("sqrt_m_over_rn1n2",
          std::sqrt(static_cast<double>(m) / (static_cast<double>(r) * static_cast<double>(n1) * static_cast<double>(n2))));
  const std::string pre = completion_precondition(n1, n2, r, m);
  if (!pre.empty()) {
    row.set("status", "skipped").set("reason", pre);
    return row;
  }
  try {
    const auto inst = make_completion_instance(n1, n2, r, m, seed);
    const auto c = mc_certificate(inst);
    row.set("status", c.event1 && c.event2 ? "ok" : "event_fail");
    if (!(c.event1 && c.event2)) row.set("reason", !c.event2 ? "event2" : "event1");
    row.set("event1", c.event1).set("event2", c.event2);
    row.set("ratio", c.ratio).set("ratio_bound", c.ratio_bound).set("within_bound", c.ratio_within_bound);
    row.set("tau0", c.tau0 * c.scale).set("AZ_norm", 2.0 * c.tau0).set("beta", c.beta);
    row.set("Z_frob", c.Z_frob).set("AW_norm", c.AW_norm).set("tperp_nuclear_Z", c.tperp_nuclear_Z);
    row.set("proj_norm", c.proj_norm).set("proj_threshold", c.proj_threshold).set("cone_margin", c.cone_margin);
    row.set("eps_star", c.eps_star).set("row", c.row_index);
    row.set("cert_hash", content_hash({}, {&c.W, &c.Z}));
  } catch (const DegenerateInputError& e) {
    row.set("status", "degenerate").set("reason", e.what());
  }
  return row;
}

}  // namespace

void parallel_for(Index n, int jobs, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<Index>(std::max(1, jobs), n));
  if (workers == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (Index i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out += '"';
        for (char ch : c) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      } else {
        out += c;
      }
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

Index Table::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ArgumentError("table has no column '" + name + "'");
  return static_cast<Index>(it - header.begin());
}

const std::string& Table::cell(size_t row, const std::string& name) const {
  return rows.at(row).at(static_cast<size_t>(column(name)));
}

double Table::number(size_t row, const std::string& name) const {
  const std::string& c = cell(row, name);
  return c.empty() ? kNaN : std::stod(c);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("fit_line: length mismatch");
  LineFit f;
  f.points = static_cast<Index>(x.size());
  if (x.size() < 2) {
    f.slope = f.intercept = kNaN;
    return f;
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : kNaN;
  f.intercept = my - f.slope * mx;
  return f;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.solver.max_iters = 20000;
  for (std::uint64_t s = 0; s < 25; ++s) c.seeds.push_back(s);
  if (experiment == "scaling") {
    for (Index s : {9, 12, 16, 24, 32, 48}) c.deconv_grid.push_back({s, 8 * s, 2 * s});
    for (Index n : {40, 60, 80, 100}) c.completion_grid.push_back({n, n, 2, n * n / 40});
  } else if (experiment == "instability") {
    c.seeds = {0, 1, 2};
    c.deconv_grid = {{12, 100, 24}};
    c.completion_grid = {{100, 100, 2, 300}};
  } else if (experiment == "stability") {
    c.seeds = {0, 1, 2, 3, 4};
    c.deconv_grid = {{8, 8, 600}};
    c.signal = SignalKind::kFlat;
    c.tau_grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2, 0.3, 0.5, 1.0};
    c.solver.max_iters = 50000;
  } else if (experiment == "checks") {
    c.seeds = {0};
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known{
      "experiment", "problem", "seeds", "deconv_grid", "completion_grid", "t_grid", "tau_grid", "signal",
      "frame", "solver", "pz_trials", "projection_trials", "lemma_samples", "width_trials", "jobs"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  ExperimentConfig c = default_config(j.value("experiment", std::string("scaling")));
  try {
    if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("deconv_grid")) c.deconv_grid = j.at("deconv_grid").get<std::vector<std::array<Index, 3>>>();
    if (j.contains("completion_grid"))
      c.completion_grid = j.at("completion_grid").get<std::vector<std::array<Index, 4>>>();
    if (j.contains("t_grid")) c.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (j.contains("tau_grid")) c.tau_grid = j.at("tau_grid").get<std::vector<double>>();
    if (j.contains("signal")) c.signal = signal_kind_from_string(j.at("signal").get<std::string>());
    if (j.contains("frame")) c.frame = j.at("frame").get<std::string>();
    if (j.contains("pz_trials")) c.pz_trials = j.at("pz_trials").get<Index>();
    if (j.contains("projection_trials")) c.projection_trials = j.at("projection_trials").get<Index>();
    if (j.contains("lemma_samples")) c.lemma_samples = j.at("lemma_samples").get<Index>();
    if (j.contains("width_trials")) c.width_trials = j.at("width_trials").get<Index>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      static const std::set<std::string> skeys{"max_iters", "stop_tol_rel", "feasibility_tol", "log_every",
                                               "primal_step", "dual_step", "adaptive_steps"};
      for (const auto& [k, v] : s.items())
        if (!skeys.count(k)) throw ConfigError("unknown solver key '" + k + "'");
      c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
      c.solver.stop_tol_rel = s.value("stop_tol_rel", c.solver.stop_tol_rel);
      c.solver.feasibility_tol = s.value("feasibility_tol", c.solver.feasibility_tol);
      c.solver.log_every = s.value("log_every", c.solver.log_every);
      c.solver.primal_step = s.value("primal_step", c.solver.primal_step);
      c.solver.dual_step = s.value("dual_step", c.solver.dual_step);
      c.solver.adaptive_steps = s.value("adaptive_steps", c.solver.adaptive_steps);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (c.problem != "deconv" && c.problem != "completion") throw ConfigError("problem must be deconv or completion");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  for (double t : c.t_grid)
    if (!(t > 0) || t > 1) throw ConfigError("t_grid entries must lie in (0, 1]");
  for (double t : c.tau_grid)
    if (t < 0) throw ConfigError("tau_grid entries must be nonnegative");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment},
              {"problem", c.problem},
              {"seeds", c.seeds},
              {"deconv_grid", c.deconv_grid},
              {"completion_grid", c.completion_grid},
              {"t_grid", c.t_grid},
              {"tau_grid", c.tau_grid},
              {"signal", to_string(c.signal)},
              {"frame", c.frame},
              {"solver",
               {{"max_iters", c.solver.max_iters},
                {"stop_tol_rel", c.solver.stop_tol_rel},
                {"feasibility_tol", c.solver.feasibility_tol},
                {"log_every", c.solver.log_every},
                {"primal_step", c.solver.primal_step},
                {"dual_step", c.solver.dual_step},
                {"adaptive_steps", c.solver.adaptive_steps}}},
              {"pz_trials", c.pz_trials},
              {"projection_trials", c.projection_trials},
              {"lemma_samples", c.lemma_samples},
              {"width_trials", c.width_trials},
              {"jobs", c.jobs}};
}

ExperimentOutput run_scaling_sweep(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.summary = base_summary(cfg);
  const bool deconv = cfg.problem == "deconv";
  const size_t npts = deconv ? cfg.deconv_grid.size() : cfg.completion_grid.size();
  const Index ntasks = static_cast<Index>(npts * cfg.seeds.size());
  auto parts = run_tasks(ntasks, cfg.jobs, [&](Index t) {
    const size_t p = static_cast<size_t>(t) / cfg.seeds.size();
    const std::uint64_t seed = cfg.seeds[static_cast<size_t>(t) % cfg.seeds.size()];
    return std::vector<Row>{deconv ? deconv_cert_row(cfg, p, seed) : completion_cert_row(cfg, p, seed)};
  });
  out.table = assemble(deconv ? kScalingDeconvHeader : kScalingCompletionHeader, parts);

  const std::string xcol = deconv ? "sqrt_L_over_KN" : "sqrt_m_over_rn1n2";
  std::vector<std::vector<double>> ratios(npts), az(npts);
  std::vector<double> xs(npts, kNaN);
  std::vector<Index> counts(npts, 0), skipped(npts, 0);
  Index violations = 0, asserted = 0;
  for (size_t i = 0; i < out.table.rows.size(); ++i) {
    const size_t p = static_cast<size_t>(out.table.number(i, "point"));
    xs[p] = out.table.number(i, xcol);
    const std::string& st = out.table.cell(i, "status");
    if (st == "skipped") ++skipped[p];
    if (st != "ok") continue;
    ++counts[p];
    ratios[p].push_back(out.table.number(i, "ratio"));
    az[p].push_back(out.table.number(i, "AZ_norm"));
    if (out.table.cell(i, "event1") == "1" && out.table.cell(i, "event2") == "1") {
      ++asserted;
      if (out.table.cell(i, "within_bound") != "1") ++violations;
    }
  }
  std::vector<double> fx, fy, fz;
  json pts = json::array();
  for (size_t p = 0; p < npts; ++p) {
    const double med = median(ratios[p]), medaz = median(az[p]);
    json pj{{"point", p}, {"x", xs[p]}, {"admissible", counts[p]}, {"skipped", skipped[p]},
            {"seeds", cfg.seeds.size()}, {"median_ratio", med}, {"median_AZ_norm", medaz}};
    pts.push_back(pj);
    if (counts[p] > 0 && !std::isnan(med)) {
      fx.push_back(std::log(xs[p]));
      fy.push_back(std::log(med));
      fz.push_back(std::log(medaz));
    }
  }
  const LineFit f = fit_line(fx, fy), fa = fit_line(fx, fz);
  out.summary["points"] = pts;
  out.summary["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"points", f.points}};
  out.summary["fit_unnormalized_AZ"] = {{"slope", fa.slope}, {"intercept", fa.intercept}, {"points", fa.points}};
  out.summary["bound_rows"] = asserted;
  out.summary["bound_violations"] = violations;
  return out;
}

ExperimentOutput run_instability(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.summary = base_summary(cfg);
  const bool deconv = cfg.problem == "deconv";
  const size_t npts = deconv ? cfg.deconv_grid.size() : cfg.completion_grid.size();
  const Index ntasks = static_cast<Index>(npts * cfg.seeds.size());
  auto parts = run_tasks(ntasks, cfg.jobs, [&](Index task) {
    const size_t p = static_cast<size_t>(task) / cfg.seeds.size();
    const std::uint64_t seed = cfg.seeds[static_cast<size_t>(task) % cfg.seeds.size()];
    std::vector<Row> rows;
    Row base;
    base.set("schema_version", kSchemaVersion).set("problem", cfg.problem).set("point", static_cast<Index>(p));
    base.set("seed", seed);
    auto fill = [&](Row row, double t, const std::string& hash, double eps, const NoiseReport& rep,
                    const auto& sol, double nuc_hat, double dist_hat) {
      row.set("t", t).set("status", "ok").set("tau0", rep.tau0 / t).set("tau", rep.residual);
      row.set("eps_star", eps).set("dist_tilde", rep.distance).set("dist_hat", dist_hat);
      row.set("lower_bound", rep.distance_bound).set("nuc_X0", rep.nuclear_X0).set("nuc_tilde", rep.nuclear_tilde);
      row.set("nuc_hat", nuc_hat).set("nuclear_gap", rep.nuclear_tilde - nuc_hat);
      row.set("residual_tilde", rep.residual).set("tilde_feasible", std::abs(rep.residual - t * rep.tau0) <= 1e-9);
      row.set("solver_converged", sol.converged).set("solver_iters", sol.iterations);
      row.set("solver_feas", sol.feasibility_residual).set("cert_hash", hash);
      return row;
    };
    if (deconv) {
      const auto [K, N, L] = cfg.deconv_grid[p];
      base.set("K", K).set("N", N).set("L", L);
      const std::string pre = deconv_precondition(K, N, L);
      if (!pre.empty()) return std::vector<Row>{Row(base).set("status", "skipped").set("reason", pre)};
      try {
        const auto inst = make_deconv_instance(spectral_tetris(L, K), N, seed, cfg.signal);
        const auto c = deconv_certificate(inst);
        const std::string hash = content_hash({&c.W, &c.Z});
        for (double t : cfg.t_grid) {
          const auto noise = adversarial_noise(c, inst, t);
          const auto A = deconv_operator(inst);
          const auto sol = solve<cplx>(A, noise.y, noise.report.residual, cfg.solver);
          const CMat X0 = inst.X0();
          rows.push_back(fill(base, t, hash, c.eps_star, noise.report, sol, sol.objective, (sol.X_hat - X0).norm()));
        }
      } catch (const AdmissibilityError&) {
        rows.push_back(Row(base).set("status", "event2_fail").set("reason", "no_admissible_block"));
      } catch (const DegenerateInputError& e) {
        rows.push_back(Row(base).set("status", "degenerate").set("reason", e.what()));
      }
    } else {
      const auto [n1, n2, r, m] = cfg.completion_grid[p];
      base.set("n1", n1).set("n2", n2).set("r", r).set("m", m);
      const std::string pre = completion_precondition(n1, n2, r, m);
      if (!pre.empty()) return std::vector<Row>{Row(base).set("status", "skipped").set("reason", pre)};
      try {
        const auto inst = make_completion_instance(n1, n2, r, m, seed);
        const auto c = mc_certificate(inst);
        if (!(c.event1 && c.event2) || !(c.eps_star > 0)) {
          rows.push_back(Row(base).set("status", "event_fail").set("reason", !c.event2 ? "event2" : "event1"));
          return rows;
        }
        const std::string hash = content_hash({}, {&c.W, &c.Z});
        for (double t : cfg.t_grid) {
          const auto noise = adversarial_noise(c, inst, t);
          const auto A = mc_operator(inst);
          const auto sol = solve<double>(A, noise.y, noise.report.residual, cfg.solver);
          rows.push_back(fill(base, t, hash, c.eps_star, noise.report, sol, sol.objective, (sol.X_hat - inst.X0).norm()));
        }
      } catch (const DegenerateInputError& e) {
        rows.push_back(Row(base).set("status", "degenerate").set("reason", e.what()));
      }
    }
    return rows;
  });
  std::vector<std::string> header{"schema_version", "problem", "point"};
  if (deconv)
    header.insert(header.end(), {"K", "N", "L"});
  else
    header.insert(header.end(), {"n1", "n2", "r", "m"});
  header.insert(header.end(), {"seed", "t", "status", "reason", "tau0", "tau", "eps_star", "dist_tilde", "dist_hat",
                               "lower_bound", "nuc_X0", "nuc_tilde", "nuc_hat", "nuclear_gap", "residual_tilde",
                               "tilde_feasible", "solver_converged", "solver_iters", "solver_feas", "cert_hash"});
  out.table = assemble(header, parts);

  Index ok = 0, dist_fail = 0, nuc_fail = 0, feas_fail = 0, obj_fail = 0;
  for (size_t i = 0; i < out.table.rows.size(); ++i) {
    if (out.table.cell(i, "status") != "ok") continue;
    ++ok;
    if (out.table.number(i, "dist_tilde") < out.table.number(i, "lower_bound")) ++dist_fail;
    if (out.table.number(i, "nuc_tilde") > out.table.number(i, "nuc_X0") + 1e-9) ++nuc_fail;
    if (out.table.cell(i, "tilde_feasible") != "1") ++feas_fail;
    if (out.table.number(i, "nuclear_gap") < -1e-6 * out.table.number(i, "nuc_X0")) ++obj_fail;
  }
  out.summary["rows_ok"] = ok;
  out.summary["distance_bound_failures"] = dist_fail;
  out.summary["nuclear_failures"] = nuc_fail;
  out.summary["feasibility_failures"] = feas_fail;
  out.summary["solver_worse_than_tilde"] = obj_fail;
  return out;
}

ExperimentOutput run_stability_sweep(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.summary = base_summary(cfg);
  const size_t npts = cfg.deconv_grid.size();
  const Index ntasks = static_cast<Index>(npts * cfg.seeds.size());
  auto parts = run_tasks(ntasks, cfg.jobs, [&](Index task) {
    const size_t p = static_cast<size_t>(task) / cfg.seeds.size();
    const std::uint64_t seed = cfg.seeds[static_cast<size_t>(task) % cfg.seeds.size()];
    const auto [K, N, L] = cfg.deconv_grid[p];
    const auto inst = make_deconv_instance(make_frame(cfg.frame, L, K, seed), N, seed, cfg.signal);
    const auto A = deconv_operator(inst);
    const CMat X0 = inst.X0();
    const double x0n = X0.norm();
    const CVec AX0 = deconv_forward(inst, X0);

    // Worst-case direction: the kernel certificate when its hypotheses hold,
    // otherwise the least-amplified tangent direction.
    CVec cert_dir;
    std::string source;
    try {
      const auto c = deconv_certificate(inst);
      cert_dir = deconv_forward(inst, c.Z);
      source = "certificate";
    } catch (const Error& e) {
      const auto td = tangent_min_direction(inst);
      cert_dir = td.AW;
      source = std::string("tangent_fallback:") +
               (e.code() == ErrorCode::kAdmissibility ? "event2" : e.code() == ErrorCode::kDimension ? "regime" : "degenerate");
    }
    cert_dir /= cert_dir.norm();
    Rng rng = make_rng(seed, 0x4e4f495345ULL);
    CVec rand_dir = gaussian_complex(L, 1, rng);
    rand_dir /= rand_dir.norm();

    std::vector<Row> rows;
    Row base;
    base.set("schema_version", kSchemaVersion).set("point", static_cast<Index>(p)).set("K", K).set("N", N).set("L", L);
    base.set("seed", seed).set("mu_h0", incoherence_mu(inst.frame, inst.h0));
    auto run = [&](const std::string& noise, const std::string& src, double rel, const CVec& dir) {
      const double tau = rel * x0n;
      const CVec y = AX0 + tau * dir;
      const auto sol = solve<cplx>(A, y, tau, cfg.solver);
      const double err = (sol.X_hat - X0).norm();
      Row r = base;
      r.set("noise", noise).set("noise_source", src).set("tau_rel", rel).set("tau", tau).set("err", err);
      r.set("err_rel", err / x0n).set("err_over_tau", tau > 0 ? err / tau : kNaN);
      r.set("solver_converged", sol.converged).set("solver_iters", sol.iterations);
      r.set("solver_feas", sol.feasibility_residual);
      rows.push_back(r);
    };
    run("none", "", 0.0, CVec::Zero(L));
    for (double rel : cfg.tau_grid) {
      if (rel == 0) continue;
      run("certificate", source, rel, cert_dir);
      run("random", "gaussian", rel, rand_dir);
    }
    return rows;
  });
  out.table = assemble({"schema_version", "point", "K", "N", "L", "seed", "mu_h0", "noise", "noise_source", "tau_rel",
                        "tau", "err", "err_rel", "err_over_tau", "solver_converged", "solver_iters", "solver_feas"},
                       parts);

  // Per-noise medians of err/tau at each tau_rel.
  json per_noise = json::object();
  for (const std::string noise : {"certificate", "random"}) {
    std::map<double, std::vector<double>> by_tau;
    for (size_t i = 0; i < out.table.rows.size(); ++i)
      if (out.table.cell(i, "noise") == noise)
        by_tau[out.table.number(i, "tau_rel")].push_back(out.table.number(i, "err_over_tau"));
    json curve = json::array();
    double up_min = INFINITY, up_max = 0;
    std::vector<double> lx, ly;
    for (const auto& [rel, v] : by_tau) {
      const double med = median(v);
      curve.push_back({{"tau_rel", rel}, {"median_err_over_tau", med}});
      if (rel >= 0.1 - 1e-12 && rel <= 1.0 + 1e-12) {
        up_min = std::min(up_min, med);
        up_max = std::max(up_max, med);
        lx.push_back(std::log(rel));
        ly.push_back(std::log(med * rel));
      }
    }
    auto at = [&](double rel) {
      for (const auto& [r, v] : by_tau)
        if (std::abs(r - rel) <= 1e-12 * std::max(1.0, rel)) return median(v);
      return kNaN;
    };
    const LineFit f = fit_line(lx, ly);
    per_noise[noise] = {{"curve", curve},
                        {"upper_decade_variation", up_min > 0 ? up_max / up_min : kNaN},
                        {"upper_decade_slope", f.slope},
                        {"transition_ratio", at(1e-3) / at(0.3)}};
  }
  std::vector<double> noiseless;
  std::set<std::string> sources;
  for (size_t i = 0; i < out.table.rows.size(); ++i) {
    if (out.table.cell(i, "noise") == "none") noiseless.push_back(out.table.number(i, "err_rel"));
    if (out.table.cell(i, "noise") == "certificate") sources.insert(out.table.cell(i, "noise_source"));
  }
  out.summary["noise"] = per_noise;
  out.summary["noiseless_err_rel_max"] = noiseless.empty() ? kNaN : *std::max_element(noiseless.begin(), noiseless.end());
  out.summary["certificate_noise_sources"] = std::vector<std::string>(sources.begin(), sources.end());
  return out;
}

json run_checks(const ExperimentConfig& cfg) {
  json report = base_summary(cfg);
  json checks = json::array();
  const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
  bool all = true;
  auto add = [&](json c) {
    all = all && c.value("pass", false);
    checks.push_back(std::move(c));
  };
  const Index S = cfg.lemma_samples;

  // B1 sandwich on random W.
  {
    const FrameMatrix F = spectral_tetris(40, 12);
    const double logeL = std::log(M_E * static_cast<double>(F.L()));
    Index bad = 0;
    double worst = 0;
    for (Index k = 0; k < 100; ++k) {
      Rng rng = make_rng(seed, 1000 + static_cast<std::uint64_t>(k));
      const CMat W = gaussian_complex(F.K(), 10, rng);
      const double s = b1_norm(F, W), w = weak_b1_norm(F, W);
      if (!(w <= s + 1e-12 && s <= logeL * w + 1e-12)) ++bad;
      worst = std::max(worst, s / (logeL * w));
    }
    add({{"name", "b1_sandwich"}, {"pass", bad == 0}, {"samples", 100}, {"violations", bad}, {"max_b1_over_log_weak", worst}, {"seed", seed}});
  }

  // B1 lower bound and large-entries count on E_{mu,delta} samples.
  const FrameMatrix F = spectral_tetris(40, 12);
  const Index N = 8;
  const auto inst = make_deconv_instance(F, N, seed, SignalKind::kFlat);
  const CMat X0 = inst.X0();
  const double mu = incoherence_mu(F, inst.h0);
  const double sqL = std::sqrt(static_cast<double>(F.L()));
  const auto cone = sample_descent_cone(X0, S, seed);
  {
    Index bad = 0, members = 0;
    double amin = INFINITY, amax = 0;
    for (const auto& cs : cone) {
      const double delta = cs.alignment;
      amin = std::min(amin, delta);
      amax = std::max(amax, delta);
      const auto mem = in_E_mu_delta(F, X0, cs.Z, mu, delta, 1e-9);
      if (!mem.member) continue;
      ++members;
      if (b1_norm(F, cs.Z) < delta * sqL / mu - 1e-9) ++bad;
    }
    add({{"name", "b1_lower_bound"}, {"pass", bad == 0 && members == S}, {"samples", S}, {"members", members},
         {"violations", bad}, {"alignment_min", amin}, {"alignment_max", amax}, {"mu", mu}, {"seed", seed}});
  }
  {
    const double logeL = std::log(M_E * static_cast<double>(F.L()));
    Index bad = 0;
    for (Index k = 0; k < S; ++k) {
      Rng rng = make_rng(seed, 2000 + static_cast<std::uint64_t>(k));
      CMat Z = gaussian_complex(F.K(), N, rng);
      // vary the profile's spread: damp all but a few coordinates
      const Index keep = 1 + k % F.K();
      for (Index q = keep; q < F.K(); ++q) Z.row(q) *= 1e-3;
      Z /= Z.norm();
      const double b1 = b1_norm(F, Z);
      if (static_cast<double>(large_entries_count(F, Z)) < b1 * b1 / (logeL * logeL)) ++bad;
    }
    add({{"name", "large_entries"}, {"pass", bad == 0}, {"samples", S}, {"violations", bad}, {"seed", seed}});
  }
  // Maximal-descent bound by t-grid scan.
  {
    Index bad = 0, descents = 0;
    for (Index k = 0; k < S; ++k) {
      Rng rng = make_rng(seed, 3000 + static_cast<std::uint64_t>(k));
      const CVec h = gaussian_complex(6, 1, rng), m = gaussian_complex(5, 1, rng);
      const CMat X = h * m.adjoint();
      CMat Z;
      if (k % 2 == 0) {
        Z = sample_descent_cone(X, 1, seed + 7919 * static_cast<std::uint64_t>(k)).front().Z * X.norm();
      } else {
        Z = gaussian_complex(6, 5, rng);
      }
      const double bound = max_descent_step_bound<cplx>(X, Z);
      const double base = nuclear_norm<cplx>(X);
      const double zn = Z.norm();
      for (int g = 1; g <= 60; ++g) {
        const double t = 3.0 * X.norm() / zn * static_cast<double>(g) / 60.0;
        if (nuclear_norm<cplx>(CMat(X + t * Z)) <= base) {
          ++descents;
          if (t * zn > bound + 1e-9 * std::max(1.0, X.norm())) ++bad;
        }
      }
    }
    add({{"name", "max_descent"}, {"pass", bad == 0 && descents > 0}, {"pairs", S}, {"descent_points", descents},
         {"violations", bad}, {"seed", seed}});
  }
  // Subdifferential / descent-cone duality and epsilon-grid descent.
  {
    const auto ts = tangent_space<cplx>(X0);
    Index bad_dual = 0, bad_descent = 0;
    for (Index k = 0; k < S; ++k) {
      Rng rng = make_rng(seed, 4000 + static_cast<std::uint64_t>(k));
      CMat G = project_Tperp(ts, CMat(gaussian_complex(X0.rows(), X0.cols(), rng)));
      G /= std::max(1e-300, spectral_norm<cplx>(G));
      const CMat W = ts.UV + uniform01(rng) * G;
      const CMat& Z = cone[static_cast<size_t>(k)].Z;
      if (std::real(frob_inner<cplx>(W, Z)) > 1e-9) ++bad_dual;
      if (cone[static_cast<size_t>(k)].margin > 0) {
        bool found = false;
        for (int e = 1; e <= 8 && !found; ++e) {
          const double eps = std::pow(10.0, -e) * X0.norm() / Z.norm();
          found = nuclear_norm<cplx>(CMat(X0 + eps * Z)) <= nuclear_norm<cplx>(X0) + 1e-9;
        }
        if (!found) ++bad_descent;
      }
    }
    add({{"name", "subdifferential_duality"}, {"pass", bad_dual == 0}, {"samples", S}, {"violations", bad_dual}, {"seed", seed}});
    add({{"name", "epsilon_grid_descent"}, {"pass", bad_descent == 0}, {"samples", S}, {"violations", bad_descent}, {"seed", seed}});
  }
  // Paley-Zygmund at the boundary.
  {
    Rng rng = make_rng(seed, 5000);
    const CVec b = gaussian_complex(6, 1, rng);
    const CMat X = gaussian_complex(6, 5, rng);
    const double xi = (X.adjoint() * b).norm() / 4.0;
    json j = to_json(paley_zygmund_check(b, X, xi, cfg.pz_trials, seed));
    add(j);
  }
  add(to_json(projection_concentration_check(100, 10, cfg.projection_trials, 0.5, seed)));
  // Gaussian width of {+-e1 e1^*} against 1/sqrt(pi).
  {
    CMat E1 = CMat::Zero(3, 3);
    E1(0, 0) = 1.0;
    auto r = gaussian_width_sample({E1, CMat(-E1)}, cfg.width_trials, seed);
    const double expect = 1.0 / std::sqrt(M_PI);
    r.name = "gaussian_width_e11";
    r.target = expect;
    r.pass = std::abs(r.estimate - expect) <= 3.0 * r.stderr_;
    add(to_json(r));
  }
  // Sampled width of a descent-cone slice at K = N = 8, reference 2 sqrt(K+N).
  {
    const auto inst8 = make_deconv_instance(spectral_tetris(24, 8), 8, seed, SignalKind::kFlat);
    std::vector<CMat> E;
    for (const auto& cs : sample_descent_cone(inst8.X0(), S, seed + 1)) E.push_back(cs.Z);
    auto r = gaussian_width_sample(E, cfg.width_trials / 4, seed);
    r.name = "gaussian_width_cone_sample";
    r.target = 2.0 * std::sqrt(16.0);
    r.pass = r.estimate <= r.target;
    add(to_json(r));
  }
  // Small-ball Markov sanity and the large-entries diagnostic.
  {
    Index bad = 0;
    double sum_count = 0, sum_pred = 0;
    const Index seeds = 50;
    for (Index k = 0; k < seeds; ++k) {
      const auto ik = make_deconv_instance(F, N, seed + 100 + static_cast<std::uint64_t>(k), SignalKind::kFlat);
      const auto cs = sample_descent_cone(ik.X0(), 1, seed + 200 + static_cast<std::uint64_t>(k)).front();
      const double L = static_cast<double>(F.L());
      const double logeL = std::log(M_E * L);
      const double xi = b1_norm(F, cs.Z) / (L * logeL) / 2.0;
      const Index cnt = small_ball_count(ik, cs.Z, xi);
      const double absum = deconv_forward(ik, cs.Z).cwiseAbs().sum();
      if (static_cast<double>(cnt) * xi > absum + 1e-12) ++bad;
      sum_count += static_cast<double>(cnt);
      sum_pred += 9.0 / 32.0 * static_cast<double>(large_entries_count(F, cs.Z));
    }
    add({{"name", "small_ball_markov"}, {"pass", bad == 0}, {"seeds", seeds}, {"violations", bad}, {"seed", seed}});
    const double mc = sum_count / static_cast<double>(seeds), mp = sum_pred / static_cast<double>(seeds);
    add({{"name", "small_ball_vs_large_entries"}, {"pass", mc >= mp}, {"seeds", seeds}, {"mean_count", mc},
         {"mean_pz_weighted_large_entries", mp}, {"seed", seed}});
  }
  report["checks"] = checks;
  report["pass"] = all;
  return report;
}

}  // namespace lrgeom
