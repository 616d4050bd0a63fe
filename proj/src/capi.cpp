#include "lrgeom/lrgeom.h"

#include <cstring>
#include <string>

#include "lrgeom/adversarial.hpp"
#include "lrgeom/error.hpp"
#include "lrgeom/frames.hpp"
#include "lrgeom/harness.hpp"
#include "lrgeom/measurement.hpp"
#include "lrgeom/random.hpp"
#include "lrgeom/serialize.hpp"
#include "lrgeom/solver.hpp"

struct lrg_frame {
  lrgeom::FrameMatrix f;
};
struct lrg_deconv {
  lrgeom::DeconvInstance inst;
};
struct lrg_completion {
  lrgeom::CompletionInstance inst;
};

namespace {

using namespace lrgeom;

thread_local std::string g_last_error;

lrg_status fail(lrg_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class F>
lrg_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return LRG_OK;
  } catch (const Error& e) {
    return fail(static_cast<lrg_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LRG_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LRG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LRG_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* name) {
  if (!p) throw ArgumentError(std::string(name) + " must not be NULL");
}

SolverConfig solver_from_json(const char* text) {
  SolverConfig cfg;
  if (!text || !*text) return cfg;
  json wrapper{{"solver", json::parse(text)}};
  return config_from_json(wrapper).solver;
}

template <class S>
json solve_report(const SolverResult<S>& r, const Mat<S>& X0, double tau) {
  const double err = (r.X_hat - X0).norm();
  return json{{"tau", tau},
              {"objective", r.objective},
              {"nuclear_X0", nuclear_norm<S>(X0)},
              {"err", err},
              {"err_rel", err / X0.norm()},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"feasibility_residual", r.feasibility_residual},
              {"primal_step", r.primal_step},
              {"dual_step", r.dual_step},
              {"op_norm", r.op_norm}};
}

std::string trace_csv(const std::vector<TraceRow>& tr) {
  std::string out = "iter,objective,feasibility_residual,rel_change,averaged_residual\n";
  char buf[256];
  for (const auto& r : tr) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g\n", r.iter, r.objective, r.feasibility_residual,
                  r.rel_change, r.averaged_residual);
    out += buf;
  }
  return out;
}

template <class S>
Vec<S> noise_dir(const std::string& kind, const Vec<S>& cert_dir, Index m, std::uint64_t seed) {
  if (kind == "none") return Vec<S>::Zero(m);
  if (kind == "certificate") return cert_dir / cert_dir.norm();
  if (kind == "random") {
    Rng rng = make_rng(seed, 0x4e4f495345ULL);
    Vec<S> g = gaussian<S>(m, 1, rng);
    return g / g.norm();
  }
  throw ArgumentError("noise must be none, random or certificate");
}

}  // namespace

extern "C" {

const char* lrg_last_error(void) { return g_last_error.c_str(); }
const char* lrg_build_id(void) { return build_id(); }
void lrg_string_free(char* s) { std::free(s); }

lrg_status lrg_frame_create(const char* kind, int64_t L, int64_t K, uint64_t seed, lrg_frame** out) {
  return guard([&] {
    need(kind, "kind");
    need(out, "out");
    const std::string k = kind;
    json h{{"kind", k}, {"L", L}, {"K", K}, {"seed", seed}};
    *out = new lrg_frame{frame_from_header(h)};
  });
}

lrg_status lrg_frame_load(const char* stem, lrg_frame** out) {
  return guard([&] {
    need(stem, "stem");
    need(out, "out");
    *out = new lrg_frame{load_frame(stem)};
  });
}

lrg_status lrg_frame_save(const lrg_frame* f, const char* stem) {
  return guard([&] {
    need(f, "frame");
    need(stem, "stem");
    save_frame(f->f, stem);
  });
}

lrg_status lrg_frame_dims(const lrg_frame* f, int64_t* L, int64_t* K) {
  return guard([&] {
    need(f, "frame");
    if (L) *L = f->f.L();
    if (K) *K = f->f.K();
  });
}

lrg_status lrg_frame_copy(const lrg_frame* f, double* out, size_t len) {
  return guard([&] {
    need(f, "frame");
    need(out, "out");
    const size_t n = 2 * static_cast<size_t>(f->f.B.size());
    if (len < n) throw DimensionError("lrg_frame_copy: buffer too small");
    std::memcpy(out, f->f.B.data(), n * sizeof(double));
  });
}

lrg_status lrg_frame_info_json(const lrg_frame* f, char** out_json) {
  return guard([&] {
    need(f, "frame");
    need(out_json, "out_json");
    const auto chk = check_frame(f->f);
    json j = frame_header(f->f);
    j["mu_max"] = coherence_mu_max(f->f);
    j["isometry_err"] = chk.isometry_err;
    j["row_norm_spread"] = chk.row_norm_spread;
    j["two_sparse_adjacent"] = chk.two_sparse_adjacent;
    if (f->f.kind == "tetris") {
      std::vector<Index> sizes;
      for (const auto& b : blocks(f->f).blocks) sizes.push_back(static_cast<Index>(b.size()));
      j["block_sizes"] = sizes;
    }
    *out_json = dup(j.dump(2));
  });
}

void lrg_frame_free(lrg_frame* f) { delete f; }

lrg_status lrg_deconv_create(const lrg_frame* f, int64_t N, uint64_t seed, const char* signal, lrg_deconv** out) {
  return guard([&] {
    need(f, "frame");
    need(out, "out");
    const SignalKind s = signal ? signal_kind_from_string(signal) : SignalKind::kGaussian;
    *out = new lrg_deconv{make_deconv_instance(f->f, N, seed, s)};
  });
}

lrg_status lrg_deconv_load(const char* stem, lrg_deconv** out) {
  return guard([&] {
    need(stem, "stem");
    need(out, "out");
    *out = new lrg_deconv{load_deconv_instance(stem)};
  });
}

lrg_status lrg_deconv_save(const lrg_deconv* d, const char* stem) {
  return guard([&] {
    need(d, "instance");
    need(stem, "stem");
    save_deconv_instance(d->inst, stem);
  });
}

lrg_status lrg_deconv_fft_consistency(const lrg_deconv* d, double* out) {
  return guard([&] {
    need(d, "instance");
    need(out, "out");
    *out = fft_consistency(d->inst);
  });
}

lrg_status lrg_deconv_certificate_json(const lrg_deconv* d, const double* ts, size_t nt, char** out_json) {
  return guard([&] {
    need(d, "instance");
    need(out_json, "out_json");
    if (nt && !ts) throw ArgumentError("ts must not be NULL when nt > 0");
    json j{{"instance", deconv_header(d->inst)}};
    try {
      const auto c = deconv_certificate(d->inst);
      j["certificate"] = to_json(c);
      json noise = json::array();
      for (size_t i = 0; i < nt; ++i) noise.push_back(to_json(adversarial_noise(c, d->inst, ts[i]).report));
      j["noise"] = noise;
    } catch (const AdmissibilityError& e) {
      // report the failed event as data alongside the status
      j["admissibility_failure"] = {{"par_norms_sq", e.par_norms_sq()}, {"message", e.what()}};
      *out_json = dup(j.dump(2));
      throw;
    }
    *out_json = dup(j.dump(2));
  });
}

void lrg_deconv_free(lrg_deconv* d) { delete d; }

lrg_status lrg_completion_create(int64_t n1, int64_t n2, int64_t r, int64_t m, uint64_t seed, lrg_completion** out) {
  return guard([&] {
    need(out, "out");
    *out = new lrg_completion{make_completion_instance(n1, n2, r, m, seed)};
  });
}

lrg_status lrg_completion_save(const lrg_completion* c, const char* stem) {
  return guard([&] {
    need(c, "instance");
    need(stem, "stem");
    save_completion_instance(c->inst, stem);
  });
}

lrg_status lrg_completion_certificate_json(const lrg_completion* c, const double* ts, size_t nt, char** out_json) {
  return guard([&] {
    need(c, "instance");
    need(out_json, "out_json");
    if (nt && !ts) throw ArgumentError("ts must not be NULL when nt > 0");
    const auto cert = mc_certificate(c->inst);
    json j{{"instance", completion_header(c->inst)}, {"certificate", to_json(cert)}};
    json noise = json::array();
    if (cert.event1 && cert.event2)
      for (size_t i = 0; i < nt; ++i) noise.push_back(to_json(adversarial_noise(cert, c->inst, ts[i]).report));
    j["noise"] = noise;
    *out_json = dup(j.dump(2));
  });
}

void lrg_completion_free(lrg_completion* c) { delete c; }

lrg_status lrg_deconv_solve_json(const lrg_deconv* d, double tau, const char* noise, const char* solver_json,
                                 char** out_json, char** trace) {
  return guard([&] {
    need(d, "instance");
    need(out_json, "out_json");
    const std::string kind = noise ? noise : "none";
    const auto& inst = d->inst;
    CVec cert_dir;
    std::string source;
    if (kind == "certificate") {
      try {
        cert_dir = deconv_forward(inst, deconv_certificate(inst).Z);
        source = "certificate";
      } catch (const Error&) {
        cert_dir = tangent_min_direction(inst).AW;
        source = "tangent_fallback";
      }
    }
    const CVec e = tau * noise_dir<cplx>(kind, cert_dir, inst.L(), inst.seed);
    const CMat X0 = inst.X0();
    const CVec y = deconv_forward(inst, X0) + e;
    SolverConfig cfg = solver_from_json(solver_json);
    if (trace && cfg.log_every == 0) cfg.log_every = 100;
    const auto r = solve<cplx>(deconv_operator(inst), y, tau, cfg);
    json j = solve_report(r, X0, tau);
    j["noise"] = kind;
    if (!source.empty()) j["noise_source"] = source;
    *out_json = dup(j.dump(2));
    if (trace) *trace = dup(trace_csv(r.trace));
  });
}

lrg_status lrg_completion_solve_json(const lrg_completion* c, double tau, const char* noise, const char* solver_json,
                                     char** out_json, char** trace) {
  return guard([&] {
    need(c, "instance");
    need(out_json, "out_json");
    const std::string kind = noise ? noise : "none";
    const auto& inst = c->inst;
    RVec cert_dir;
    if (kind == "certificate") cert_dir = mc_forward(inst, mc_certificate(inst).Z);
    const RVec e = tau * noise_dir<double>(kind, cert_dir, inst.m, inst.seed);
    const RVec y = mc_forward(inst, inst.X0) + e;
    SolverConfig cfg = solver_from_json(solver_json);
    if (trace && cfg.log_every == 0) cfg.log_every = 100;
    const auto r = solve<double>(mc_operator(inst), y, tau, cfg);
    json j = solve_report(r, inst.X0, tau);
    j["noise"] = kind;
    *out_json = dup(j.dump(2));
    if (trace) *trace = dup(trace_csv(r.trace));
  });
}

lrg_status lrg_default_config(const char* experiment, char** out_json) {
  return guard([&] {
    need(experiment, "experiment");
    need(out_json, "out_json");
    *out_json = dup(config_to_json(default_config(experiment)).dump(2));
  });
}

lrg_status lrg_run_experiment(const char* config_json, char** summary_json, char** csv) {
  return guard([&] {
    need(config_json, "config_json");
    need(summary_json, "summary_json");
    need(csv, "csv");
    const ExperimentConfig cfg = config_from_json(json::parse(config_json));
    ExperimentOutput out;
    if (cfg.experiment == "scaling")
      out = run_scaling_sweep(cfg);
    else if (cfg.experiment == "instability")
      out = run_instability(cfg);
    else if (cfg.experiment == "stability")
      out = run_stability_sweep(cfg);
    else
      throw ConfigError("experiment '" + cfg.experiment + "' does not produce a table");
    *summary_json = dup(out.summary.dump(2));
    *csv = dup(out.table.to_csv());
  });
}

lrg_status lrg_run_checks(const char* config_json, char** report_json) {
  return guard([&] {
    need(report_json, "report_json");
    json j = config_json && *config_json ? json::parse(config_json) : json::object();
    j["experiment"] = "checks";
    *report_json = dup(run_checks(config_from_json(j)).dump(2));
  });
}

}  // extern "C"
