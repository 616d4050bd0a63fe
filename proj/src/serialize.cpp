#include "lrgeom/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrgeom/error.hpp"

namespace lrgeom {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in '" + path + "': " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing header field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad header field '") + key + "': " + e.what());
  }
}

void write_cvec(std::ostream& os, const CVec& v) { write_matrix_bin<cplx>(os, CMat(v)); }
CVec read_cvec(std::istream& is, Index n) { return read_matrix_bin<cplx>(is, n, 1).col(0); }

}  // namespace

template <class S>
void write_matrix_bin(std::ostream& os, const Mat<S>& M) {
  os.write(reinterpret_cast<const char*>(M.data()), static_cast<std::streamsize>(M.size() * sizeof(S)));
  if (!os) throw IoError("binary write failed");
}

template <class S>
Mat<S> read_matrix_bin(std::istream& is, Index rows, Index cols) {
  Mat<S> M(rows, cols);
  is.read(reinterpret_cast<char*>(M.data()), static_cast<std::streamsize>(M.size() * sizeof(S)));
  if (!is) throw IoError("binary payload truncated");
  return M;
}

template void write_matrix_bin<double>(std::ostream&, const Mat<double>&);
template void write_matrix_bin<cplx>(std::ostream&, const Mat<cplx>&);
template Mat<double> read_matrix_bin<double>(std::istream&, Index, Index);
template Mat<cplx> read_matrix_bin<cplx>(std::istream&, Index, Index);

std::string content_hash(const std::vector<const CMat*>& cm, const std::vector<const RMat*>& rm) {
  std::uint64_t h = 1469598103934665603ULL;
  auto eat = [&](const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const CMat* M : cm) eat(M->data(), static_cast<size_t>(M->size()) * sizeof(cplx));
  for (const RMat* M : rm) eat(M->data(), static_cast<size_t>(M->size()) * sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json frame_header(const FrameMatrix& F) {
  return json{{"L", F.L()}, {"K", F.K()}, {"kind", F.kind}, {"seed", F.seed}};
}

FrameMatrix frame_from_header(const json& j) {
  const auto kind = field<std::string>(j, "kind");
  const auto L = field<Index>(j, "L");
  const auto K = field<Index>(j, "K");
  if (kind == "tetris") return spectral_tetris(L, K);
  if (kind == "repeated") return repeated_basis(L, K);
  if (kind == "haar") return haar_frame(L, K, j.value("seed", std::uint64_t{0}));
  throw ConfigError("frame kind '" + kind + "' cannot be regenerated from a header");
}

void save_frame(const FrameMatrix& F, const std::string& stem) {
  write_text_file(stem + ".json", frame_header(F).dump(2) + "\n");
  auto os = open_out(stem + ".bin", std::ios::binary);
  write_matrix_bin<cplx>(os, F.B);
}

FrameMatrix load_frame(const std::string& stem) {
  const json j = read_json(stem + ".json");
  auto is = open_in(stem + ".bin", std::ios::binary);
  FrameMatrix F;
  F.B = read_matrix_bin<cplx>(is, field<Index>(j, "L"), field<Index>(j, "K"));
  F.kind = field<std::string>(j, "kind");
  F.seed = j.value("seed", std::uint64_t{0});
  return F;
}

json deconv_header(const DeconvInstance& inst) {
  return json{{"problem", "deconv"}, {"L", inst.L()}, {"K", inst.K()}, {"N", inst.N()},
              {"seed", inst.seed}, {"tau", inst.tau}, {"signal", to_string(inst.signal)},
              {"frame", frame_header(inst.frame)}};
}

DeconvInstance deconv_from_header(const json& j) {
  FrameMatrix F = frame_from_header(field<json>(j, "frame"));
  if (F.L() != field<Index>(j, "L") || F.K() != field<Index>(j, "K"))
    throw ConfigError("instance header dimensions disagree with its frame");
  return make_deconv_instance(std::move(F), field<Index>(j, "N"), field<std::uint64_t>(j, "seed"),
                              signal_kind_from_string(j.value("signal", std::string("gaussian"))));
}

void save_deconv_instance(const DeconvInstance& inst, const std::string& stem) {
  write_text_file(stem + ".json", deconv_header(inst).dump(2) + "\n");
  auto os = open_out(stem + ".bin", std::ios::binary);
  write_matrix_bin<cplx>(os, inst.frame.B);
  write_matrix_bin<cplx>(os, inst.c_rows);
  write_cvec(os, inst.h0);
  write_cvec(os, inst.m0);
  write_cvec(os, inst.e);
}

DeconvInstance load_deconv_instance(const std::string& stem) {
  const json j = read_json(stem + ".json");
  const Index L = field<Index>(j, "L"), K = field<Index>(j, "K"), N = field<Index>(j, "N");
  auto is = open_in(stem + ".bin", std::ios::binary);
  DeconvInstance inst;
  const json fh = field<json>(j, "frame");
  inst.frame.B = read_matrix_bin<cplx>(is, L, K);
  inst.frame.kind = field<std::string>(fh, "kind");
  inst.frame.seed = fh.value("seed", std::uint64_t{0});
  inst.c_rows = read_matrix_bin<cplx>(is, L, N);
  inst.h0 = read_cvec(is, K);
  inst.m0 = read_cvec(is, N);
  inst.e = read_cvec(is, L);
  inst.tau = field<double>(j, "tau");
  inst.seed = field<std::uint64_t>(j, "seed");
  inst.signal = signal_kind_from_string(j.value("signal", std::string("gaussian")));
  return inst;
}

json completion_header(const CompletionInstance& inst) {
  return json{{"problem", "completion"}, {"n1", inst.n1}, {"n2", inst.n2}, {"r", inst.r},
              {"m", inst.m}, {"seed", inst.seed}, {"tau", inst.tau}};
}

CompletionInstance completion_from_header(const json& j) {
  return make_completion_instance(field<Index>(j, "n1"), field<Index>(j, "n2"), field<Index>(j, "r"),
                                  field<Index>(j, "m"), field<std::uint64_t>(j, "seed"));
}

void save_completion_instance(const CompletionInstance& inst, const std::string& stem) {
  write_text_file(stem + ".json", completion_header(inst).dump(2) + "\n");
  auto os = open_out(stem + ".bin", std::ios::binary);
  write_matrix_bin<double>(os, inst.factors.U);
  write_matrix_bin<double>(os, inst.factors.V);
  write_matrix_bin<double>(os, RMat(inst.factors.sigma));
  RMat pat(2, inst.m);
  for (Index i = 0; i < inst.m; ++i) {
    pat(0, i) = static_cast<double>(inst.pattern[static_cast<size_t>(i)].first);
    pat(1, i) = static_cast<double>(inst.pattern[static_cast<size_t>(i)].second);
  }
  write_matrix_bin<double>(os, pat);
  write_matrix_bin<double>(os, RMat(inst.e));
}

CompletionInstance load_completion_instance(const std::string& stem) {
  const json j = read_json(stem + ".json");
  CompletionInstance inst;
  inst.n1 = field<Index>(j, "n1");
  inst.n2 = field<Index>(j, "n2");
  inst.r = field<Index>(j, "r");
  inst.m = field<Index>(j, "m");
  inst.seed = field<std::uint64_t>(j, "seed");
  inst.tau = field<double>(j, "tau");
  auto is = open_in(stem + ".bin", std::ios::binary);
  inst.factors.U = read_matrix_bin<double>(is, inst.n1, inst.r);
  inst.factors.V = read_matrix_bin<double>(is, inst.n2, inst.r);
  inst.factors.sigma = read_matrix_bin<double>(is, inst.r, 1).col(0);
  const RMat pat = read_matrix_bin<double>(is, 2, inst.m);
  for (Index i = 0; i < inst.m; ++i)
    inst.pattern.emplace_back(static_cast<Index>(pat(0, i)), static_cast<Index>(pat(1, i)));
  inst.e = read_matrix_bin<double>(is, inst.m, 1).col(0);
  inst.X0 = inst.factors.U * inst.factors.sigma.asDiagonal() * inst.factors.V.transpose();
  return inst;
}

json to_json(const DeconvCertificate& c) {
  return json{{"block_index", c.block_index},
              {"coordinate", c.coordinate},
              {"par_norms_sq", c.par_norms_sq},
              {"m_par_norm", c.m_par.norm()},
              {"m_perp_norm", c.m_perp.norm()},
              {"beta", c.beta},
              {"ratio", c.ratio},
              {"ratio_bound", c.ratio_bound},
              {"ratio_within_bound", c.ratio_within_bound},
              {"tau0", c.tau0},
              {"scale", c.scale},
              {"eps_star", c.eps_star},
              {"event1", c.event1},
              {"event2", c.event2},
              {"AX0_norm", c.AX0_norm},
              {"AW_norm", c.AW_norm},
              {"W_frob", c.W_frob},
              {"Z_frob", c.Z_frob},
              {"cone_margin", c.cone_margin},
              {"alignment", c.alignment},
              {"alignment_predicted", c.alignment_predicted},
              {"tperp_nuclear_W", c.tperp_nuclear_W},
              {"mu_h0", c.mu_h0},
              {"alignment_bound", c.alignment_bound},
              {"alignment_bound_simple", c.alignment_bound_simple},
              {"content_hash", content_hash({&c.W, &c.Z})}};
}

json to_json(const CompletionCertificate& c) {
  return json{{"row_index", c.row_index},
              {"beta", c.beta},
              {"ratio", c.ratio},
              {"ratio_bound", c.ratio_bound},
              {"ratio_within_bound", c.ratio_within_bound},
              {"proj_norm", c.proj_norm},
              {"proj_threshold", c.proj_threshold},
              {"tau0", c.tau0},
              {"scale", c.scale},
              {"eps_star", c.eps_star},
              {"event1", c.event1},
              {"event2", c.event2},
              {"AUV_sq", c.AUV_sq},
              {"AW_norm", c.AW_norm},
              {"Z_frob", c.Z_frob},
              {"w_a_norm", c.w_a.norm()},
              {"tperp_nuclear_Z", c.tperp_nuclear_Z},
              {"cone_margin", c.cone_margin},
              {"alignment", c.alignment},
              {"content_hash", content_hash({}, {&c.W, &c.Z})}};
}

json to_json(const NoiseReport& r) {
  return json{{"t", r.t},
              {"tau0", r.tau0},
              {"eps_star", r.eps_star},
              {"residual", r.residual},
              {"nuclear_tilde", r.nuclear_tilde},
              {"nuclear_X0", r.nuclear_X0},
              {"distance", r.distance},
              {"distance_bound", r.distance_bound},
              {"collinear_lower", r.collinear_lower}};
}

json to_json(const MonteCarloReport& r) {
  json j{{"name", r.name},     {"trials", r.trials}, {"estimate", r.estimate}, {"target", r.target},
         {"stderr", r.stderr_}, {"pass", r.pass},     {"seed", r.seed}};
  if (!r.note.empty()) j["note"] = r.note;
  for (const auto& [k, v] : r.extras) j[k] = v;
  return j;
}

void save_deconv_certificate(const DeconvCertificate& c, const std::string& stem) {
  write_text_file(stem + ".json", to_json(c).dump(2) + "\n");
  auto os = open_out(stem + ".bin", std::ios::binary);
  write_matrix_bin<cplx>(os, c.W);
  write_matrix_bin<cplx>(os, c.Z);
}

std::string read_text_file(const std::string& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace lrgeom
