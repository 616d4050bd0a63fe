#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "lrgeom/adversarial.hpp"
#include "lrgeom/frames.hpp"
#include "lrgeom/measurement.hpp"
#include "lrgeom/smallball.hpp"

namespace lrgeom {

using json = nlohmann::json;

/// Raw column-major doubles (complex entries as interleaved re, im).
template <class S>
void write_matrix_bin(std::ostream& os, const Mat<S>& M);
template <class S>
Mat<S> read_matrix_bin(std::istream& is, Index rows, Index cols);

/// FNV-1a over the raw bytes of the matrices, hex encoded.
std::string content_hash(const std::vector<const CMat*>& cm, const std::vector<const RMat*>& rm = {});

/// <stem>.json header {L, K, kind, seed} plus <stem>.bin payload.
void save_frame(const FrameMatrix& F, const std::string& stem);
FrameMatrix load_frame(const std::string& stem);

/// Rebuilds a frame from its header alone (tetris, repeated, haar).
FrameMatrix frame_from_header(const json& header);
json frame_header(const FrameMatrix& F);

json deconv_header(const DeconvInstance& inst);
void save_deconv_instance(const DeconvInstance& inst, const std::string& stem);
DeconvInstance load_deconv_instance(const std::string& stem);
/// Regenerates c_l, h0, m0 from the header (noise is zero).
DeconvInstance deconv_from_header(const json& header);

json completion_header(const CompletionInstance& inst);
void save_completion_instance(const CompletionInstance& inst, const std::string& stem);
CompletionInstance load_completion_instance(const std::string& stem);
CompletionInstance completion_from_header(const json& header);

json to_json(const DeconvCertificate& c);
json to_json(const CompletionCertificate& c);
json to_json(const NoiseReport& r);
json to_json(const MonteCarloReport& r);

void save_deconv_certificate(const DeconvCertificate& c, const std::string& stem);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lrgeom
