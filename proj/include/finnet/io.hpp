#pragma once

#include "finnet/classical.hpp"
#include "finnet/fair_sampling.hpp"
#include "finnet/finner.hpp"
#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/rgb4.hpp"
#include "finnet/spdc.hpp"
#include "finnet/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace finnet::io {

using json = nlohmann::ordered_json;

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Header embedded in every emitted file: tool name, version, seed, and a hash
// of the run configuration.
struct FileHeader {
  std::string tool = "finnet";
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::string config_hash;  // fnv1a_hex of the canonical config string
};

std::uint64_t fnv1a(const std::string& text);
std::string fnv1a_hex(const std::string& text);

json to_json(const FileHeader& header);

// --- structure serialization -------------------------------------------------

// {"sources": [[j, j'], ...], "n_parties": M, "labels": {...}?}
json to_json(const NetworkGraph& graph);
NetworkGraph network_from_json(const json& j);

// {"network": {...}, "states": [{"dims": [dl, dr], "amplitudes": [re, im, ...]}],
//  "povms": [{"labels": [...], "failure_index": k, "elements": [[re, im, ...], ...]}]}
// Matrices are row-major interleaved real/imag.
json to_json(const QuantumNetworkModel& model);
QuantumNetworkModel model_from_json(const json& j);

json to_json(const OutcomeDistribution& dist);
// Accepts a bare distribution object or a whole output file that nests it
// under a "distribution" key.
OutcomeDistribution distribution_from_json(const json& j);

// --- report serialization ----------------------------------------------------

json to_json(const ValidationReport& report);
json to_json(const FinnerReport& report);
json to_json(const RigidityVerdict& verdict);
json to_json(const GOracleReport& report);
json to_json(const PostselectResult& result);  // without the filtered model
json to_json(const OptimizeResult& result, const OptimizeOptions& options);
json to_json(const RandomnessBoundReport& report);

// --- files -------------------------------------------------------------------

json load_json_file(const std::string& path);             // throws io_error
std::string read_text_file(const std::string& path);      // throws io_error
void write_text_file(const std::string& path, const std::string& text);

// Wraps the body as {"header": ..., <body fields>} and writes pretty-printed
// JSON with a trailing newline.
void write_json_file(const std::string& path, const FileHeader& header, json body);

// CSV with "# key = value" comment lines for the header, then one header row
// and data rows. Floating point cells are shortest-round-trip formatted.
class CsvWriter {
 public:
  explicit CsvWriter(const FileHeader& header);
  void comment(const std::string& line);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }
  void save(const std::string& path) const;

 private:
  std::string text_;
};

std::string format_double(double value);  // shortest round-trip decimal

// Distribution as CSV: one row per nonzero-alphabet tuple, label columns then
// probability.
std::string distribution_csv(const OutcomeDistribution& dist, const FileHeader& header);

}  // namespace finnet::io
