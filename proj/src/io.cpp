#include "finnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace finnet::io {

namespace {

json matrix_to_interleaved(const Matrix& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      arr.push_back(m(r, c).real());
      arr.push_back(m(r, c).imag());
    }
  return arr;
}

json vector_to_interleaved(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i].real());
    arr.push_back(v[i].imag());
  }
  return arr;
}

json real_vector_to_json(const RealVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_interleaved(const json& arr, long expected, const std::string& what) {
  if (!arr.is_array() || static_cast<long>(arr.size()) != 2 * expected)
    throw io_error(what + ": expected " + std::to_string(2 * expected) +
                   " interleaved components, got " + std::to_string(arr.size()));
  Vector v(expected);
  for (long i = 0; i < expected; ++i)
    v[i] = Complex(arr[2 * i].get<double>(), arr[2 * i + 1].get<double>());
  return v;
}

Matrix square_matrix_from_interleaved(const json& arr, const std::string& what) {
  if (!arr.is_array() || arr.size() % 2 != 0)
    throw io_error(what + ": interleaved array must have even length");
  const long entries = static_cast<long>(arr.size()) / 2;
  const long dim = std::lround(std::sqrt(static_cast<double>(entries)));
  if (dim * dim != entries)
    throw io_error(what + ": " + std::to_string(entries) +
                   " entries do not form a square matrix");
  Matrix m(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c) {
      const long k = 2 * (r * dim + c);
      m(r, c) = Complex(arr[k].get<double>(), arr[k + 1].get<double>());
    }
  return m;
}

const json& require(const json& j, const char* key, const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) throw io_error(what + ": missing key \"" + key + "\"");
  return *it;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string fnv1a_hex(const std::string& text) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(text);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

json to_json(const FileHeader& header) {
  json j;
  j["tool"] = header.tool;
  j["version"] = header.version;
  j["seed"] = header.seed;
  j["config_hash"] = header.config_hash;
  return j;
}

json to_json(const NetworkGraph& graph) {
  json j;
  json sources = json::array();
  for (int i = 0; i < graph.n_sources(); ++i) sources.push_back(graph.parties_of_source(i));
  j["sources"] = std::move(sources);
  j["n_parties"] = graph.n_parties();
  if (!graph.party_labels.empty() || !graph.source_labels.empty()) {
    json labels;
    if (!graph.party_labels.empty()) labels["parties"] = graph.party_labels;
    if (!graph.source_labels.empty()) labels["sources"] = graph.source_labels;
    j["labels"] = std::move(labels);
  }
  return j;
}

NetworkGraph network_from_json(const json& j) {
  const json& sources_j = require(j, "sources", "network");
  if (!sources_j.is_array() || sources_j.empty())
    throw io_error("network: \"sources\" must be a nonempty array");
  std::vector<std::vector<int>> sources;
  for (const json& row : sources_j) {
    if (!row.is_array()) throw io_error("network: each source must be a party array");
    sources.push_back(row.get<std::vector<int>>());
  }
  const int n_parties = require(j, "n_parties", "network").get<int>();
  for (const auto& row : sources)
    for (int p : row)
      if (p < 0 || p >= n_parties)
        throw io_error("network: party index " + std::to_string(p) + " out of range");
  NetworkGraph graph(sources, n_parties);
  if (j.contains("labels")) {
    const json& labels = j["labels"];
    if (labels.contains("parties"))
      graph.party_labels = labels["parties"].get<std::vector<std::string>>();
    if (labels.contains("sources"))
      graph.source_labels = labels["sources"].get<std::vector<std::string>>();
  }
  return graph;
}

json to_json(const QuantumNetworkModel& model) {
  json j;
  j["network"] = to_json(model.graph);
  json states = json::array();
  for (const SourceState& s : model.states) {
    json sj;
    sj["dims"] = json::array({s.dim_left(), s.dim_right()});
    sj["amplitudes"] = vector_to_interleaved(s.amplitudes());
    states.push_back(std::move(sj));
  }
  j["states"] = std::move(states);
  json povms = json::array();
  for (const PartyPOVM& p : model.povms) {
    json pj;
    pj["labels"] = p.outcome_labels;
    pj["failure_index"] = p.failure_index;
    json elements = json::array();
    for (const Matrix& e : p.elements) elements.push_back(matrix_to_interleaved(e));
    pj["elements"] = std::move(elements);
    povms.push_back(std::move(pj));
  }
  j["povms"] = std::move(povms);
  return j;
}

QuantumNetworkModel model_from_json(const json& j) {
  QuantumNetworkModel model;
  model.graph = network_from_json(require(j, "network", "model"));
  const json& states_j = require(j, "states", "model");
  for (std::size_t i = 0; i < states_j.size(); ++i) {
    const json& sj = states_j[i];
    const std::string what = "model: state " + std::to_string(i);
    const json& dims = require(sj, "dims", what);
    if (!dims.is_array() || dims.size() != 2)
      throw io_error(what + ": \"dims\" must be [dim_left, dim_right]");
    const int dl = dims[0].get<int>(), dr = dims[1].get<int>();
    if (dl < 1 || dr < 1) throw io_error(what + ": dimensions must be positive");
    Vector amps = vector_from_interleaved(require(sj, "amplitudes", what),
                                          static_cast<long>(dl) * dr, what);
    model.states.emplace_back(dl, dr, std::move(amps));
  }
  const json& povms_j = require(j, "povms", "model");
  for (std::size_t i = 0; i < povms_j.size(); ++i) {
    const json& pj = povms_j[i];
    const std::string what = "model: povm " + std::to_string(i);
    PartyPOVM povm;
    povm.outcome_labels = require(pj, "labels", what).get<std::vector<std::string>>();
    if (pj.contains("failure_index")) povm.failure_index = pj["failure_index"].get<int>();
    for (const json& ej : require(pj, "elements", what))
      povm.elements.push_back(square_matrix_from_interleaved(ej, what));
    if (povm.outcome_labels.size() != povm.elements.size())
      throw io_error(what + ": labels and elements disagree in count");
    model.povms.push_back(std::move(povm));
  }
  return model;
}

json to_json(const OutcomeDistribution& dist) {
  json j;
  json alphabets = json::array();
  for (const Alphabet& a : dist.alphabets()) {
    json aj;
    aj["labels"] = a.labels;
    aj["failure_index"] = a.failure_index;
    alphabets.push_back(std::move(aj));
  }
  j["alphabets"] = std::move(alphabets);
  j["probabilities"] = real_vector_to_json(dist.probabilities());
  return j;
}

OutcomeDistribution distribution_from_json(const json& file) {
  // accept both a bare distribution object and a full output file that wraps
  // it under "distribution"
  const json& j =
      (file.is_object() && file.contains("distribution")) ? file["distribution"] : file;
  std::vector<Alphabet> alphabets;
  for (const json& aj : require(j, "alphabets", "distribution")) {
    Alphabet a;
    a.labels = require(aj, "labels", "distribution alphabet").get<std::vector<std::string>>();
    if (aj.contains("failure_index")) a.failure_index = aj["failure_index"].get<int>();
    alphabets.push_back(std::move(a));
  }
  const auto probs = require(j, "probabilities", "distribution").get<std::vector<double>>();
  RealVector p = Eigen::Map<const RealVector>(probs.data(), static_cast<long>(probs.size()));
  return OutcomeDistribution(std::move(alphabets), std::move(p));
}

json to_json(const ValidationReport& report) {
  json j;
  j["valid"] = report.valid();
  j["bipartite"] = report.bipartite;
  j["violations"] = report.violations;
  return j;
}

json to_json(const FinnerReport& report) {
  json j;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["slack"] = report.slack;
  j["saturated"] = report.saturated;
  j["tol"] = report.tol;
  j["marginals"] = real_vector_to_json(report.marginals);
  json implied = json::array();
  for (Eigen::Index i = 0; i < report.implied_e.size(); ++i) {
    const bool defined =
        report.implied_e_defined.empty() || report.implied_e_defined[i];
    if (defined)
      implied.push_back(report.implied_e[i]);
    else
      implied.push_back(nullptr);
  }
  j["implied_e"] = std::move(implied);
  return j;
}

json to_json(const RigidityVerdict& verdict) {
  json j;
  j["rigid"] = verdict.rigid;
  j["tol"] = verdict.tol;
  json parties = json::array();
  for (const auto& p : verdict.parties) {
    json pj;
    pj["projector"] = p.projector;
    pj["commutes"] = p.commutes;
    pj["factorizes"] = p.factorizes;
    pj["projector_err"] = p.projector_err;
    pj["commute_err"] = p.commute_err;
    pj["second_singular"] = p.second_singular;
    parties.push_back(std::move(pj));
  }
  j["parties"] = std::move(parties);
  json sources = json::array();
  for (const auto& s : verdict.sources) {
    json sj;
    sj["ends_match"] = s.ends_match;
    sj["diagonal_ok"] = s.diagonal_ok;
    sj["e_consistent"] = s.e_consistent;
    sj["match_err"] = s.match_err;
    sj["diagonal_err"] = s.diagonal_err;
    sj["e_structure"] = s.e_structure;
    sj["e_distribution"] = s.e_distribution;
    sources.push_back(std::move(sj));
  }
  j["sources"] = std::move(sources);
  return j;
}

json to_json(const GOracleReport& report) {
  json j;
  j["p_all"] = report.p_all;
  j["e_prod_g"] = report.e_prod_g;
  j["e_g_sq"] = real_vector_to_json(report.e_g_sq);
  j["tr_srms"] = real_vector_to_json(report.tr_srms);
  j["tr_rho_m2"] = real_vector_to_json(report.tr_rho_m2);
  j["tr_rho_m"] = real_vector_to_json(report.tr_rho_m);
  json links = json::array();
  for (const GOracleLink& link : report.links) {
    json lj;
    lj["name"] = link.name;
    lj["lhs"] = link.lhs;
    lj["rhs"] = link.rhs;
    lj["slack"] = link.slack;
    lj["tight"] = link.tight;
    links.push_back(std::move(lj));
  }
  j["links"] = std::move(links);
  j["identities_ok"] = report.identities_ok;
  j["phase_aligned"] = report.phase_aligned;
  j["tol"] = report.tol;
  return j;
}

json to_json(const PostselectResult& result) {
  json j;
  j["source_weights"] = real_vector_to_json(result.source_weights);
  j["p_conclusive"] = result.source_weights.prod();
  json parties = json::array();
  for (const FairSamplingDecomposition& d : result.decompositions) {
    json pj;
    pj["fair_sampling"] = true;
    json filters = json::array();
    for (const Matrix& f : d.filters) filters.push_back(matrix_to_interleaved(f));
    pj["filters"] = std::move(filters);
    parties.push_back(std::move(pj));
  }
  j["parties"] = std::move(parties);
  return j;
}

json to_json(const OptimizeResult& result, const OptimizeOptions& options) {
  json j;
  j["objective"] = to_string(options.objective);
  j["equal_t"] = options.equal_t;
  if (options.fixed_t)
    j["fixed_t"] = *options.fixed_t;
  else
    j["fixed_t"] = nullptr;
  j["zero_phases"] = options.zero_phases;
  j["restarts"] = options.restarts;
  j["seed"] = options.seed;
  json params;
  params["t1"] = result.params.t1;
  params["t2"] = result.params.t2;
  const auto settings_json = [](const std::array<AngleSetting, 2>& settings) {
    json arr = json::array();
    for (const AngleSetting& s : settings) {
      json sj;
      sj["theta"] = s.theta;
      sj["phi"] = s.phi;
      arr.push_back(std::move(sj));
    }
    return arr;
  };
  params["alice"] = settings_json(result.params.alice);
  params["bob"] = settings_json(result.params.bob);
  j["params"] = std::move(params);
  json binning;
  binning["alice"] = result.binning.alice;
  binning["bob"] = result.binning.bob;
  j["binning"] = std::move(binning);
  j["value"] = result.value;
  j["chsh"] = result.chsh;
  j["randomness"] = result.randomness;
  j["success_prob"] = result.success_prob;
  j["uses_phase"] = uses_phase(result.params);
  j["best_restart"] = result.best_restart;
  j["restart_values"] = result.restart_values;
  return j;
}

json to_json(const RandomnessBoundReport& report) {
  json j;
  j["theta"] = report.theta;
  j["e_alpha"] = report.e_alpha;
  j["e_beta"] = report.e_beta;
  j["e_gamma"] = report.e_gamma;
  j["r_raw"] = report.r_raw;
  j["r_clamped"] = report.r_clamped;
  j["entropy_L"] = report.entropy_L;
  j["scaled_bound"] = report.scaled_bound;
  j["naive_bound"] = report.naive_bound;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error(path + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << text;
  if (!out) throw io_error("write failed for " + path);
}

void write_json_file(const std::string& path, const FileHeader& header, json body) {
  json file;
  file["header"] = to_json(header);
  for (auto& [key, value] : body.items()) file[key] = std::move(value);
  write_text_file(path, file.dump(2) + "\n");
}

CsvWriter::CsvWriter(const FileHeader& header) {
  comment("tool = " + header.tool);
  comment("version = " + header.version);
  comment("seed = " + std::to_string(header.seed));
  comment("config_hash = " + header.config_hash);
}

void CsvWriter::comment(const std::string& line) { text_ += "# " + line + "\n"; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ",";
    text_ += cells[i];
  }
  text_ += "\n";
}

void CsvWriter::save(const std::string& path) const { write_text_file(path, text_); }

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string distribution_csv(const OutcomeDistribution& dist, const FileHeader& header) {
  CsvWriter csv(header);
  std::vector<std::string> cells;
  for (int p = 0; p < dist.n_parties(); ++p)
    cells.push_back("party_" + std::to_string(p));
  cells.push_back("probability");
  csv.row(cells);
  for (long idx = 0; idx < dist.size(); ++idx) {
    const std::vector<int> outcome = dist.outcome_at(idx);
    cells.clear();
    for (int p = 0; p < dist.n_parties(); ++p)
      cells.push_back(dist.alphabet(p).labels[outcome[p]]);
    cells.push_back(format_double(dist.probabilities()[idx]));
    csv.row(cells);
  }
  return csv.text();
}

}  // namespace finnet::io
