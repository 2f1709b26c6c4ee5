#include "drt/scenario_io.hpp"

#include <cmath>
#include <fstream>

#include "drt/error.hpp"

namespace drt {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_real(const json& node, const std::string& field) {
  if (!node.is_array() || node.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = node[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty()) throw ConfigError(field, "row " + std::to_string(i) + " is not an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(field, "ragged rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw ConfigError(field, "non-numeric entry");
      m(i, j) = v.get<double>();
      if (!std::isfinite(m(i, j))) throw ConfigError(field, "non-finite entry");
    }
  }
  return m;
}

double number(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(key, "missing");
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

}  // namespace

CMatrix parse_matrix(const json& node, const std::string& field) {
  if (node.is_array()) return parse_real(node, field).cast<cdouble>();
  if (!node.is_object() || !node.contains("re")) throw ConfigError(field, "expected an array or {\"re\", \"im\"}");
  const Eigen::MatrixXd re = parse_real(node.at("re"), field + ".re");
  CMatrix m = re.cast<cdouble>();
  if (node.contains("im")) {
    const Eigen::MatrixXd im = parse_real(node.at("im"), field + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw ConfigError(field, "re/im shape mismatch");
    m.imag() = im;
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return json{{"re", re}, {"im", im}};
}

ScenarioConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  const bool has_gram = doc.contains("gram");
  const bool has_hs = doc.contains("h_s");
  if (has_gram == has_hs) throw ConfigError("gram", "exactly one of 'gram' or 'h_s' is required");

  const double amp = number(doc, "mean_square_amp");
  if (!(amp > 0.0)) throw ConfigError("mean_square_amp", "must be positive");
  const double t_raw = number(doc, "snapshots");
  if (!(t_raw >= 1.0) || t_raw != std::floor(t_raw) || t_raw > 1e7)
    throw ConfigError("snapshots", "must be a positive integer");
  const int snapshots = static_cast<int>(t_raw);
  const double noise = number(doc, "noise_psd");
  if (!(noise > 0.0)) throw ConfigError("noise_psd", "must be positive");
  const double pfa = number(doc, "pfa");
  if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("pfa", "must lie strictly inside (0, 1)");
  const double budget = doc.contains("power_budget") ? number(doc, "power_budget") : 0.0;
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ConfigError("power_budget", "must be nonnegative");

  std::optional<RadarScenario> radar;
  try {
    if (has_gram)
      radar.emplace(parse_matrix(doc.at("gram"), "gram"), amp, snapshots, noise, pfa, budget);
    else
      radar.emplace(RadarScenario::from_sensing_matrix(parse_matrix(doc.at("h_s"), "h_s"), amp, snapshots, noise, pfa,
                                                       budget));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(has_gram ? "gram" : "h_s", e.what());
  }

  ScenarioConfig cfg{*radar, std::nullopt};
  if (doc.contains("comm_channel")) {
    const json& cc = doc.at("comm_channel");
    if (!cc.is_object() || !cc.contains("h_c")) throw ConfigError("comm_channel.h_c", "missing");
    CommChannel ch{parse_matrix(cc.at("h_c"), "comm_channel.h_c"), 1.0};
    if (cc.contains("noise_psd")) {
      if (!cc.at("noise_psd").is_number()) throw ConfigError("comm_channel.noise_psd", "expected a number");
      ch.noise_psd = cc.at("noise_psd").get<double>();
    }
    if (!(ch.noise_psd > 0.0)) throw ConfigError("comm_channel.noise_psd", "must be positive");
    if (ch.h_c.cols() != cfg.radar.antennas())
      throw ConfigError("comm_channel.h_c", "column count must equal the number of transmit antennas");
    cfg.comm = std::move(ch);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario", std::string("JSON parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig& config) {
  const RadarScenario& r = config.radar;
  json doc{{"gram", matrix_to_json(r.gram())},
           {"mean_square_amp", r.mean_square_amp()},
           {"snapshots", r.snapshots()},
           {"noise_psd", r.noise_psd()},
           {"pfa", r.pfa()},
           {"power_budget", r.power_budget()}};
  if (config.comm) doc["comm_channel"] = json{{"h_c", matrix_to_json(config.comm->h_c)}, {"noise_psd", config.comm->noise_psd}};
  return doc;
}

}  // namespace drt
