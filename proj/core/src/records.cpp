#include "drt/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "drt/error.hpp"

namespace drt {

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError(std::string(name), "missing column");
  return static_cast<std::size_t>(it - columns.begin());
}

const std::string& Table::cell(std::size_t row, std::string_view name) const { return rows.at(row).at(column(name)); }

double Table::number(std::size_t row, std::string_view name) const { return parse_number(cell(row, name), name); }

bool Table::flag(std::size_t row, std::string_view name) const {
  const std::string& c = cell(row, name);
  if (c == "1" || c == "true") return true;
  if (c == "0" || c == "false") return false;
  throw ConfigError(std::string(name), "expected 0/1, got '" + c + "'");
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw Error("row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_number(std::string_view text, std::string_view field) {
  std::string s(text);
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v = 0.0;
  is >> v;
  if (s.empty() || is.fail() || !is.eof()) {
    if (s == "inf" || s == "-inf" || s == "nan") return std::strtod(s.c_str(), nullptr);
    throw ConfigError(std::string(field), "not a number: '" + s + "'");
  }
  return v;
}

void write_csv(std::ostream& out, const Table& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.columns);
  for (const auto& r : table.rows) line(r);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& cell : out) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    cell = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
  }
  return out;
}

std::string flag_text(bool b) { return b ? "1" : "0"; }

}  // namespace

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto cells = split(line);
    if (header) {
      t.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != t.columns.size())
        throw ConfigError("line " + std::to_string(line_no), "expected " + std::to_string(t.columns.size()) +
                                                                   " cells, got " + std::to_string(cells.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (header) throw ConfigError("header", "empty table");
  return t;
}

Table design_grid_table(const DesignGrid& grid) {
  Table t{{"design_id", "cost", "perf"}, {}};
  for (const DesignEntry& e : grid.entries()) t.add_row({e.id, format_number(e.cost), format_number(e.perf)});
  return t;
}

DesignGrid parse_design_grid(const Table& table) {
  std::vector<DesignEntry> entries;
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    entries.push_back({table.cell(r, "design_id"), table.number(r, "cost"), table.number(r, "perf")});
  try {
    return DesignGrid(std::move(entries));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("design_id/cost/perf", e.what());
  }
}

Table front_table(const FrontSample& front, const EnvelopeResult& env) {
  Table t{{"xi", "g", "is_contact", "lambda", "mu", "designs"}, {}};
  std::size_t next_contact = 0;
  for (std::size_t k = 0; k < front.points.size(); ++k) {
    const FrontPoint& p = front.points[k];
    const bool contact = next_contact < env.contacts.size() && env.contacts[next_contact].front_index == k;
    if (contact) ++next_contact;
    double lambda = -p.g;
    double mu = 0.0;
    if (!env.segments.empty()) {
      auto it = std::upper_bound(env.segments.begin(), env.segments.end(), p.xi,
                                 [](double x, const EnvelopeSegment& s) { return x < s.xi_hi; });
      if (it == env.segments.end()) --it;
      lambda = it->lambda;
      mu = it->mu;
    }
    std::string designs;
    for (std::size_t d = 0; d < p.designs.size(); ++d) designs += (d ? ";" : "") + p.designs[d];
    t.add_row({format_number(p.xi), format_number(p.g), flag_text(contact), format_number(lambda), format_number(mu),
               designs});
  }
  return t;
}

FrontSample parse_front_table(const Table& table) {
  FrontSample front;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    FrontPoint p{table.number(r, "xi"), table.number(r, "g"), {}};
    std::stringstream ss(table.cell(r, "designs"));
    std::string id;
    while (std::getline(ss, id, ';'))
      if (!id.empty()) p.designs.push_back(id);
    if (p.designs.empty()) throw ConfigError("designs", "row " + std::to_string(r + 1) + " has no designs");
    if (!front.points.empty() && !(p.xi > front.points.back().xi))
      throw ConfigError("xi", "must be strictly increasing");
    front.points.push_back(std::move(p));
  }
  return front;
}

Table envelope_table(const EnvelopeResult& env) {
  Table t{{"xi_lo", "xi_hi", "lambda", "mu"}, {}};
  for (const EnvelopeSegment& s : env.segments)
    t.add_row({format_number(s.xi_lo), format_number(s.xi_hi), format_number(s.lambda), format_number(s.mu)});
  return t;
}

Table mixture_table(const MixedStrategy& mix) {
  Table t{{"weight", "xi", "design_id", "conditional_weight"}, {}};
  for (const MixtureAtom& a : mix.atoms)
    for (const DesignWeight& d : a.designs)
      t.add_row({format_number(a.weight), format_number(a.xi), d.id, format_number(d.conditional_weight)});
  return t;
}

MixedStrategy parse_mixture_table(const Table& table, double budget) {
  MixedStrategy mix;
  mix.budget = budget;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double w = table.number(r, "weight");
    const double xi = table.number(r, "xi");
    if (mix.atoms.empty() || mix.atoms.back().xi != xi || mix.atoms.back().weight != w) mix.atoms.push_back({w, xi, {}});
    mix.atoms.back().designs.push_back({table.cell(r, "design_id"), table.number(r, "conditional_weight")});
  }
  return mix;
}

Table plan_table(const std::vector<RadarPlan>& plans) {
  Table t{{"budget", "weight", "trace", "rho", "pd", "expected_pd", "deterministic_pd", "alpha", "pfa", "p_star", "p_t"},
          {}};
  for (const RadarPlan& plan : plans) {
    for (const CovarianceAtom& a : plan.atoms) {
      t.add_row({format_number(plan.budget), format_number(a.weight), format_number(a.trace), format_number(a.rho),
                 format_number(a.pd), format_number(plan.expected_pd), format_number(plan.deterministic_pd),
                 format_number(plan.geometry.curve.alpha()), format_number(plan.geometry.curve.pfa()),
                 format_number(plan.geometry.inflection.power), format_number(plan.geometry.tangent)});
    }
  }
  return t;
}

Table mc_table(const std::vector<McReport>& reports) {
  Table t{{"kind", "trials", "hits", "empirical", "target", "ci_low", "ci_high", "ci_half_width", "z_mean",
           "z_mean_target", "z_std_error", "seed"},
          {}};
  for (const McReport& r : reports)
    t.add_row({r.kind, std::to_string(r.trials), std::to_string(r.hits), format_number(r.empirical_prob),
               format_number(r.target_prob), format_number(r.ci_low), format_number(r.ci_high),
               format_number(r.ci_half_width), format_number(r.z_mean), format_number(r.z_mean_target),
               format_number(r.z_std_error), std::to_string(r.seed)});
  return t;
}

Table fuzz_table(const FuzzReport& report) {
  Table t{{"case_id", "grid_size", "C", "oracle_value", "mixture_value", "delta", "value_ok", "support_ok", "kkt_ok",
           "pass"},
          {}};
  for (const FuzzRecord& r : report.records)
    t.add_row({std::to_string(r.case_id), std::to_string(r.grid_size), format_number(r.budget),
               format_number(r.oracle_value), format_number(r.mixture_value), format_number(r.delta),
               flag_text(r.value_ok), flag_text(r.support_ok), flag_text(r.kkt_ok), flag_text(r.pass())});
  return t;
}

}  // namespace drt

namespace drt {

namespace {

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && s != "inf" && s != "-inf" && s != "nan";
}

}  // namespace

nlohmann::json table_to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const bool digits = !r[c].empty() && r[c].size() < 20 &&
                          std::all_of(r[c].begin(), r[c].end(), [](char ch) { return ch >= '0' && ch <= '9'; });
      if (digits)
        obj[table.columns[c]] = std::stoull(r[c]);
      else if (looks_numeric(r[c]))
        obj[table.columns[c]] = parse_number(r[c], table.columns[c]);
      else
        obj[table.columns[c]] = r[c];
    }
    rows.push_back(std::move(obj));
  }
  return nlohmann::json{{"columns", table.columns}, {"rows", rows}};
}

Table table_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows"))
    throw ConfigError("columns", "expected {\"columns\", \"rows\"}");
  Table t;
  t.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& obj : doc.at("rows")) {
    std::vector<std::string> row;
    for (const auto& c : t.columns) {
      if (!obj.contains(c)) throw ConfigError(c, "missing in row");
      const auto& v = obj.at(c);
      if (v.is_number_unsigned())
        row.push_back(std::to_string(v.get<unsigned long long>()));
      else if (v.is_number_integer())
        row.push_back(std::to_string(v.get<long long>()));
      else if (v.is_number())
        row.push_back(format_number(v.get<double>()));
      else
        row.push_back(v.get<std::string>());
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace drt
