#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "drt/lp_oracle.hpp"
#include "drt/mixture.hpp"
#include "drt/monte_carlo.hpp"
#include "drt/radar.hpp"
#include "drt/tradeoff.hpp"

// Comma-separated tables with a header row. Numbers are written with 12
// significant digits; cells never contain commas or quotes.

namespace drt {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws ConfigError naming the column if absent.
  std::size_t column(std::string_view name) const;
  const std::string& cell(std::size_t row, std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
  bool flag(std::size_t row, std::string_view name) const;

  void add_row(std::vector<std::string> row);
};

std::string format_number(double v);
double parse_number(std::string_view text, std::string_view field);

void write_csv(std::ostream& out, const Table& table);
/// Blank lines and lines starting with '#' are skipped. Throws ConfigError on
/// ragged rows.
Table read_csv(std::istream& in);

/// design_id,cost,perf
Table design_grid_table(const DesignGrid& grid);
DesignGrid parse_design_grid(const Table& table);

/// xi,g,is_contact,lambda,mu,designs (designs joined by ';'). lambda/mu are
/// those of the envelope segment covering xi.
Table front_table(const FrontSample& front, const EnvelopeResult& env);
FrontSample parse_front_table(const Table& table);

/// xi_lo,xi_hi,lambda,mu
Table envelope_table(const EnvelopeResult& env);

/// weight,xi,design_id,conditional_weight (one row per design).
Table mixture_table(const MixedStrategy& mix);
MixedStrategy parse_mixture_table(const Table& table, double budget);

/// budget,weight,trace,rho,pd,expected_pd,deterministic_pd,alpha,pfa,p_star,p_t
Table plan_table(const std::vector<RadarPlan>& plans);

/// kind,trials,hits,empirical,target,ci_low,ci_high,ci_half_width,z_mean,z_mean_target,z_std_error,seed
Table mc_table(const std::vector<McReport>& reports);

/// case_id,grid_size,C,oracle_value,mixture_value,delta,value_ok,support_ok,kkt_ok,pass
Table fuzz_table(const FuzzReport& report);

}  // namespace drt

#include <nlohmann/json.hpp>

namespace drt {

/// Array of row objects; cells that parse as numbers become JSON numbers.
nlohmann::json table_to_json(const Table& table);
Table table_from_json(const nlohmann::json& doc);

}  // namespace drt
