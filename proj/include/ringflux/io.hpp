#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ringflux/ensemble.hpp"
#include "ringflux/markov.hpp"
#include "ringflux/montecarlo.hpp"
#include "ringflux/theory.hpp"

namespace ringflux {

inline constexpr int kSchemaVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnType { Integer, Real, Text };

struct Column {
  std::string name;
  ColumnType type;
  bool operator==(const Column&) const = default;
};

// Flat report: `meta` holds scalar key/value pairs, `rows` hold cell text.
// Integers are exact decimal strings, reals are written with 17 significant
// digits. CSV starts with "# schema-version: 1" and one "# key: value" line
// per meta entry; JSON carries integers as strings and reals as numbers.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  nlohmann::json to_json() const;
  // The CSV form does not carry column types; pass the expected schema.
  static Table from_csv(std::string_view text, const std::vector<Column>& schema);
  static Table from_json(const nlohmann::json& j);

  const std::string& meta_value(std::string_view key) const;
  std::size_t column_index(std::string_view name) const;
  bool operator==(const Table&) const = default;
};

enum class Format { Csv, Json, Text };
Format parse_format(std::string_view name);
// Text is the CSV content laid out in aligned columns.
std::string render(const Table& t, Format f);

std::string format_real(double x);
double parse_real(std::string_view text);
std::size_t parse_size(std::string_view text);

// Schemas, in column order. Recurrent sets are numbered from 1 in every output.
std::vector<Column> partition_columns();     // k1, k2, N
std::vector<Column> flux_theory_columns();   // L, m1, m110, alpha, Q_v, Q_u
std::vector<Column> diagram_columns();       // L, m1, m110, alpha, rho1, rho110, Q_u_hat, stderr, n_max, n_burn, replicates, seed, status
std::vector<Column> stationary_columns();    // class, orbit_size, m1110, m010, pi, conjecture
std::vector<Column> conjecture_columns();    // L, m1, m110, omega, size, alpha, max_rel_error, residual, pass
std::vector<Column> limit_columns();         // alpha, Q_u, deviation
std::vector<Column> sector_columns();        // class, orbit_size, m1110, m010, omega
std::vector<Column> replicate_columns();     // replicate, Q_hat, pattern_Q_hat
std::vector<Column> matrix_columns();        // from, to, probability (nonzero entries only)

Table partition_table(const PartitionTable& p);
PartitionTable partition_from(const Table& t);

Table flux_theory_table(const std::vector<FluxPoint>& points);
std::vector<FluxPoint> flux_points_from(const Table& t);

Table diagram_table(const SimulationSpec& spec, const std::vector<DiagramRow>& rows);

Table stationary_table(const OmegaSet& omega, const StationaryDistribution& pi);
Table conjecture_table(const std::vector<ConjectureReport>& reports);
Table limit_table(const LimitReport& r);
Table sector_table(const Sector& sector, const Decomposition& d);
Table simulation_table(const SimulationSpec& spec, const FluxEstimate& e);

nlohmann::json omega_json(const Sector& sector, const Decomposition& d);
std::string omega_text(const Decomposition& d);
Table matrix_table(const TransitionMatrix& m);
nlohmann::json matrix_json(const TransitionMatrix& m);
TransitionMatrix matrix_from_json(const nlohmann::json& j);

// One configuration string per line.
std::string space_time_text(const std::vector<RingConfig>& trajectory);

// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ringflux
