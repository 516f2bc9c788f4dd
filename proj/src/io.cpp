#include "ringflux/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "ringflux/errors.hpp"

namespace ringflux {

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string to_string_integer(const mpz_class& z) { return z.get_str(); }

std::string scope_name(PartitionScope s) { return s == PartitionScope::Omega ? "omega" : "sector"; }

PartitionScope parse_scope(std::string_view s) {
  if (s == "omega") return PartitionScope::Omega;
  if (s == "sector") return PartitionScope::Sector;
  throw InvalidArgument("unknown partition scope '" + std::string(s) + "'");
}

Table with_columns(std::vector<Column> columns) {
  Table t;
  t.columns = std::move(columns);
  return t;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "text") return Format::Text;
  throw InvalidArgument("unknown format '" + std::string(name) + "' (csv, json, text)");
}

std::string render(const Table& t, Format f) {
  if (f == Format::Csv) return t.to_csv();
  if (f == Format::Json) return t.to_json().dump(2) + "\n";
  std::ostringstream os;
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << '\n';
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    width[c] = t.columns[c].name.size();
    for (const auto& row : t.rows) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](auto cell) {
    std::string s;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const std::string v = cell(c);
      s += (c ? "  " : "") + v + std::string(width[c] - v.size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    os << s << '\n';
  };
  line([&](std::size_t c) { return t.columns[c].name; });
  for (const auto& row : t.rows) line([&](std::size_t c) { return row[c]; });
  return os.str();
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw InvalidArgument("not a real number: '" + s + "'");
  return v;
}

std::size_t parse_size(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InvalidArgument("not a nonnegative integer: '" + std::string(text) + "'");
  return v;
}

std::string Table::to_csv() const {
  std::ostringstream os;
  os << "# schema-version: " << kSchemaVersion << '\n';
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c].name;
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c].find_first_of(",\n") != std::string::npos)
        throw IoError("cell '" + row[c] + "' cannot be written as CSV");
      os << (c ? "," : "") << row[c];
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json Table::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["meta"] = nlohmann::json::object();
  for (const auto& [k, v] : meta) j["meta"][k] = v;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : columns) {
    const char* type = c.type == ColumnType::Integer ? "integer"
                       : c.type == ColumnType::Real  ? "real"
                                                     : "text";
    j["columns"].push_back({{"name", c.name}, {"type", type}});
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& cell = row[c];
      if (columns[c].type == ColumnType::Real && !cell.empty())
        r[columns[c].name] = parse_real(cell);
      else
        r[columns[c].name] = cell;
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

Table Table::from_csv(std::string_view text, const std::vector<Column>& schema) {
  Table t;
  t.columns = schema;
  std::istringstream is{std::string(text)};
  std::string line;
  bool header_seen = false, version_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw IoError("malformed comment line: " + line);
      std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
      if (key == "schema-version") {
        if (parse_size(value) != static_cast<std::size_t>(kSchemaVersion))
          throw IoError("unsupported schema version " + value);
        version_seen = true;
      } else {
        t.meta.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    auto cells = split(line, ',');
    if (!header_seen) {
      if (cells.size() != schema.size()) throw IoError("unexpected CSV header: " + line);
      for (std::size_t c = 0; c < cells.size(); ++c)
        if (cells[c] != schema[c].name) throw IoError("unexpected CSV column " + cells[c]);
      header_seen = true;
      continue;
    }
    if (cells.size() != schema.size()) throw IoError("row width mismatch: " + line);
    t.rows.push_back(std::move(cells));
  }
  if (!version_seen) throw IoError("missing schema-version line");
  if (!header_seen) throw IoError("missing CSV header");
  return t;
}

Table Table::from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw IoError("unsupported schema version");
  Table t;
  for (const auto& [k, v] : j.at("meta").items()) t.meta.emplace_back(k, v.get<std::string>());
  for (const auto& c : j.at("columns")) {
    const auto type = c.at("type").get<std::string>();
    t.columns.push_back(Column{c.at("name").get<std::string>(),
                               type == "integer" ? ColumnType::Integer
                               : type == "real"  ? ColumnType::Real
                                                 : ColumnType::Text});
  }
  for (const auto& r : j.at("rows")) {
    std::vector<std::string> row;
    for (const auto& c : t.columns) {
      const auto& v = r.at(c.name);
      row.push_back(v.is_number() ? format_real(v.get<double>()) : v.get<std::string>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

const std::string& Table::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  throw IoError("missing meta entry '" + std::string(key) + "'");
}

std::size_t Table::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c].name == name) return c;
  throw IoError("missing column '" + std::string(name) + "'");
}

std::vector<Column> partition_columns() {
  return {{"k1", ColumnType::Integer}, {"k2", ColumnType::Integer}, {"N", ColumnType::Integer}};
}

std::vector<Column> flux_theory_columns() {
  return {{"L", ColumnType::Integer},    {"m1", ColumnType::Integer}, {"m110", ColumnType::Integer},
          {"alpha", ColumnType::Real},   {"Q_v", ColumnType::Real},   {"Q_u", ColumnType::Real}};
}

std::vector<Column> diagram_columns() {
  return {{"L", ColumnType::Integer},          {"m1", ColumnType::Integer},
          {"m110", ColumnType::Integer},       {"alpha", ColumnType::Real},
          {"rho1", ColumnType::Real},          {"rho110", ColumnType::Real},
          {"Q_u_hat", ColumnType::Real},       {"stderr", ColumnType::Real},
          {"n_max", ColumnType::Integer},      {"n_burn", ColumnType::Integer},
          {"replicates", ColumnType::Integer}, {"seed", ColumnType::Integer},
          {"status", ColumnType::Text}};
}

std::vector<Column> stationary_columns() {
  return {{"class", ColumnType::Text},   {"orbit_size", ColumnType::Integer},
          {"m1110", ColumnType::Integer}, {"m010", ColumnType::Integer},
          {"pi", ColumnType::Real},       {"conjecture", ColumnType::Real}};
}

std::vector<Column> conjecture_columns() {
  return {{"L", ColumnType::Integer},         {"m1", ColumnType::Integer},
          {"m110", ColumnType::Integer},      {"omega", ColumnType::Integer},
          {"size", ColumnType::Integer},
          {"alpha", ColumnType::Real},        {"max_rel_error", ColumnType::Real},
          {"residual", ColumnType::Real},     {"pass", ColumnType::Text}};
}

std::vector<Column> limit_columns() {
  return {{"alpha", ColumnType::Real}, {"Q_u", ColumnType::Real}, {"deviation", ColumnType::Real}};
}

std::vector<Column> sector_columns() {
  return {{"class", ColumnType::Text},    {"orbit_size", ColumnType::Integer},
          {"m1110", ColumnType::Integer}, {"m010", ColumnType::Integer},
          {"omega", ColumnType::Text}};
}

std::vector<Column> replicate_columns() {
  return {{"replicate", ColumnType::Integer}, {"Q_hat", ColumnType::Real},
          {"pattern_Q_hat", ColumnType::Real}};
}

Table partition_table(const PartitionTable& p) {
  Table t = with_columns(partition_columns());
  t.meta = {{"scope", scope_name(p.scope)},
            {"L", std::to_string(p.length)},
            {"m1", std::to_string(p.m1)},
            {"m110", std::to_string(p.m110)}};
  for (const auto& [k, n] : p.counts)
    t.rows.push_back({std::to_string(k.first), std::to_string(k.second), to_string_integer(n)});
  return t;
}

PartitionTable partition_from(const Table& t) {
  PartitionTable p;
  p.scope = parse_scope(t.meta_value("scope"));
  p.length = parse_size(t.meta_value("L"));
  p.m1 = parse_size(t.meta_value("m1"));
  p.m110 = parse_size(t.meta_value("m110"));
  const auto k1 = t.column_index("k1"), k2 = t.column_index("k2"), n = t.column_index("N");
  for (const auto& row : t.rows) {
    mpz_class count;
    if (count.set_str(row[n], 10) != 0) throw IoError("bad integer " + row[n]);
    p.counts[{parse_size(row[k1]), parse_size(row[k2])}] = count;
  }
  return p;
}

Table flux_theory_table(const std::vector<FluxPoint>& points) {
  Table t = with_columns(flux_theory_columns());
  for (const auto& p : points)
    t.rows.push_back({std::to_string(p.length), std::to_string(p.m1), std::to_string(p.m110),
                      format_real(p.alpha), format_real(p.q_v), format_real(p.q_u)});
  return t;
}

std::vector<FluxPoint> flux_points_from(const Table& t) {
  std::vector<FluxPoint> out;
  for (const auto& row : t.rows)
    out.push_back(FluxPoint{parse_size(row[0]), parse_size(row[1]), parse_size(row[2]),
                            parse_real(row[3]), parse_real(row[4]), parse_real(row[5])});
  return out;
}

Table diagram_table(const SimulationSpec& spec, const std::vector<DiagramRow>& rows) {
  Table t = with_columns(diagram_columns());
  t.meta = {{"rule", spec.rule}};
  const double L = static_cast<double>(spec.length);
  for (const auto& r : rows) {
    const bool ok = r.estimate.has_value();
    t.rows.push_back({std::to_string(spec.length), std::to_string(r.m1), std::to_string(r.m110),
                      format_real(spec.alpha), format_real(static_cast<double>(r.m1) / L),
                      format_real(static_cast<double>(r.m110) / L),
                      ok ? format_real(r.estimate->mean) : "", ok ? format_real(r.estimate->std_error) : "",
                      std::to_string(spec.steps), std::to_string(spec.burn_in),
                      std::to_string(spec.replicates), std::to_string(spec.seed), r.status});
  }
  return t;
}

Table stationary_table(const OmegaSet& omega, const StationaryDistribution& pi) {
  Table t = with_columns(stationary_columns());
  t.meta = {{"L", std::to_string(omega.length)},
            {"m1", std::to_string(omega.m1)},
            {"m110", std::to_string(omega.m110)},
            {"omega", std::to_string(omega.id + 1)},
            {"alpha", format_real(pi.alpha)},
            {"residual", format_real(pi.residual)},
            {"method", pi.method},
            {"convention", "probabilities are per rotation class; conjecture weight includes the orbit size"}};
  const auto w = conjecture_vector(omega, pi.alpha);
  for (std::size_t i = 0; i < omega.members.size(); ++i) {
    const auto& c = omega.members[i];
    const auto p = flux_patterns(c.representative);
    t.rows.push_back({c.representative.to_string(), std::to_string(c.orbit_size),
                      std::to_string(p.m1110), std::to_string(p.m010),
                      format_real(pi.probabilities[i]), format_real(w[i])});
  }
  return t;
}

Table conjecture_table(const std::vector<ConjectureReport>& reports) {
  Table t = with_columns(conjecture_columns());
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.pass;
    for (const auto& c : r.checks)
      t.rows.push_back({std::to_string(r.omega.length), std::to_string(r.omega.m1),
                        std::to_string(r.omega.m110), std::to_string(r.omega.id + 1),
                        std::to_string(r.omega.members.size()),
                        format_real(c.alpha), format_real(c.max_relative_error),
                        format_real(c.residual), c.pass ? "pass" : "FAIL"});
  }
  if (!reports.empty()) {
    t.meta = {{"tolerance", format_real(reports.front().tolerance)},
              {"result", all ? "pass" : "FAIL"},
              {"convention", "weights are per rotation class: orbit_size * a^m010 / (1-a)^(m1110+m010)"}};
  }
  return t;
}

Table limit_table(const LimitReport& r) {
  Table t = with_columns(limit_columns());
  t.meta = {{"L", std::to_string(r.length)},
            {"m1", std::to_string(r.m1)},
            {"m110", std::to_string(r.m110)},
            {"deterministic", r.deterministic.get_str()},
            {"dominant_term", r.dominant_term.get_str()},
            {"kmax_attained", r.kmax_attained ? "true" : "false"},
            {"extrapolated", format_real(r.extrapolated)},
            {"extrapolated_deviation", format_real(r.extrapolated_deviation)}};
  for (const auto& row : r.rows)
    t.rows.push_back({format_real(row.alpha), format_real(row.q_u), format_real(row.deviation)});
  return t;
}

Table sector_table(const Sector& sector, const Decomposition& d) {
  Table t = with_columns(sector_columns());
  t.meta = {{"L", std::to_string(sector.length)},
            {"m1", std::to_string(sector.m1)},
            {"m110", std::to_string(sector.m110)},
            {"classes", std::to_string(sector.classes.size())},
            {"raw_configurations", std::to_string(sector.raw_count())},
            {"recurrent_sets", std::to_string(d.recurrent.size())},
            {"transient_classes", std::to_string(d.transient.size())}};
  for (const auto& c : sector.classes) {
    std::string label = "transient";
    for (const auto& omega : d.recurrent)
      if (omega.index_of(c.representative)) label = std::to_string(omega.id + 1);
    const auto p = flux_patterns(c.representative);
    t.rows.push_back({c.representative.to_string(), std::to_string(c.orbit_size),
                      std::to_string(p.m1110), std::to_string(p.m010), label});
  }
  return t;
}

Table simulation_table(const SimulationSpec& spec, const FluxEstimate& e) {
  Table t = with_columns(replicate_columns());
  t.meta = {{"rule", spec.rule},
            {"L", std::to_string(spec.length)},
            {"alpha", format_real(spec.alpha)},
            {"n_max", std::to_string(spec.steps)},
            {"n_burn", std::to_string(spec.burn_in)},
            {"seed", std::to_string(spec.seed)},
            {"Q_hat", format_real(e.mean)},
            {"stderr", format_real(e.std_error)}};
  if (spec.initial)
    t.meta.emplace_back("initial", spec.initial->to_string());
  else
    t.meta.insert(t.meta.end(), {{"m1", std::to_string(spec.m1)}, {"m110", std::to_string(spec.m110)}});
  if (e.exact) t.meta.emplace_back("Q_exact", e.exact->get_str());
  if (e.pattern_mean) {
    t.meta.emplace_back("pattern_Q_hat", format_real(*e.pattern_mean));
    t.meta.emplace_back("pattern_stderr", format_real(*e.pattern_std_error));
  }
  for (std::size_t r = 0; r < e.per_replicate.size(); ++r)
    t.rows.push_back({std::to_string(r), format_real(e.per_replicate[r]),
                      e.pattern_per_replicate.empty() ? "" : format_real(e.pattern_per_replicate[r])});
  return t;
}

nlohmann::json omega_json(const Sector& sector, const Decomposition& d) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["L"] = std::to_string(sector.length);
  j["m1"] = std::to_string(sector.m1);
  j["m110"] = std::to_string(sector.m110);
  j["omegas"] = nlohmann::json::array();
  for (const auto& omega : d.recurrent) {
    nlohmann::json o;
    o["id"] = std::to_string(omega.id + 1);
    o["members"] = nlohmann::json::array();
    for (const auto& c : omega.members) o["members"].push_back(c.representative.to_string());
    j["omegas"].push_back(std::move(o));
  }
  j["transient"] = nlohmann::json::array();
  for (const auto& c : d.transient) j["transient"].push_back(c.representative.to_string());
  return j;
}

std::string omega_text(const Decomposition& d) {
  std::ostringstream os;
  for (const auto& omega : d.recurrent) {
    os << "Omega_" << omega.id + 1 << " = {";
    for (std::size_t i = 0; i < omega.members.size(); ++i)
      os << (i ? ", " : "") << omega.members[i].representative.to_string();
    os << "}\n";
  }
  if (!d.transient.empty()) {
    os << "transient = {";
    for (std::size_t i = 0; i < d.transient.size(); ++i)
      os << (i ? ", " : "") << d.transient[i].representative.to_string();
    os << "}\n";
  }
  return os.str();
}

std::vector<Column> matrix_columns() {
  return {{"from", ColumnType::Text}, {"to", ColumnType::Text}, {"probability", ColumnType::Text}};
}

Table matrix_table(const TransitionMatrix& m) {
  Table t = with_columns(matrix_columns());
  t.meta = {{"L", std::to_string(m.omega.length)},
            {"m1", std::to_string(m.omega.m1)},
            {"m110", std::to_string(m.omega.m110)},
            {"omega", std::to_string(m.omega.id + 1)},
            {"order", std::to_string(m.order())}};
  for (std::size_t i = 0; i < m.order(); ++i)
    for (std::size_t j = 0; j < m.order(); ++j)
      if (!m.entries[i][j].empty())
        t.rows.push_back({m.omega.members[i].representative.to_string(),
                          m.omega.members[j].representative.to_string(),
                          m.entries[i][j].to_string()});
  return t;
}

nlohmann::json matrix_json(const TransitionMatrix& m) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["L"] = std::to_string(m.omega.length);
  j["m1"] = std::to_string(m.omega.m1);
  j["m110"] = std::to_string(m.omega.m110);
  j["omega"] = std::to_string(m.omega.id + 1);
  j["members"] = nlohmann::json::array();
  for (const auto& c : m.omega.members) j["members"].push_back(c.representative.to_string());
  j["entries"] = nlohmann::json::array();
  for (const auto& row : m.entries) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& e : row) r.push_back(e.to_string());
    j["entries"].push_back(std::move(r));
  }
  return j;
}

TransitionMatrix matrix_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw IoError("unsupported schema version");
  TransitionMatrix m;
  m.omega.length = parse_size(j.at("L").get<std::string>());
  m.omega.m1 = parse_size(j.at("m1").get<std::string>());
  m.omega.m110 = parse_size(j.at("m110").get<std::string>());
  m.omega.id = parse_size(j.at("omega").get<std::string>());
  if (m.omega.id == 0) throw IoError("recurrent sets are numbered from 1");
  --m.omega.id;
  for (const auto& s : j.at("members"))
    m.omega.members.push_back(OrbitClass::of(RingConfig::parse(s.get<std::string>())));
  for (const auto& row : j.at("entries")) {
    std::vector<AlphaPoly> r;
    for (const auto& e : row) r.push_back(AlphaPoly::parse(e.get<std::string>()));
    m.entries.push_back(std::move(r));
  }
  return m;
}

std::string space_time_text(const std::vector<RingConfig>& trajectory) {
  std::string out;
  for (const auto& c : trajectory) out += c.to_string() + '\n';
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + ": " + std::strerror(errno));
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw IoError("write failed for " + tmp.string() + ": " + std::strerror(errno));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

}  // namespace ringflux
