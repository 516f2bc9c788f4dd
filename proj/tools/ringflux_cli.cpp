#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "ringflux/errors.hpp"
#include "ringflux/io.hpp"

using namespace ringflux;

namespace {

constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitInternal = 5;

struct Options {
  std::optional<std::size_t> L, m1, m110;
  std::vector<double> alphas;
  std::uint64_t seed = 1;
  std::size_t steps = 3000;
  std::size_t burn_in = 0;
  std::size_t replicates = 32;
  std::string rule = "stoch-u";
  std::string format;
  std::string out;
  std::string init;
  std::string scope = "sector";
  std::string space_time;
  std::size_t omega = 0;  // 1-based; 0 means "all" where that makes sense
  std::size_t jobs = 1;
  std::size_t bound = kDefaultEnumerationBound;
  double tolerance = kConjectureTolerance;
  bool no_cycle_average = false;
};

struct Artifact {
  std::string content;
  std::string extension;
  std::string summary;
  bool failed = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::size_t need(const std::optional<std::size_t>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required flag ") + flag);
  return *v;
}

double single_alpha(const Options& o, double fallback) {
  if (o.alphas.empty()) return fallback;
  if (o.alphas.size() != 1) throw UsageError("this subcommand takes a single --alpha");
  return o.alphas.front();
}

Format format_or(const Options& o, Format fallback) {
  return o.format.empty() ? fallback : parse_format(o.format);
}

std::string extension(Format f) {
  return f == Format::Csv ? ".csv" : f == Format::Json ? ".json" : ".txt";
}

Artifact table_artifact(const Table& t, Format f, std::string summary) {
  return {render(t, f), extension(f), std::move(summary)};
}

void require_sector(std::size_t L, std::size_t m1, std::size_t m110) {
  if (!sector_nonempty(L, m1, m110))
    throw InfeasibleSector("no configuration with L=" + std::to_string(L) + ", m1=" +
                           std::to_string(m1) + ", m110=" + std::to_string(m110) +
                           (satisfies_density_bounds(L, m1, m110)
                                ? " (m110 = 0 needs m1 <= L/2 or m1 = L)"
                                : " (needs 2*m110 <= m1 <= L - m110)"));
}

std::string sector_label(std::size_t L, std::size_t m1, std::size_t m110) {
  return "L=" + std::to_string(L) + " m1=" + std::to_string(m1) + " m110=" + std::to_string(m110);
}

const OmegaSet& pick_omega(const Decomposition& d, std::size_t one_based) {
  const std::size_t index = one_based == 0 ? 0 : one_based - 1;
  if (index >= d.recurrent.size())
    throw UsageError("--omega " + std::to_string(one_based) + " out of range; the sector has " +
                     std::to_string(d.recurrent.size()) + " recurrent set(s)");
  return d.recurrent[index];
}

Decomposition decompose(const Options& o, Sector* out_sector = nullptr) {
  const std::size_t L = need(o.L, "--L"), m1 = need(o.m1, "--m1"), m110 = need(o.m110, "--m110");
  require_sector(L, m1, m110);
  auto sector = enumerate_sector(L, m1, m110, o.bound);
  auto d = recurrent_classes(sector);
  if (out_sector) *out_sector = std::move(sector);
  return d;
}

Artifact cmd_sector(const Options& o) {
  Sector s;
  const auto d = decompose(o, &s);
  std::ostringstream sum;
  sum << "sector " << sector_label(s.length, s.m1, s.m110) << ": " << s.classes.size()
      << " classes, " << s.raw_count() << " configurations, " << d.recurrent.size()
      << " recurrent set(s), " << d.transient.size() << " transient class(es)";
  return table_artifact(sector_table(s, d), format_or(o, Format::Csv), sum.str());
}

Artifact cmd_omega(const Options& o) {
  Sector s;
  const auto d = decompose(o, &s);
  std::ostringstream sum;
  sum << "omega " << sector_label(s.length, s.m1, s.m110) << ": " << d.recurrent.size()
      << " recurrent set(s) of size";
  for (std::size_t i = 0; i < d.recurrent.size(); ++i)
    sum << (i ? ", " : " ") << d.recurrent[i].members.size();
  sum << "; " << d.transient.size() << " transient class(es)";
  const Format f = format_or(o, Format::Text);
  if (f == Format::Text) return {omega_text(d), ".txt", sum.str()};
  if (f == Format::Json) return {omega_json(s, d).dump(2) + "\n", ".json", sum.str()};
  return table_artifact(sector_table(s, d), f, sum.str());
}

Artifact cmd_matrix(const Options& o) {
  const auto d = decompose(o);
  const auto& w = pick_omega(d, o.omega);
  const auto m = build_matrix(w);
  const std::string sum = "matrix Omega_" + std::to_string(w.id + 1) + " of " +
                          sector_label(w.length, w.m1, w.m110) + ": " + std::to_string(m.order()) +
                          "x" + std::to_string(m.order());
  const Format f = format_or(o, Format::Json);
  if (f == Format::Json) return {matrix_json(m).dump(2) + "\n", ".json", sum};
  return table_artifact(matrix_table(m), f, sum);
}

Artifact cmd_stationary(const Options& o) {
  const auto d = decompose(o);
  const auto& w = pick_omega(d, o.omega);
  const double alpha = single_alpha(o, 0.5);
  const auto pi = stationary(build_matrix(w), alpha);
  const auto conj = conjecture_vector(w, alpha);
  double worst = 0.0;
  for (std::size_t i = 0; i < conj.size(); ++i)
    worst = std::max(worst, std::abs(pi.probabilities[i] - conj[i]) / conj[i]);
  std::ostringstream sum;
  sum << "stationary Omega_" << w.id + 1 << " of " << sector_label(w.length, w.m1, w.m110)
      << " at alpha=" << alpha << ": residual " << pi.residual << " (" << pi.method
      << "), max relative deviation from the pattern-count law " << worst;
  return table_artifact(stationary_table(w, pi), format_or(o, Format::Csv), sum.str());
}

Artifact cmd_verify(const Options& o) {
  const std::size_t L = need(o.L, "--L");
  std::vector<double> alphas = o.alphas;
  if (alphas.empty()) alphas = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<std::pair<std::size_t, std::size_t>> sectors;
  if (o.m1 && o.m110) {
    require_sector(L, *o.m1, *o.m110);
    sectors.emplace_back(*o.m1, *o.m110);
  } else if (o.m1 || o.m110) {
    throw UsageError("give both --m1 and --m110, or neither to sweep every sector");
  } else {
    for (auto [m1, m110] : density_grid(L))
      if (sector_nonempty(L, m1, m110)) sectors.emplace_back(m1, m110);
  }
  std::vector<ConjectureReport> reports;
  for (auto [m1, m110] : sectors)
    for (const auto& w : recurrent_classes(enumerate_sector(L, m1, m110, o.bound)).recurrent)
      reports.push_back(verify_conjecture(w, alphas, o.tolerance));
  std::size_t failed = 0;
  double worst = 0.0;
  for (const auto& r : reports) {
    failed += !r.pass;
    for (const auto& c : r.checks) worst = std::max(worst, c.max_relative_error);
  }
  std::ostringstream sum;
  sum << "verify-conjecture L=" << L << ": " << reports.size() << " recurrent set(s) in "
      << sectors.size() << " sector(s), " << failed << " failing, max relative error " << worst
      << " (tolerance " << o.tolerance << ")";
  Artifact a = table_artifact(conjecture_table(reports), format_or(o, Format::Csv), sum.str());
  a.failed = failed > 0;
  return a;
}

std::vector<PartitionTable> partitions(const Options& o, std::size_t L, std::size_t m1,
                                       std::size_t m110) {
  if (o.scope == "sector") return {partition_sector_dp(L, m1, m110)};
  if (o.scope != "omega") throw UsageError("--scope must be omega or sector");
  std::vector<PartitionTable> out;
  const auto d = recurrent_classes(enumerate_sector(L, m1, m110, o.bound));
  if (o.omega) return {partition_omega(pick_omega(d, o.omega))};
  for (const auto& w : d.recurrent) out.push_back(partition_omega(w));
  return out;
}

Artifact cmd_partition(const Options& o) {
  const std::size_t L = need(o.L, "--L"), m1 = need(o.m1, "--m1"), m110 = need(o.m110, "--m110");
  require_sector(L, m1, m110);
  Options one = o;
  if (o.scope == "omega" && !o.omega) one.omega = 1;
  const auto t = partitions(one, L, m1, m110).front();
  std::ostringstream sum;
  sum << "partition " << sector_label(L, m1, m110) << " scope=" << o.scope;
  if (o.scope == "omega") sum << " Omega_" << one.omega;
  sum << ": " << t.counts.size() << " nonzero entries, total " << t.total().get_str()
      << ", kmax " << t.kmax() << ", largest k1+k2 " << t.max_support();
  return table_artifact(partition_table(t), format_or(o, Format::Csv), sum.str());
}

Artifact cmd_flux_theory(const Options& o) {
  const std::size_t L = need(o.L, "--L");
  std::vector<double> alphas = o.alphas;
  if (alphas.empty()) alphas = {0.5};
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw UsageError("flux-theory needs alpha in (0, 1); see limit-check");
  if (o.m1 && o.m110) require_sector(L, *o.m1, *o.m110);

  std::vector<PartitionTable> tables;
  if (o.scope == "sector" && !(o.m1 && o.m110)) {
    for (auto& [key, t] : partition_all_sectors_dp(L)) {
      if (o.m1 && key.first != *o.m1) continue;
      if (o.m110 && key.second != *o.m110) continue;
      tables.push_back(std::move(t));
    }
  } else {
    for (auto [m1, m110] : density_grid(L)) {
      if (o.m1 && m1 != *o.m1) continue;
      if (o.m110 && m110 != *o.m110) continue;
      if (!sector_nonempty(L, m1, m110)) continue;
      for (auto& t : partitions(o, L, m1, m110)) tables.push_back(std::move(t));
    }
  }
  if (tables.empty()) throw InfeasibleSector("no nonempty sector matches the given flags");
  std::vector<FluxPoint> points;
  for (double a : alphas)
    for (const auto& t : tables) points.push_back(q_theory(t, a));
  Table t = flux_theory_table(points);
  t.meta = {{"scope", o.scope}};
  std::ostringstream sum;
  sum << "flux-theory L=" << L << " scope=" << o.scope << ": " << points.size() << " point(s) over "
      << tables.size() << " table(s)";
  return table_artifact(t, format_or(o, Format::Csv), sum.str());
}

SimulationSpec simulation_spec(const Options& o) {
  SimulationSpec s;
  s.rule = o.rule;
  s.alpha = single_alpha(o, s.alpha);
  s.steps = o.steps;
  s.burn_in = o.burn_in;
  s.seed = o.seed;
  s.replicates = o.replicates;
  s.jobs = o.jobs;
  s.cycle_average = !o.no_cycle_average;
  if (!o.init.empty()) {
    s.initial = RingConfig::parse(o.init);
    if (o.L && *o.L != s.initial->size())
      throw UsageError("--init has length " + std::to_string(s.initial->size()) + " but --L is " +
                       std::to_string(*o.L));
    s.length = s.initial->size();
    const auto p = conserved_pair(*s.initial);
    s.m1 = p.m1;
    s.m110 = p.m110;
  } else {
    s.length = need(o.L, "--L");
    s.m1 = need(o.m1, "--m1");
    s.m110 = need(o.m110, "--m110");
  }
  s.validate();
  return s;
}

Artifact cmd_simulate(const Options& o) {
  const auto s = simulation_spec(o);
  const auto e = run_flux(s);
  if (!o.space_time.empty()) {
    const RingConfig start =
        s.initial ? *s.initial : generate_initial(s.length, s.m1, s.m110, derive_seed(s.seed, 0, 1));
    const auto traj = trajectory(start, FluxRule::by_name(s.rule), s.alpha, derive_seed(s.seed, 0, 2),
                                 s.steps);
    write_atomic(o.space_time, space_time_text(traj));
  }
  std::ostringstream sum;
  sum << "simulate rule=" << s.rule << " " << sector_label(s.length, s.m1, s.m110);
  if (s.rule != "det") sum << " alpha=" << s.alpha;
  sum << ": Q_hat=" << format_real(e.mean)
      << " stderr=" << format_real(e.std_error) << " over " << s.replicates << " replicate(s)";
  if (e.exact) sum << " exact=" << e.exact->get_str();
  if (e.pattern_mean) sum << " pattern_Q_hat=" << format_real(*e.pattern_mean);
  return table_artifact(simulation_table(s, e), format_or(o, Format::Csv), sum.str());
}

Artifact cmd_diagram(const Options& o) {
  SimulationSpec s;
  s.rule = o.rule;
  s.length = need(o.L, "--L");
  s.alpha = single_alpha(o, 0.7);
  s.steps = o.steps;
  s.burn_in = o.burn_in;
  s.seed = o.seed;
  s.replicates = o.replicates;
  s.jobs = o.jobs;
  s.cycle_average = !o.no_cycle_average;
  // Validate everything except the sector, which varies over the grid.
  SimulationSpec probe = s;
  probe.m1 = probe.m110 = 0;
  probe.validate();
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (auto [m1, m110] : density_grid(s.length)) {
    if (o.m1 && m1 != *o.m1) continue;
    if (o.m110 && m110 != *o.m110) continue;
    grid.emplace_back(m1, m110);
  }
  if (grid.empty()) throw InfeasibleSector("no grid point satisfies the density bounds");
  const auto rows = sweep_diagram(s, grid);
  std::size_t ok = 0;
  for (const auto& r : rows) ok += r.status == "ok";
  for (const auto& r : rows)
    if (r.status != "ok")
      std::cerr << "ringflux: warning: skipped m1=" << r.m1 << " m110=" << r.m110 << " ("
                << r.status << ")\n";
  std::ostringstream sum;
  sum << "diagram rule=" << s.rule << " L=" << s.length;
  if (s.rule != "det") sum << " alpha=" << s.alpha;
  sum << ": " << ok
      << " point(s) simulated, " << rows.size() - ok << " skipped";
  return table_artifact(diagram_table(s, rows), format_or(o, Format::Csv), sum.str());
}

Artifact cmd_limit(const Options& o) {
  const std::size_t L = need(o.L, "--L"), m1 = need(o.m1, "--m1"), m110 = need(o.m110, "--m110");
  require_sector(L, m1, m110);
  const auto alphas = o.alphas.empty() ? kDefaultLimitAlphas : o.alphas;
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw UsageError("limit-check alphas must lie in (0, 1)");
  const auto r = limit_check(L, m1, m110, alphas);
  std::ostringstream sum;
  sum << "limit-check " << sector_label(L, m1, m110) << ": dominant term " << r.dominant_term.get_str()
      << ", deterministic " << r.deterministic.get_str() << ", Q_u(" << r.rows.back().alpha
      << ")=" << format_real(r.rows.back().q_u) << " deviation " << r.rows.back().deviation;
  return table_artifact(limit_table(r), format_or(o, Format::Csv), sum.str());
}

std::string default_name(const std::string& cmd, const Options& o) {
  std::string name = cmd;
  if (o.L) name += "_L" + std::to_string(*o.L);
  if (o.m1) name += "_m1-" + std::to_string(*o.m1);
  if (o.m110) name += "_m110-" + std::to_string(*o.m110);
  if (o.omega) name += "_omega" + std::to_string(o.omega);
  if (!o.init.empty()) name += "_init-" + o.init;
  return name;
}

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return parse_size(v);
  } catch (const std::exception&) {
    throw UsageError(std::string(name) + " must be a nonnegative integer, got '" + v + "'");
  }
}

int fail(const char* category, const std::string& what, int code) {
  std::cerr << "ringflux: error[" << category << "]: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Fluxes, recurrent sets and stationary laws of a 5-neighbor stochastic ring"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  using Runner = Artifact (*)(const Options&);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands{
      {"simulate", "Monte Carlo mean flux of one sector or initial configuration", cmd_simulate},
      {"sector", "all rotation classes of a sector with their recurrent set", cmd_sector},
      {"omega", "recurrent sets of a sector", cmd_omega},
      {"matrix", "exact class-level transition matrix of one recurrent set", cmd_matrix},
      {"stationary", "stationary distribution of one recurrent set", cmd_stationary},
      {"verify-conjecture", "compare stationary laws with the pattern-count weights", cmd_verify},
      {"partition", "N(k1, k2) for a sector or one recurrent set", cmd_partition},
      {"flux-theory", "mean flux from the partition function", cmd_flux_theory},
      {"diagram", "Monte Carlo fundamental diagram over the (m1, m110) grid", cmd_diagram},
      {"limit-check", "approach of the theoretical flux to the deterministic law as alpha -> 1",
       cmd_limit},
  };

  o.jobs = 1;
  std::string out_dir;
  try {
    o.jobs = env_size("RINGFLUX_JOBS", 1);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kExitUsage);
  }
  if (const char* d = std::getenv("RINGFLUX_OUT_DIR"); d && *d) out_dir = d;

  std::vector<std::pair<CLI::App*, Runner>> subs;
  for (const auto& [name, help, run] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--L", o.L, "ring length");
    sub->add_option("--m1", o.m1, "number of particles");
    sub->add_option("--m110", o.m110, "number of blocks of two or more particles");
    sub->add_option("--alpha", o.alphas, "alpha value(s), comma separated where a list is accepted")
        ->delimiter(',');
    sub->add_option("--format", o.format, "csv, json or text")
        ->check(CLI::IsMember({"csv", "json", "text"}));
    sub->add_option("--out", o.out, "output file ('-' for standard output)");
    sub->add_option("--jobs", o.jobs, "worker threads (default $RINGFLUX_JOBS or 1)");
    sub->add_option("--bound", o.bound, "largest L enumerated explicitly");
    if (name == "simulate" || name == "diagram") {
      sub->add_option("--rule", o.rule, "det, stoch-u or stoch-v")
          ->check(CLI::IsMember({"det", "stoch-u", "stoch-v"}));
      sub->add_option("--seed", o.seed, "base seed");
      sub->add_option("--steps", o.steps, "time steps per replicate (n_max)");
      sub->add_option("--burn-in", o.burn_in, "steps discarded before averaging");
      sub->add_option("--replicates", o.replicates, "independent replicates");
      sub->add_flag("--no-cycle-average", o.no_cycle_average,
                    "average deterministic runs over [burn-in, steps) instead of the detected cycle");
    }
    if (name == "simulate") {
      sub->add_option("--init", o.init, "initial configuration, e.g. 0011010111");
      sub->add_option("--space-time", o.space_time,
                      "also write replicate 0 as one configuration per line to this file");
    }
    if (name == "matrix" || name == "stationary" || name == "partition" || name == "flux-theory")
      sub->add_option("--omega", o.omega, "recurrent set number as printed by 'omega' (from 1)");
    if (name == "partition" || name == "flux-theory")
      sub->add_option("--scope", o.scope, "omega or sector")->check(CLI::IsMember({"omega", "sector"}));
    if (name == "verify-conjecture") sub->add_option("--tol", o.tolerance, "relative tolerance");
    subs.emplace_back(sub, run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto& [sub, run] : subs) {
      if (!sub->parsed()) continue;
      if (o.jobs == 0) throw UsageError("--jobs must be positive");
      const Artifact a = run(o);
      std::string where = o.out;
      if (o.out == "-") {
        std::cout << a.content;
        std::cerr << a.summary << '\n';
      } else {
        std::filesystem::path path = o.out;
        if (o.out.empty()) {
          const std::filesystem::path dir = out_dir.empty() ? "ringflux-out" : out_dir;
          std::filesystem::create_directories(dir);
          path = dir / (default_name(sub->get_name(), o) + a.extension);
        }
        write_atomic(path, a.content);
        std::cout << a.summary << " -> " << path.string() << '\n';
      }
      if (a.failed)
        return fail("verification-failed", "at least one recurrent set exceeded the tolerance",
                    kExitVerificationFailed);
    }
  } catch (const InfeasibleSector& e) {
    return fail("infeasible-sector", e.what(), kExitInfeasible);
  } catch (const std::invalid_argument& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const NumericalFailure& e) {
    return fail("numerical", e.what(), kExitNumerical);
  } catch (const IoError& e) {
    return fail("io", e.what(), kExitNumerical);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("io", e.what(), kExitNumerical);
  } catch (const InternalContradiction& e) {
    return fail("internal", e.what(), kExitInternal);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
  return 0;
}
