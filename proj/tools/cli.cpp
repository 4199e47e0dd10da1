#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "asep/distribution.hpp"
#include "asep/error.hpp"
#include "asep/fredholm.hpp"
#include "asep/identities.hpp"
#include "asep/simulator.hpp"

namespace asep::cli {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  } visitor;
  return std::visit(visitor, c);
}

json json_cell(const Cell& c) {
  return std::visit([](const auto& v) { return json(v); }, c);
}

std::string csv_body(const Table& table) {
  std::string s;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) s += ',';
    s += table.columns[i];
  }
  s += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += csv_cell(row[i]);
    }
    s += '\n';
  }
  return s;
}

long parse_long(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = std::strtoll(epoch, nullptr, 10);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["version"] = version;
  j["schema_version"] = schema_version;
  j["timestamp"] = timestamp;
  j["data_hash"] = data_hash;
  j["hash"] = determinism_hash();
  return j;
}

std::string RunManifest::determinism_hash() const {
  json j;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["version"] = version;
  j["schema_version"] = schema_version;
  j["data_hash"] = data_hash;
  return hex64(fnv1a(j.dump()));
}

std::vector<long> parse_int_grid(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty integer grid");
  // a leading '-' belongs to the first bound, so look for ':' after position 0
  const auto colon = text.find(':', 1);
  if (colon != std::string::npos) {
    const long a = parse_long(text.substr(0, colon));
    const long b = parse_long(text.substr(colon + 1));
    if (b < a) throw std::invalid_argument("range '" + text + "' is empty");
    if (b - a > 1000000) throw std::invalid_argument("range '" + text + "' is too long");
    std::vector<long> out;
    for (long v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::vector<long> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_long(part));
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty list");
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part));
  return out;
}

std::string emit_table(const Table& table, RunManifest manifest, Format format) {
  const std::string body = csv_body(table);
  manifest.data_hash = hex64(fnv1a(body));
  if (format == Format::json) {
    json j;
    j["manifest"] = manifest.to_json();
    j["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(1) + "\n";
  }
  const json m = manifest.to_json();
  std::string s;
  for (const auto& [key, value] : m.items())
    s += "# " + key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  return s + body;
}

namespace {

struct Common {
  double p = 0.3;
  std::string format = "csv";
  std::string precision = "auto";
  int nodes = 128;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--p", c.p, "right-hop probability, in (0,1)")->capture_default_str();
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--precision", c.precision,
                  "double, extended or auto (ASEP_FREDHOLM_PRECISION overrides)")
      ->check(CLI::IsMember({"double", "extended", "auto"}))
      ->capture_default_str();
  sub->add_option("--nodes", c.nodes, "xi-circle nodes")->capture_default_str();
}

Precision effective_precision(const Common& c) {
  return resolve_precision(parse_precision(c.precision));
}

json common_params(const Common& c) {
  json j;
  j["p"] = c.p;
  j["precision"] = to_string(effective_precision(c));
  j["nodes"] = c.nodes;
  return j;
}

KOptions engine_options(const Common& c) {
  KOptions k;
  k.nodes = c.nodes;
  k.precision = effective_precision(c);
  return k;
}

struct Output {
  Table table;
  RunManifest manifest;
  int exit_code = ExitCode::ok;
};

using Runner = std::function<Output()>;

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Step-initial ASEP: Fredholm-determinant CDFs, Monte Carlo, scaling limits"};
  app.name("asep");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  Runner runner;
  std::string x_grid, t_list, y_list = "-1,0,1", n_list = "1,2,3";
  int m = 1;
  bool no_error = false;

  // cdf
  auto* cdf = app.add_subcommand("cdf", "P(x_m(t) <= x) by the lambda contour, cross-checked by residues");
  add_common(cdf, common);
  cdf->add_option("--m", m, "particle rank")->capture_default_str();
  cdf->add_option("--x", x_grid, "sites: a:b or a,b,c")->required();
  cdf->add_option("--t", t_list, "times: comma list")->required();
  int lambda_nodes = 256;
  cdf->add_option("--lambda-nodes", lambda_nodes)->capture_default_str();
  cdf->add_flag("--no-error-estimate", no_error, "skip the node-doubling rerun");
  cdf->callback([&] {
    runner = [&] {
      Output o;
      const ModelParams params(common.p);
      const auto xs = parse_int_grid(x_grid);
      const auto ts = parse_real_list(t_list);
      CdfOptions opt;
      opt.engine = engine_options(common);
      opt.lambda_nodes = lambda_nodes;
      opt.estimate_error = !no_error;
      const bool residue_ok = std::abs(params.tau() - 1) > 1e-8;
      o.table.columns = {"x", "t", "value", "method", "err_estimate", "residue", "cross_check"};
      for (double t : ts)
        for (long x : xs) {
          const auto c = cdf_contour(params, m, x, t, opt);
          double res = std::nan(""), delta = std::nan("");
          if (residue_ok) {
            auto ropt = opt;
            ropt.estimate_error = false;
            res = cdf_residue(params, m, x, t, ropt).value;
            delta = std::abs(res - c.value);
          }
          o.table.rows.push_back({x, t, c.value, to_string(c.method), c.err_estimate, res, delta});
        }
      o.manifest.params = common_params(common);
      o.manifest.params["m"] = m;
      o.manifest.params["x"] = x_grid;
      o.manifest.params["t"] = t_list;
      o.manifest.params["lambda_nodes"] = lambda_nodes;
      o.manifest.params["error_estimate"] = !no_error;
      return o;
    };
  });

  // series
  auto* series = app.add_subcommand("series", "partial sums of the multiple-integral expansion");
  add_common(series, common);
  series->add_option("--m", m)->capture_default_str();
  series->add_option("--x", x_grid)->required();
  double t_single = 0.3;
  series->add_option("--t", t_single)->capture_default_str();
  int k_max = 3;
  series->add_option("--k-max", k_max, "largest order, <= 4")->capture_default_str();
  series->callback([&] {
    runner = [&] {
      Output o;
      const ModelParams params(common.p);
      const auto xs = parse_int_grid(x_grid);
      if (k_max < m) throw Error(ErrorKind::empty_sum, "the series starts at k = m");
      CdfOptions opt;
      opt.engine = engine_options(common);
      opt.estimate_error = false;
      o.table.columns = {"x", "k_max", "value", "term", "err_estimate", "contour", "abs_error"};
      for (long x : xs) {
        const double exact = cdf_contour(params, m, x, t_single, opt).value;
        for (int k = m; k <= k_max; ++k) {
          const auto s = cdf_series_partial(params, m, x, t_single, k);
          o.table.rows.push_back({x, static_cast<long>(k), s.value,
                                  s.diagnostics.at("term_" + std::to_string(k)), s.err_estimate,
                                  exact, std::abs(s.value - exact)});
        }
      }
      o.manifest.params = common_params(common);
      o.manifest.params["m"] = m;
      o.manifest.params["x"] = x_grid;
      o.manifest.params["t"] = t_single;
      o.manifest.params["k_max"] = k_max;
      return o;
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of P(x_m(t) <= x)");
  add_common(simulate, common);
  simulate->add_option("--m", m)->capture_default_str();
  simulate->add_option("--x", x_grid)->required();
  simulate->add_option("--t", t_single)->required();
  long trials = 200000;
  std::uint64_t seed = 0;
  std::optional<int> particles;
  double confidence = 0.9999;
  bool with_exact = false;
  simulate->add_option("--trials", trials)->capture_default_str();
  simulate->add_option("--seed", seed)->capture_default_str();
  simulate->add_option("--particles", particles, "truncation N (default m + ceil(3t) + 20)");
  simulate->add_option("--confidence", confidence)->capture_default_str();
  simulate->add_flag("--exact", with_exact, "add the determinant value and a CI check");
  simulate->callback([&] {
    runner = [&] {
      Output o;
      SimConfig cfg;
      cfg.params = ModelParams(common.p);
      cfg.m = m;
      cfg.t = t_single;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.particles = particles;
      cfg.confidence = confidence;
      auto xs = parse_int_grid(x_grid);
      std::sort(xs.begin(), xs.end());
      const auto e = empirical_cdf(cfg, xs);
      o.table.columns = {"x", "p_hat", "halfwidth", "wilson_lo", "wilson_hi"};
      if (with_exact) {
        o.table.columns.push_back("exact");
        o.table.columns.push_back("inside");
      }
      CdfOptions opt;
      opt.engine = engine_options(common);
      opt.estimate_error = false;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<Cell> row{xs[i], e.p_hat[i], e.halfwidth[i], e.wilson_lo[i], e.wilson_hi[i]};
        if (with_exact) {
          const double v = cdf_contour(cfg.params, m, xs[i], t_single, opt).value;
          row.emplace_back(v);
          row.emplace_back(v >= e.wilson_lo[i] - 1e-9 && v <= e.wilson_hi[i] + 1e-9);
        }
        o.table.rows.push_back(std::move(row));
      }
      o.manifest.seed = seed;
      o.manifest.params = common_params(common);
      o.manifest.params["m"] = m;
      o.manifest.params["x"] = x_grid;
      o.manifest.params["t"] = t_single;
      o.manifest.params["trials"] = trials;
      o.manifest.params["particles"] = cfg.particle_count();
      o.manifest.params["confidence"] = confidence;
      o.manifest.params["z"] = e.z;
      return o;
    };
  });

  // scaling
  auto* scaling = app.add_subcommand("scaling", "finite-t CDF at scaled sites against the limit law");
  add_common(scaling, common);
  scaling->add_option("--m", m)->capture_default_str();
  scaling->add_option("--y", y_list)->capture_default_str();
  std::string t_grid = "10,25,50";
  scaling->add_option("--t", t_grid)->capture_default_str();
  int z_nodes = 200;
  scaling->add_option("--z-nodes", z_nodes, "K0 interval nodes")->capture_default_str();
  scaling->callback([&] {
    runner = [&] {
      Output o;
      const ModelParams params(common.p);
      CdfOptions opt;
      opt.engine = engine_options(common);
      opt.estimate_error = false;
      LimitOptions lopt;
      lopt.nodes = z_nodes;
      lopt.estimate_error = false;
      o.table.columns = {"y", "t", "x", "finite", "limit", "deviation"};
      for (double y : parse_real_list(y_list)) {
        const double lim = limit_cdf(params, m, y, lopt).value;
        for (double t : parse_real_list(t_grid)) {
          const long x = scaled_site(params, {y, t});
          const double v = cdf_contour(params, m, x, t, opt).value;
          o.table.rows.push_back({y, t, x, v, lim, std::abs(v - lim)});
        }
      }
      o.manifest.params = common_params(common);
      o.manifest.params["m"] = m;
      o.manifest.params["y"] = y_list;
      o.manifest.params["t"] = t_grid;
      o.manifest.params["z_nodes"] = z_nodes;
      return o;
    };
  });

  // traces
  auto* traces = app.add_subcommand("traces", "tr K^n at scaled sites against the limit traces");
  add_common(traces, common);
  traces->add_option("--n", n_list)->capture_default_str();
  traces->add_option("--y", y_list)->capture_default_str();
  traces->add_option("--t", t_grid)->capture_default_str();
  traces->add_option("--z-nodes", z_nodes)->capture_default_str();
  traces->callback([&] {
    runner = [&] {
      Output o;
      const ModelParams params(common.p);
      const auto ns = parse_int_grid(n_list);
      o.table.columns = {"n", "y", "t", "x", "trace", "limit", "deviation"};
      for (long n : ns) {
        if (n < 1) throw std::invalid_argument("--n entries must be >= 1");
        for (double y : parse_real_list(y_list)) {
          const double lim = limit_trace(params, static_cast<int>(n), y, z_nodes);
          for (double t : parse_real_list(t_grid)) {
            const long x = scaled_site(params, {y, t});
            const double tr =
                trace_power(nystrom_K(params, x, t, engine_options(common)), static_cast<int>(n))
                    .real();
            o.table.rows.push_back({n, y, t, x, tr, lim, std::abs(tr - lim)});
          }
        }
      }
      o.manifest.params = common_params(common);
      o.manifest.params["n"] = n_list;
      o.manifest.params["y"] = y_list;
      o.manifest.params["t"] = t_grid;
      o.manifest.params["z_nodes"] = z_nodes;
      return o;
    };
  });

  // eigen
  auto* eigen = app.add_subcommand("eigen", "spectrum of K0 against tau^i / q");
  add_common(eigen, common);
  int count = 7;
  eigen->add_option("--count", count, "number of leading eigenvalues")->capture_default_str();
  eigen->add_option("--z-nodes", z_nodes)->capture_default_str();
  eigen->callback([&] {
    runner = [&] {
      Output o;
      const ModelParams params(common.p);
      const auto es = k0_eigensystem(nystrom_K0(params, std::nullopt, z_nodes));
      o.table.columns = {"i", "eigenvalue", "expected", "rel_error", "residual"};
      const int shown = std::min<int>(count, static_cast<int>(es.values.size()));
      for (int i = 0; i < shown; ++i) {
        const double expect = std::pow(params.tau(), i) / params.q();
        const double v = es.values[static_cast<std::size_t>(i)];
        const double res = i <= 8 ? eigenfunction_residual(params, i, z_nodes) : std::nan("");
        o.table.rows.push_back({static_cast<long>(i), v, expect, std::abs(v - expect) / expect, res});
      }
      o.manifest.params = common_params(common);
      o.manifest.params["count"] = count;
      o.manifest.params["z_nodes"] = z_nodes;
      return o;
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "identity checks and engine invariants");
  std::string suite = "all";
  std::uint64_t verify_seed = 7;
  verify->add_option("--suite", suite)
      ->check(CLI::IsMember({"identities", "engine", "all"}))
      ->capture_default_str();
  verify->add_option("--seed", verify_seed)->capture_default_str();
  verify->add_option("--format", common.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  verify->callback([&] {
    runner = [&] {
      Output o;
      std::vector<IdentityReport> reports;
      if (suite != "engine") reports = run_identity_suite(verify_seed);
      if (suite != "identities") {
        auto more = run_engine_invariants();
        reports.insert(reports.end(), more.begin(), more.end());
      }
      o.table.columns = {"name", "samples", "max_rel_error", "tolerance", "pass", "worst_case"};
      for (const auto& r : reports) {
        o.table.rows.push_back({r.name, static_cast<long>(r.sample_count), r.max_relative_error,
                                r.tolerance, r.pass, r.worst_case_input});
        if (!r.pass) o.exit_code = ExitCode::verify_failed;
      }
      o.manifest.seed = verify_seed;
      o.manifest.params["suite"] = suite;
      return o;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ExitCode::ok;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto selected = app.get_subcommands();
    err << (selected.empty() ? app.help() : selected.front()->help());
    return ExitCode::bad_arguments;
  }

  try {
    if (!(common.p > 0 && common.p < 1))
      throw Error(ErrorKind::invalid_argument, "--p must lie in (0, 1)");
    Output o = runner();
    o.manifest.command = app.get_subcommands().front()->get_name();
    o.manifest.timestamp = current_timestamp();
    out << emit_table(o.table, o.manifest,
                      common.format == "json" ? Format::json : Format::csv);
    return o.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical_failure(e.kind()) ? ExitCode::numerical_failure : ExitCode::bad_arguments;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::bad_arguments;
  } catch (const std::out_of_range& e) {
    err << "error: value out of range: " << e.what() << "\n";
    return ExitCode::bad_arguments;
  }
}

}  // namespace asep::cli
