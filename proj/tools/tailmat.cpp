// tailmat command-line driver: simulate | mmatrix | spectra | ensemble |
// limits | tw | analyze.  A JSON config file describes the run; a few flags
// override config keys.  Exit codes: 0 ok, 2 config error, 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailmat/csv.hpp"
#include "tailmat/ensemble.hpp"
#include "tailmat/estim.hpp"
#include "tailmat/limits.hpp"
#include "tailmat/linfield.hpp"
#include "tailmat/tracy_widom.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tailmat;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

TailModel parse_noise(const json& j) {
  check_keys(j, "noise", {"kind", "alpha", "dof"});
  const std::string kind = j.value("kind", "");
  if (kind == "pareto") return TailModel::pareto(j.at("alpha").get<double>());
  if (kind == "student_t") return TailModel::student_t(j.at("dof").get<double>());
  if (kind == "three_point") return TailModel::three_point();
  if (kind == "normal") return TailModel::standard_normal();
  throw ConfigError("noise.kind must be pareto | student_t | three_point | normal");
}

json noise_to_json(const TailModel& m) {
  switch (m.kind()) {
    case NoiseKind::pareto_symmetric: return {{"kind", "pareto"}, {"alpha", m.tail_index()}};
    case NoiseKind::student_t: return {{"kind", "student_t"}, {"dof", m.tail_index()}};
    case NoiseKind::three_point: return {{"kind", "three_point"}};
    case NoiseKind::standard_normal: return {{"kind", "normal"}};
  }
  return {};
}

CoeffMatrix parse_coeffs(const json& j) {
  check_keys(j, "coeffs", {"kind", "entries", "theta", "c", "file"});
  const std::string kind = j.value("kind", "identity");
  if (kind == "identity") return CoeffMatrix::identity();
  if (kind == "entries") {
    std::vector<CoeffEntry> entries;
    for (const auto& row : j.at("entries")) {
      if (!row.is_array() || row.size() != 3) {
        throw ConfigError("coeffs.entries rows must be [k, l, h]");
      }
      entries.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
    }
    return CoeffMatrix(std::move(entries));
  }
  if (kind == "separable") {
    return CoeffMatrix::separable(j.at("theta").get<std::vector<double>>(),
                                  j.at("c").get<std::vector<double>>());
  }
  if (kind == "file") {
    // CSV triples k,l,h
    std::ifstream in(j.at("file").get<std::string>());
    if (!in) throw ConfigError("coeffs.file: cannot open");
    std::vector<CoeffEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      CoeffEntry e;
      if (std::sscanf(line.c_str(), "%d,%d,%lf", &e.k, &e.l, &e.value) == 3) entries.push_back(e);
    }
    return CoeffMatrix(std::move(entries));
  }
  throw ConfigError("coeffs.kind must be identity | entries | separable | file");
}

json coeffs_to_json(const CoeffMatrix& c) {
  json entries = json::array();
  for (const CoeffEntry& e : c.entries()) entries.push_back({e.k, e.l, e.value});
  return {{"kind", "entries"}, {"entries", entries}};
}

StatisticKind parse_statistic(const std::string& name) {
  if (name == "largest_normalized") return StatisticKind::largest_normalized;
  if (name == "kth_normalized") return StatisticKind::kth_normalized;
  if (name == "self_gap") return StatisticKind::self_gap;
  if (name == "ratio21") return StatisticKind::ratio21;
  if (name == "ratio21_pow_alpha_half") return StatisticKind::ratio21_pow_alpha_half;
  if (name == "trace_ratio") return StatisticKind::trace_ratio;
  if (name == "top1_minus_rowmax") return StatisticKind::top1_minus_rowmax;
  if (name == "top1_minus_z2max") return StatisticKind::top1_minus_z2max;
  if (name == "sup_error_delta") return StatisticKind::sup_error_delta;
  if (name == "sup_error_row") return StatisticKind::sup_error_row;
  if (name == "sup_error_col") return StatisticKind::sup_error_col;
  if (name == "tw_normalized") return StatisticKind::tw_normalized;
  throw ConfigError("ensemble.statistic: unknown statistic \"" + name + "\"");
}

// CDF factory for the KS comparison in `ensemble` and curves in `limits`
std::function<double(double)> parse_law(const json& j, std::string* name_out = nullptr) {
  check_keys(j, "law", {"kind", "theta", "alpha", "k", "i", "v1", "v2", "gamma", "cut"});
  const std::string kind = j.value("kind", "");
  if (name_out) *name_out = kind;
  if (kind == "frechet") {
    const double theta = j.at("theta").get<double>();
    return [theta](double x) { return x > 0 ? frechet_cdf(theta, x) : 0.0; };
  }
  if (kind == "kth_max") {
    const int k = j.at("k").get<int>();
    const double alpha = j.at("alpha").get<double>();
    return [k, alpha](double x) { return x > 0 ? kth_max_cdf(k, alpha, x) : 0.0; };
  }
  if (kind == "ratio_law") {
    const int i = j.at("i").get<int>();
    const double alpha = j.at("alpha").get<double>();
    return [i, alpha](double x) {
      if (x <= 0) return 0.0;
      if (x >= 1) return 1.0;
      return ratio_law_cdf(i, alpha, x);
    };
  }
  if (kind == "gap") {
    const GapLaw law = gap_limit(j.at("alpha").get<double>(), j.at("v1").get<double>(),
                                 j.at("v2").get<double>());
    return [law](double x) { return law.cdf(x); };
  }
  if (kind == "tw1") {
    auto tw = std::make_shared<TracyWidomF1>(solve_painleve());
    return [tw](double s) {
      if (s < -8.0) return 0.0;
      if (s > 6.0) return 1.0;
      return tw->cdf(s);
    };
  }
  if (kind == "truncated_uniform") {
    const double cut = j.at("cut").get<double>();
    return [cut](double x) {
      if (x < cut) return 0.0;
      return std::min(1.0, x);
    };
  }
  throw ConfigError("law.kind must be frechet | kth_max | ratio_law | gap | tw1 | truncated_uniform");
}

struct CommonConfig {
  json raw;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

void write_meta(const CommonConfig& cfg, const std::string& command, const json& effective) {
  json meta = effective;
  meta["command"] = command;
  meta["seed"] = cfg.seed;
  meta["output_dir"] = cfg.output_dir;
  write_text(fs::path(cfg.output_dir) / (command + "_meta.json"), meta.dump(2) + "\n");
}

FieldSpec parse_field(const json& cfg, std::uint64_t seed) {
  FieldSpec f;
  f.noise = cfg.contains("noise") ? parse_noise(cfg.at("noise")) : TailModel::pareto(1.6);
  f.coeffs = cfg.contains("coeffs") ? parse_coeffs(cfg.at("coeffs")) : CoeffMatrix::identity();
  f.p = cfg.value("p", 100);
  f.n = cfg.value("n", 500);
  f.s_max = cfg.value("s_max", 0);
  f.seed = seed;
  return f;
}

json field_to_json(const FieldSpec& f) {
  return {{"noise", noise_to_json(f.noise)},
          {"coeffs", coeffs_to_json(f.coeffs)},
          {"p", f.p},
          {"n", f.n},
          {"s_max", f.s_max}};
}

int cmd_simulate(const CommonConfig& cfg) {
  const FieldSpec field = parse_field(cfg.raw, cfg.seed);
  const FieldResult sim = simulate_field(field);
  const fs::path dir(cfg.output_dir);
  for (const Panel& panel : sim.x) {
    write_panel_csv((dir / ("x_s" + std::to_string(panel.lag) + ".csv")).string(), panel);
  }
  write_panel_csv((dir / "z_core.csv").string(), sim.z_core);
  write_meta(cfg, "simulate", field_to_json(field));
  return 0;
}

int cmd_mmatrix(const CommonConfig& cfg) {
  const FieldSpec field = parse_field(cfg.raw, cfg.seed);
  const int s_max = field.s_max;
  std::ostringstream out;
  out << "s,j,v_j,rank,frobenius\n";
  for (int s = 0; s <= s_max; ++s) {
    const MMatrix mm = m_matrix(field.coeffs, s);
    for (std::size_t jv = 0; jv < mm.singular.size(); ++jv) {
      out << s << "," << (jv + 1) << "," << format_double(mm.singular[jv]) << "," << mm.rank
          << "," << format_double(mm.frobenius()) << "\n";
    }
  }
  write_text(fs::path(cfg.output_dir) / "mmatrix.csv", out.str());
  write_meta(cfg, "mmatrix", field_to_json(field));
  return 0;
}

int cmd_spectra(const CommonConfig& cfg) {
  const FieldSpec field = parse_field(cfg.raw, cfg.seed);
  const FieldResult sim = simulate_field(field);
  const double a =
      field.noise.heavy_tailed()
          ? normalizing_a(field.noise, static_cast<std::uint64_t>(field.p) * field.n)
          : 0.0;
  const double a2 = a * a;
  std::ostringstream out;
  out << "replicate_id,s,i,lambda,normalized_lambda\n";
  for (int s = 0; s <= field.s_max; ++s) {
    std::vector<double> lam;
    if (s == 0) {
      lam = covariance_eigs(sim.x[0], a2).values;
    } else {
      lam = singular_values(autocov(sim.x[0], sim.x[static_cast<std::size_t>(s)]));
    }
    for (std::size_t i = 0; i < lam.size(); ++i) {
      out << 0 << "," << s << "," << (i + 1) << "," << format_double(lam[i]) << ","
          << format_double(a2 > 0 ? lam[i] / a2 : 0.0) << "\n";
    }
  }
  write_text(fs::path(cfg.output_dir) / "spectra.csv", out.str());
  write_meta(cfg, "spectra", field_to_json(field));
  return 0;
}

int cmd_ensemble(const CommonConfig& cfg) {
  const json& e = cfg.raw.contains("ensemble") ? cfg.raw.at("ensemble") : json::object();
  check_keys(e, "ensemble",
             {"replicates", "statistic", "k", "power", "law", "atom", "histogram_bins",
              "pp_x_grid"});
  EnsembleSpec spec;
  spec.field = parse_field(cfg.raw, cfg.seed);
  spec.base_seed = cfg.seed;
  spec.replicates = e.value("replicates", 100);
  spec.k = e.value("k", 1);
  spec.power = e.value("power", 1);
  spec.workers = cfg.workers;
  const std::string stat_name = e.value("statistic", "largest_normalized");

  const fs::path dir(cfg.output_dir);
  json summary;
  summary["statistic"] = stat_name;
  summary["replicates"] = spec.replicates;

  if (stat_name == "pp_counts") {
    const std::vector<double> grid = e.value("pp_x_grid", std::vector<double>{2.0, 4.0, 8.0});
    const PpCountSummary pp =
        pp_count_ensemble(spec.field, grid, spec.replicates, spec.base_seed, spec.workers);
    std::ostringstream out;
    out << "x,mean_count,limit_mean\n";
    for (std::size_t j = 0; j < pp.x.size(); ++j) {
      out << format_double(pp.x[j]) << "," << format_double(pp.mean_counts[j]) << ","
          << format_double(pp.limit[j]) << "\n";
    }
    write_text(dir / "pp_counts.csv", out.str());
    summary["pp_x"] = pp.x;
    summary["pp_mean_counts"] = pp.mean_counts;
    summary["pp_limit"] = pp.limit;
  } else if (stat_name == "approx_errors") {
    // per-index signed errors of the delta and row-sum approximations
    const double a = normalizing_a(spec.field.noise,
                                   static_cast<std::uint64_t>(spec.field.p) * spec.field.n);
    const double a2 = a * a;
    const std::vector<double> v0 = m_matrix(spec.field.coeffs, 0).singular;
    const int power = spec.power;
    const std::function<std::pair<std::vector<double>, std::vector<double>>(std::uint64_t)> fn =
        [&](std::uint64_t seed) {
          FieldSpec field = spec.field;
          field.seed = seed;
          const FieldResult sim = simulate_field(field);
          const SpectrumResult eigs = covariance_eigs(sim.x[0], a2);
          const OrderStats stats = order_stats(sim.z_core);
          const std::size_t m = eigs.values.size();
          const SupError d =
              sup_error(eigs, approx_set(stats, v0, ApproxKind::delta, m), a2, power);
          const SupError g =
              sup_error(eigs, approx_set(stats, v0, ApproxKind::gamma_right, m), a2, power);
          return std::make_pair(d.signed_errors, g.signed_errors);
        };
    const auto raw = run_replicates<std::pair<std::vector<double>, std::vector<double>>>(
        spec.replicates, spec.base_seed, spec.workers, fn);
    std::ostringstream out;
    out << "replicate_id,i,err_delta,err_gamma\n";
    std::size_t failures = 0;
    for (std::size_t r = 0; r < raw.size(); ++r) {
      if (!raw[r]) {
        ++failures;
        continue;
      }
      for (std::size_t i = 0; i < raw[r]->first.size(); ++i) {
        out << r << "," << (i + 1) << "," << format_double(raw[r]->first[i]) << ","
            << format_double(raw[r]->second[i]) << "\n";
      }
    }
    write_text(dir / "approx_errors.csv", out.str());
    summary["failures"] = failures;
  } else {
    spec.statistic = parse_statistic(stat_name);
    const EnsembleSummary res = run_ensemble(spec);
    summary["failures"] = res.failures;

    std::ostringstream values;
    values << "replicate_id,value\n";
    for (std::size_t r = 0; r < res.values.size(); ++r) {
      values << r << "," << format_double(res.values[r]) << "\n";
    }
    write_text(dir / "values.csv", values.str());

    const Histogram hist = histogram_fd(res.sorted, e.value("histogram_bins", 0));
    std::ostringstream hist_out;
    hist_out << "bin_lo,bin_hi,mass\n";
    for (std::size_t b = 0; b < hist.mass.size(); ++b) {
      hist_out << format_double(hist.lo + hist.width * static_cast<double>(b)) << ","
               << format_double(hist.lo + hist.width * static_cast<double>(b + 1)) << ","
               << format_double(hist.mass[b]) << "\n";
    }
    write_text(dir / "histogram.csv", hist_out.str());

    std::ostringstream kde_out;
    kde_out << "x,density\n";
    for (const auto& [x, dens] : kde_curve(res.sorted)) {
      kde_out << format_double(x) << "," << format_double(dens) << "\n";
    }
    write_text(dir / "density.csv", kde_out.str());

    if (e.contains("law")) {
      std::string law_name;
      const auto law = parse_law(e.at("law"), &law_name);
      summary["ks"] = ks_distance(res.sorted, law);
      summary["law"] = law_name;
    }
    if (e.contains("atom")) {
      check_keys(e.at("atom"), "ensemble.atom", {"location", "epsilon"});
      const double loc = e.at("atom").at("location").get<double>();
      const double eps = e.at("atom").value("epsilon", 0.01);
      summary["atom_location"] = loc;
      summary["atom_epsilon"] = eps;
      summary["atom_mass"] = atom_mass(res.sorted, loc, eps);
    }
  }

  json effective = field_to_json(spec.field);
  effective["ensemble"] = e;
  summary["config"] = effective;
  summary["seed"] = cfg.seed;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_meta(cfg, "ensemble", effective);
  return 0;
}

int cmd_limits(const CommonConfig& cfg) {
  const json& block = cfg.raw.contains("limits") ? cfg.raw.at("limits") : json::object();
  check_keys(block, "limits", {"law", "x_min", "x_max", "points", "mp_gamma"});
  const fs::path dir(cfg.output_dir);
  std::ostringstream out;
  if (block.contains("mp_gamma")) {
    const double gamma = block.at("mp_gamma").get<double>();
    const double lo = block.value("x_min", 0.0);
    const double hi = block.value("x_max", (1.0 + std::sqrt(gamma)) * (1.0 + std::sqrt(gamma)) + 0.5);
    const int points = block.value("points", 400);
    out << "x,density\n";
    for (int g = 0; g <= points; ++g) {
      const double x = lo + (hi - lo) * g / points;
      out << format_double(x) << "," << format_double(mp_density(gamma, x)) << "\n";
    }
    out << "# point_mass_at_zero," << format_double(mp_point_mass(gamma)) << "\n";
  } else {
    const auto law = parse_law(block.at("law"));
    const double lo = block.value("x_min", 0.01);
    const double hi = block.value("x_max", 10.0);
    const int points = block.value("points", 400);
    out << "x,cdf\n";
    for (int g = 0; g <= points; ++g) {
      const double x = lo + (hi - lo) * g / points;
      out << format_double(x) << "," << format_double(law(x)) << "\n";
    }
  }
  write_text(dir / "law.csv", out.str());
  write_meta(cfg, "limits", {{"limits", block}});
  return 0;
}

int cmd_tw(const CommonConfig& cfg) {
  const json& block = cfg.raw.contains("tw") ? cfg.raw.at("tw") : json::object();
  check_keys(block, "tw", {"s_min", "s_max", "step", "x0", "x_min", "h"});
  const double s_lo = block.value("s_min", -8.0);
  const double s_hi = block.value("s_max", 6.0);
  const double step = block.value("step", 0.1);
  const TracyWidomF1 tw(
      solve_painleve(block.value("x0", 8.0), block.value("x_min", -8.0), block.value("h", 2.5e-4)));
  std::ostringstream out;
  out << "s,F1\n";
  for (double s = s_lo; s <= s_hi + 1e-12; s += step) {
    out << format_double(s) << "," << format_double(tw.cdf(s)) << "\n";
  }
  write_text(fs::path(cfg.output_dir) / "tw.csv", out.str());
  write_meta(cfg, "tw", {{"tw", block}});
  return 0;
}

int cmd_analyze(const CommonConfig& cfg) {
  const json& block = cfg.raw.contains("analyze") ? cfg.raw.at("analyze") : json::object();
  check_keys(block, "analyze",
             {"input", "series_in_columns", "rank_transform", "hill_k", "ratio_rows",
              "band_alpha", "lamyao_s1"});
  if (!block.contains("input")) throw ConfigError("analyze.input is required");
  ReturnsReadReport report;
  const ReturnsPanel returns =
      read_returns_csv(block.at("input").get<std::string>(), block.value("series_in_columns", true), &report);
  const bool do_rank = block.value("rank_transform", true);
  const std::size_t hill_k =
      block.value("hill_k", 0) > 0
          ? static_cast<std::size_t>(block.at("hill_k").get<int>())
          : std::max<std::size_t>(2, static_cast<std::size_t>(0.05 * static_cast<double>(returns.n())));
  const fs::path dir(cfg.output_dir);

  // tail pairs on the raw returns
  std::ostringstream pairs_out;
  pairs_out << "series,alpha_lower,alpha_upper,k,lower_ok,upper_ok\n";
  const std::vector<TailIndexPair> pairs = tail_pairs(returns, hill_k);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string label = i < returns.labels.size() ? returns.labels[i] : std::to_string(i);
    pairs_out << label << "," << format_double(pairs[i].alpha_lower) << ","
              << format_double(pairs[i].alpha_upper) << "," << pairs[i].k << ","
              << pairs[i].lower_ok << "," << pairs[i].upper_ok << "\n";
  }
  write_text(dir / "tail_pairs.csv", pairs_out.str());

  // eigen-ratio report on the (optionally rank-transformed) panel
  Panel x;
  if (do_rank) {
    x = rank_transform(returns);
  } else {
    x.values = returns.values;
    x.role = PanelRole::returns_data;
  }
  const double band_alpha = block.value("band_alpha", 0.0) > 0.0
                                ? block.at("band_alpha").get<double>()
                                : (do_rank ? 1.0 : 2.3);
  const int ratio_rows =
      std::min<int>(block.value("ratio_rows", 30), static_cast<int>(returns.p()) - 1);
  std::ostringstream ratio_out;
  ratio_out << "i,log_ratio,band_low,band_median,band_high\n";
  for (const EigenRatioRow& row : eigen_ratio_report(x, ratio_rows, band_alpha)) {
    ratio_out << row.i << "," << format_double(row.observed_log_ratio) << ","
              << format_double(row.band_low) << "," << format_double(row.band_median) << ","
              << format_double(row.band_high) << "\n";
  }
  write_text(dir / "eigen_ratio.csv", ratio_out.str());

  // sums-of-squares comparison on the raw panel
  const int s1_max = block.value("lamyao_s1", 5);
  std::vector<Panel> lagged;
  const std::size_t usable = returns.n() - static_cast<std::size_t>(s1_max);
  for (int s = 0; s <= s1_max; ++s) {
    Panel lag;
    lag.values = Matrix(returns.p(), usable);
    lag.lag = s;
    for (std::size_t i = 0; i < returns.p(); ++i)
      for (std::size_t t = 0; t < usable; ++t)
        lag.values(i, t) = returns.values(i, t + static_cast<std::size_t>(s));
    lagged.push_back(std::move(lag));
  }
  std::ostringstream ly_out;
  ly_out << "s1,lambda1_of_sum,sum_of_lambda1,ratio\n";
  for (const LamYaoRow& row : lamyao_report(lagged)) {
    ly_out << row.s1 << "," << format_double(row.lambda1_of_sum) << ","
           << format_double(row.sum_of_lambda1) << "," << format_double(row.ratio) << "\n";
  }
  write_text(dir / "lamyao.csv", ly_out.str());

  json effective = {{"analyze", block}};
  effective["analyze"]["effective_hill_k"] = hill_k;
  effective["analyze"]["effective_band_alpha"] = band_alpha;
  effective["analyze"]["rejected_rows"] = report.rejected_rows;
  write_meta(cfg, "analyze", effective);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for heavy-tailed random matrix panels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::size_t> replicates_flag;
  unsigned workers = 1;
  app.add_option("--config,-c", config_path, "JSON config file")->capture_default_str();
  app.add_option("--out,-o", output_dir, "output directory (overrides config and TAILMAT_OUT_DIR)");
  app.add_option("--seed", seed_flag, "seed override");
  app.add_option("--replicates", replicates_flag, "ensemble replicate-count override");
  app.add_option("--workers", workers, "worker threads for ensemble runs");

  const std::vector<std::string> names = {"simulate", "mmatrix", "spectra", "ensemble",
                                          "limits",   "tw",      "analyze"};
  for (const std::string& n : names) app.add_subcommand(n)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CommonConfig cfg;
    cfg.raw = load_config(config_path);
    check_keys(cfg.raw, "config",
               {"command", "seed", "output_dir", "workers", "noise", "coeffs", "p", "n", "s_max",
                "ensemble", "limits", "tw", "analyze"});
    const std::string command = app.get_subcommands().front()->get_name();
    if (cfg.raw.contains("command") && cfg.raw.at("command").get<std::string>() != command) {
      throw ConfigError("config.command does not match the requested subcommand");
    }
    cfg.seed = seed_flag ? *seed_flag : cfg.raw.value("seed", 0ull);
    cfg.workers = workers > 1 ? workers : cfg.raw.value("workers", 1u);
    if (replicates_flag && cfg.raw.contains("ensemble")) {
      cfg.raw["ensemble"]["replicates"] = *replicates_flag;
    }
    if (!output_dir.empty()) {
      cfg.output_dir = output_dir;
    } else if (cfg.raw.contains("output_dir")) {
      cfg.output_dir = cfg.raw.at("output_dir").get<std::string>();
    } else if (const char* env = std::getenv("TAILMAT_OUT_DIR")) {
      cfg.output_dir = env;
    }
    fs::create_directories(cfg.output_dir);

    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "mmatrix") return cmd_mmatrix(cfg);
    if (command == "spectra") return cmd_spectra(cfg);
    if (command == "ensemble") return cmd_ensemble(cfg);
    if (command == "limits") return cmd_limits(cfg);
    if (command == "tw") return cmd_tw(cfg);
    if (command == "analyze") return cmd_analyze(cfg);
    throw ConfigError("unknown subcommand");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
