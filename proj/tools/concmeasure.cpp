// Command-line driver: estimate concentration on a dataset, sweep
// convergence curves, generate synthetic Gaussian data, or query the
// analytic Gaussian oracle.

#include "CLI11.hpp"
#include "json.hpp"

#include "conc/analytic.hpp"
#include "conc/core.hpp"
#include "conc/data.hpp"
#include "conc/eval.hpp"
#include "conc/geometry.hpp"
#include "conc/search.hpp"
#include "conc/version.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 2 flag errors, 3 data errors, 4 unsupported
// covariance/metric combinations.
class FlagError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_pct(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

conc::LpMetric parse_metric(const std::string& name) {
  if (name == "l1") return conc::LpMetric::l1();
  if (name == "l2") return conc::LpMetric::l2();
  if (name == "l4") return conc::LpMetric::lp(4.0);
  if (name == "linf") return conc::LpMetric::linf();
  throw FlagError("unknown metric '" + name + "' (expected l1, l2, l4 or linf)");
}

double parse_double(const std::string& text, const char* what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw FlagError(std::string("invalid ") + what + ": '" + text + "'");
  }
  return value;
}

// epsilon accepts fractional literals like "8/255" so pixel budgets are
// expressible verbatim.
double parse_eps(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    const double v = parse_double(text, "epsilon");
    if (!(v >= 0.0)) throw FlagError("epsilon must be >= 0");
    return v;
  }
  const double num = parse_double(text.substr(0, slash), "epsilon numerator");
  const double den = parse_double(text.substr(slash + 1), "epsilon denominator");
  if (!(den > 0.0) || !(num >= 0.0)) throw FlagError("invalid epsilon fraction: '" + text + "'");
  return num / den;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(text.substr(start, comma == std::string::npos ? std::string::npos
                                                                : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw FlagError(std::string("invalid ") + what + " entry: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw FlagError(std::string(what) + " must be non-empty");
  return out;
}

conc::Vector parse_vector_file(const fs::path& path) {
  const conc::Dataset d = conc::data::load_csv(path, false);
  if (d.m() == 1) return d.samples().row(0).transpose();
  if (d.n() == 1) return d.samples().col(0);
  throw FlagError("expected a single row or column of numbers in " + path.string());
}

conc::Matrix parse_matrix_file(const fs::path& path) {
  return conc::data::load_csv(path, false).samples();
}

// --cov accepts spherical:<sigma^2>, diag:<csv or path> and full:<path>.
conc::analytic::GaussianSpec parse_gaussian_spec(const std::string& cov_text,
                                                 const std::string& mean_text,
                                                 std::optional<conc::Index> dim_hint) {
  const auto colon = cov_text.find(':');
  if (colon == std::string::npos) {
    throw FlagError("invalid covariance spec '" + cov_text +
                    "' (expected spherical:<v>, diag:<csv|path> or full:<path>)");
  }
  const std::string kind = cov_text.substr(0, colon);
  const std::string arg = cov_text.substr(colon + 1);

  auto mean_for = [&](conc::Index n) -> conc::Vector {
    if (mean_text == "zero") return conc::Vector::Zero(n);
    conc::Vector theta = parse_vector_file(mean_text);
    if (theta.size() != n) throw FlagError("--mean dimension does not match covariance");
    return theta;
  };

  if (kind == "spherical") {
    const double variance = parse_double(arg, "spherical variance");
    if (!(variance > 0.0)) throw FlagError("spherical variance must be > 0");
    const conc::Index n = dim_hint.value_or(1);
    return conc::analytic::GaussianSpec::spherical(mean_for(n), variance);
  }
  if (kind == "diag") {
    conc::Vector variances;
    if (arg.find(',') != std::string::npos || !fs::exists(arg)) {
      const auto items = split_list(arg);
      variances.resize(static_cast<conc::Index>(items.size()));
      for (std::size_t i = 0; i < items.size(); ++i) {
        variances[static_cast<conc::Index>(i)] = parse_double(items[i], "diagonal variance");
      }
    } else {
      variances = parse_vector_file(arg);
    }
    if (dim_hint && variances.size() != *dim_hint) {
      throw FlagError("--dim does not match the diagonal covariance length");
    }
    const conc::Index n = variances.size();
    return conc::analytic::GaussianSpec::diagonal(mean_for(n), std::move(variances));
  }
  if (kind == "full") {
    conc::Matrix sigma = parse_matrix_file(arg);
    if (dim_hint && sigma.rows() != *dim_hint) {
      throw FlagError("--dim does not match the covariance file");
    }
    const conc::Index n = sigma.rows();
    try {
      return conc::analytic::GaussianSpec::full(mean_for(n), std::move(sigma));
    } catch (const std::invalid_argument& e) {
      throw FlagError(std::string("invalid full covariance: ") + e.what());
    }
  }
  throw FlagError("unknown covariance kind '" + kind + "'");
}

conc::Dataset load_dataset(const std::string& format, const std::string& data_flag,
                           bool csv_header) {
  if (format == "idx") {
    const auto parts = split_list(data_flag);
    conc::Dataset merged = conc::data::load_idx(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const conc::Dataset next = conc::data::load_idx(parts[i]);
      if (next.n() != merged.n()) {
        throw conc::DataError("IDX files disagree on sample dimension");
      }
      conc::Matrix all(merged.m() + next.m(), merged.n());
      all.topRows(merged.m()) = merged.samples();
      all.bottomRows(next.m()) = next.samples();
      merged = conc::Dataset(std::move(all), merged.source() + "," + next.source());
    }
    return merged;
  }
  if (format == "cifar") {
    std::vector<fs::path> paths;
    for (const auto& part : split_list(data_flag)) paths.emplace_back(part);
    return conc::data::load_cifar10(paths);
  }
  if (format == "csv") return conc::data::load_csv(data_flag, csv_header);
  if (format == "gauss-bin") return conc::data::load_gauss_bin(data_flag);
  throw FlagError("unknown format '" + format + "'");
}

struct ProblemFlags {
  std::string data;
  std::string format;
  std::string metric = "linf";
  double alpha = 0.0;
  std::string eps;
  std::string exponents = "1,2,4,8,16,32,64";
  bool csv_header = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "dataset path (comma-separated for idx/cifar)")->required();
    cmd->add_option("--format", format, "dataset format")
        ->required()
        ->check(CLI::IsMember({"idx", "cifar", "csv", "gauss-bin"}));
    cmd->add_option("--metric", metric, "perturbation norm")
        ->check(CLI::IsMember({"l1", "l2", "l4", "linf"}));
    cmd->add_option("--alpha", alpha, "risk threshold in (0, 1)")->required();
    cmd->add_option("--eps", eps, "perturbation budget (real or fraction like 8/255)")
        ->required();
    cmd->add_option("--exponents", exponents, "candidate exponent schedule");
    cmd->add_flag("--csv-header", csv_header, "skip the first CSV line");
  }

  conc::search::SearchConfig make_config() const {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw FlagError("--alpha must be in (0, 1)");
    conc::search::SearchConfig cfg(
        conc::ConcentrationProblem(alpha, parse_eps(eps), parse_metric(metric)));
    cfg.exponent_schedule = parse_int_list(exponents, "--exponents");
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw FlagError(e.what());
    }
    return cfg;
  }
};

json trial_to_json(int index, const conc::ConcentrationEstimate& est) {
  const conc::Vector& w = est.half_space.weight();
  conc::Index nnz = 0;
  for (conc::Index j = 0; j < w.size(); ++j) {
    if (std::abs(w[j]) > 1e-12) ++nnz;
  }
  return json{{"trial", index},
              {"train_risk", est.train_risk},
              {"train_adv_risk", est.train_adv_risk},
              {"test_risk", est.test_risk},
              {"test_adv_risk", est.test_adv_risk},
              {"b", est.half_space.bias()},
              {"w_nnz", nnz},
              {"w_l1", w.cwiseAbs().sum()}};
}

void write_text_report(const fs::path& path, const json& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw conc::DataError("cannot open report file for writing: " + path.string());
  out << "# concmeasure " << report.at("command").get<std::string>() << " report\n";
  out << "version=" << report.at("version").get<std::string>() << "\n";
  for (const auto& [key, value] : report.at("flags").items()) {
    out << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
  for (const auto& [key, value] : report.at("dataset").items()) {
    out << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
  for (const auto& t : report.at("trials")) {
    out << "trial=" << t.at("trial").get<int>()
        << " train_risk=" << fmt_g(t.at("train_risk").get<double>())
        << " train_adv_risk=" << fmt_g(t.at("train_adv_risk").get<double>())
        << " test_risk=" << fmt_g(t.at("test_risk").get<double>())
        << " test_adv_risk=" << fmt_g(t.at("test_adv_risk").get<double>())
        << " b=" << fmt_g(t.at("b").get<double>())
        << " w_nnz=" << t.at("w_nnz").get<long long>()
        << " w_l1=" << fmt_g(t.at("w_l1").get<double>()) << "\n";
  }
  const auto& s = report.at("summary");
  out << "mean_test_risk=" << fmt_g(s.at("mean_test_risk").get<double>()) << "\n";
  out << "std_test_risk=" << fmt_g(s.at("std_test_risk").get<double>()) << "\n";
  out << "mean_test_adv_risk=" << fmt_g(s.at("mean_test_adv_risk").get<double>()) << "\n";
  out << "std_test_adv_risk=" << fmt_g(s.at("std_test_adv_risk").get<double>()) << "\n";
  out << "table_pct=test_risk " << fmt_pct(s.at("mean_test_risk").get<double>()) << " +/- "
      << fmt_pct(s.at("std_test_risk").get<double>()) << " | test_adv_risk "
      << fmt_pct(s.at("mean_test_adv_risk").get<double>()) << " +/- "
      << fmt_pct(s.at("std_test_adv_risk").get<double>()) << "\n";
}

void write_json_sibling(const fs::path& out_path, const json& report) {
  fs::path json_path = out_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw conc::DataError("cannot open report file for writing: " + json_path.string());
  out << report.dump(2) << "\n";
}

int cmd_estimate(const ProblemFlags& flags, int trials, double split_fraction,
                 std::uint64_t seed, const std::string& out) {
  if (trials < 1) throw FlagError("--trials must be >= 1");
  if (!(split_fraction > 0.0) || !(split_fraction < 1.0)) {
    throw FlagError("--split must be in (0, 1)");
  }
  const auto cfg = flags.make_config();
  const conc::Dataset dataset = load_dataset(flags.format, flags.data, flags.csv_header);
  const conc::TrialReport report =
      conc::eval::run_trials(dataset, cfg, trials, seed, split_fraction);

  json doc;
  doc["version"] = conc::kVersion;
  doc["command"] = "estimate";
  doc["flags"] = json{{"data", flags.data},       {"format", flags.format},
                      {"metric", flags.metric},   {"alpha", flags.alpha},
                      {"eps", flags.eps},         {"eps_value", parse_eps(flags.eps)},
                      {"trials", trials},         {"split", split_fraction},
                      {"seed", seed},             {"exponents", flags.exponents}};
  doc["dataset"] = json{{"m", dataset.m()}, {"n", dataset.n()}, {"source", dataset.source()}};
  doc["trials"] = json::array();
  for (std::size_t i = 0; i < report.estimates.size(); ++i) {
    doc["trials"].push_back(trial_to_json(static_cast<int>(i), report.estimates[i]));
  }
  doc["summary"] = json{{"mean_test_risk", report.mean_test_risk},
                        {"std_test_risk", report.std_test_risk},
                        {"mean_test_adv_risk", report.mean_test_adv_risk},
                        {"std_test_adv_risk", report.std_test_adv_risk}};

  write_text_report(out, doc);
  write_json_sibling(out, doc);
  std::cout << "test_risk=" << fmt_g(report.mean_test_risk)
            << " test_adv_risk=" << fmt_g(report.mean_test_adv_risk) << "\n";
  return 0;
}

int cmd_converge(const ProblemFlags& flags, const std::string& sizes_text, int test_size,
                 int trials, std::uint64_t seed, const std::string& analytic_cov,
                 const std::string& out) {
  if (trials < 1) throw FlagError("--trials must be >= 1");
  if (test_size < 1) throw FlagError("--test-size must be >= 1");
  const auto cfg = flags.make_config();

  std::vector<conc::Index> sizes;
  for (int v : parse_int_list(sizes_text, "--sizes")) {
    if (v < 2) throw FlagError("--sizes entries must be >= 2");
    sizes.push_back(v);
  }

  std::optional<double> analytic_value;
  if (!analytic_cov.empty()) {
    const auto spec = parse_gaussian_spec(analytic_cov, "zero", std::nullopt);
    analytic_value = conc::analytic::gii_lower_bound(spec, flags.alpha, parse_eps(flags.eps),
                                                     parse_metric(flags.metric));
  }

  const conc::Dataset dataset = load_dataset(flags.format, flags.data, flags.csv_header);
  const auto points =
      conc::eval::convergence_sweep(dataset, cfg, sizes, test_size, trials, seed);

  std::ofstream csv(out, std::ios::trunc);
  if (!csv) throw conc::DataError("cannot open output file for writing: " + out);
  csv << "train_size,mean_adv_risk,std_adv_risk,trials";
  if (analytic_value) csv << ",analytic";
  csv << "\n";
  for (const auto& pt : points) {
    csv << pt.train_size << "," << fmt_g(pt.mean_test_adv_risk) << ","
        << fmt_g(pt.std_test_adv_risk) << "," << pt.trials;
    if (analytic_value) csv << "," << fmt_g(*analytic_value);
    csv << "\n";
  }
  std::cout << "wrote " << points.size() << " points to " << out << "\n";
  return 0;
}

int cmd_synth(int dim, int count, const std::string& cov, const std::string& mean,
              std::uint64_t seed, const std::string& out) {
  if (dim < 1) throw FlagError("--dim must be >= 1");
  if (count < 1) throw FlagError("--n must be >= 1");
  const auto spec = parse_gaussian_spec(cov, mean, static_cast<conc::Index>(dim));
  const conc::Dataset dataset =
      conc::data::sample_gaussian(spec, static_cast<conc::Index>(count), seed);
  conc::data::save_gauss_bin(dataset, out);
  std::cout << "wrote " << dataset.m() << "x" << dataset.n() << " samples to " << out << "\n";
  return 0;
}

int cmd_analytic(double alpha, const std::string& eps_text, const std::string& metric_name,
                 const std::string& cov, const std::string& mean,
                 std::optional<conc::Index> dim) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw FlagError("--alpha must be in (0, 1)");
  if (dim && *dim < 1) throw FlagError("--dim must be >= 1");
  const double eps = parse_eps(eps_text);
  const auto metric = parse_metric(metric_name);
  const auto spec = parse_gaussian_spec(cov, mean, dim);

  double bound = 0.0;
  try {
    bound = conc::analytic::gii_lower_bound(spec, alpha, eps, metric);
  } catch (const std::domain_error& e) {
    // p < 2 is outside the theorem's hypothesis: an unsupported combination.
    throw conc::UnsupportedStructure(e.what());
  }

  std::ostringstream line;
  line << "gii_lower_bound=" << fmt_g(bound) << " alpha=" << fmt_g(alpha)
       << " eps=" << eps_text << " metric=" << metric_name << " cov=" << cov;
  try {
    const conc::HalfSpace h = conc::analytic::optimal_halfspace(spec, alpha, metric);
    conc::Index axis = -1;
    conc::Index nnz = 0;
    for (conc::Index j = 0; j < h.dim(); ++j) {
      if (h.weight()[j] != 0.0) {
        ++nnz;
        axis = j;
      }
    }
    if (nnz == 1 && std::abs(h.weight()[axis]) == 1.0) {
      line << " optimal_w=" << (h.weight()[axis] > 0 ? "e" : "-e") << axis;
    } else if (h.dim() <= 16) {
      line << " optimal_w=[";
      for (conc::Index j = 0; j < h.dim(); ++j) {
        line << (j ? "," : "") << fmt_g(h.weight()[j]);
      }
      line << "]";
    } else {
      line << " optimal_w=v1";
    }
    line << " optimal_b=" << fmt_g(h.bias());
  } catch (const conc::UnsupportedStructure&) {
    // bound holds but no closed-form optimal set; print the bound alone
  }
  std::cout << line.str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concmeasure: empirical concentration of measure via half spaces"};
  app.require_subcommand(1);

  auto* est = app.add_subcommand("estimate", "estimate concentration on a dataset");
  ProblemFlags est_flags;
  est_flags.add_to(est);
  int est_trials = 5;
  double est_split = 0.5;
  std::uint64_t est_seed = 0;
  std::string est_out;
  est->add_option("--trials", est_trials, "number of train/test split trials");
  est->add_option("--split", est_split, "train fraction of each split");
  est->add_option("--seed", est_seed, "base RNG seed");
  est->add_option("--out", est_out, "report path (a .json sibling is written too)")->required();

  auto* conv = app.add_subcommand("converge", "sweep estimate quality over training sizes");
  ProblemFlags conv_flags;
  conv_flags.add_to(conv);
  std::string conv_sizes;
  int conv_test_size = 30000;
  int conv_trials = 5;
  std::uint64_t conv_seed = 0;
  std::string conv_analytic_cov;
  std::string conv_out;
  conv->add_option("--sizes", conv_sizes, "comma-separated training sizes")->required();
  conv->add_option("--test-size", conv_test_size, "held-out evaluation size");
  conv->add_option("--trials", conv_trials, "trials per size");
  conv->add_option("--seed", conv_seed, "base RNG seed");
  conv->add_option("--analytic-cov", conv_analytic_cov,
                   "emit an analytic column for this Gaussian covariance");
  conv->add_option("--out", conv_out, "CSV output path")->required();

  auto* synth = app.add_subcommand("synth", "sample a synthetic Gaussian dataset");
  int synth_dim = 0;
  int synth_n = 0;
  std::string synth_cov;
  std::string synth_mean = "zero";
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--dim", synth_dim, "sample dimension")->required();
  synth->add_option("--n", synth_n, "number of samples")->required();
  synth->add_option("--cov", synth_cov, "spherical:<v> | diag:<csv|path> | full:<path>")
      ->required();
  synth->add_option("--mean", synth_mean, "zero | <path>");
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--out", synth_out, "gauss-bin output path")->required();

  auto* ana = app.add_subcommand("analytic", "query the Gaussian concentration oracle");
  double ana_alpha = 0.0;
  std::string ana_eps;
  std::string ana_metric = "linf";
  std::string ana_cov;
  std::string ana_mean = "zero";
  int ana_dim = 1;
  ana->add_option("--alpha", ana_alpha, "set measure in (0, 1)")->required();
  ana->add_option("--eps", ana_eps, "perturbation budget")->required();
  ana->add_option("--metric", ana_metric, "perturbation norm")
      ->check(CLI::IsMember({"l1", "l2", "l4", "linf"}));
  ana->add_option("--cov", ana_cov, "spherical:<v> | diag:<csv|path> | full:<path>")->required();
  ana->add_option("--mean", ana_mean, "zero | <path>");
  ana->add_option("--dim", ana_dim, "dimension for spherical covariance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (est->parsed()) return cmd_estimate(est_flags, est_trials, est_split, est_seed, est_out);
    if (conv->parsed()) {
      return cmd_converge(conv_flags, conv_sizes, conv_test_size, conv_trials, conv_seed,
                          conv_analytic_cov, conv_out);
    }
    if (synth->parsed()) {
      return cmd_synth(synth_dim, synth_n, synth_cov, synth_mean, synth_seed, synth_out);
    }
    if (ana->parsed()) {
      const std::optional<conc::Index> dim =
          ana->count("--dim") ? std::optional<conc::Index>(ana_dim) : std::nullopt;
      return cmd_analytic(ana_alpha, ana_eps, ana_metric, ana_cov, ana_mean, dim);
    }
  } catch (const FlagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const conc::UnsupportedStructure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const conc::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
