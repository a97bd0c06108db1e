// qss: Monte Carlo sampling from the quantum state space.
//
// Subcommands: sample (rejection / importance / MCMC draws from prior or
// posterior targets), check (physicality of a probability vector), analyze
// (purity, size curves, separability), bench (strategy comparison).

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qss/qss.hpp"

using nlohmann::json;
using namespace qss;

namespace {

Pom pom_by_name(const std::string& name) {
  if (name == "trine") return make_trine();
  if (name == "antitrine") return make_antitrine();
  if (name == "tetra") return make_tetrahedron();
  if (name == "tetra2") return make_tetra_pair();
  if (name == "tat") return make_tat();
  throw std::invalid_argument("unknown POM: " + name);
}

ProbVector parse_point(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  ProbVector p = Eigen::Map<ProbVector>(vals.data(), vals.size());
  require_prob_vector(p, 1e-6);
  return p / p.sum();
}

json meta_json(const SampleMeta& meta, const json& config, std::size_t count) {
  return json{{"meta",
               {{"method", meta.method},
                {"pom", meta.pom_name},
                {"target", meta.target},
                {"seed", meta.seed},
                {"acceptance_rate", meta.acceptance_rate},
                {"proposals_total", meta.proposals_total},
                {"ess", meta.ess},
                {"sigma_final", meta.sigma_final},
                {"rng", meta.rng_name},
                {"count", count},
                {"config", config},
                {"version", "0.1.0"}}}};
}

void write_jsonl(const std::string& path, const WeightedSample& sample,
                 const std::optional<Dataset>& data, const json& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << meta_json(sample.meta, config, sample.points.size()).dump() << "\n";
  for (std::size_t j = 0; j < sample.points.size(); ++j) {
    json rec;
    rec["p"] = std::vector<double>(sample.points[j].begin(), sample.points[j].end());
    rec["w"] = sample.weights[j];
    if (data)
      rec["logL"] = log_likelihood(sample.points[j], *data);
    else
      rec["logL"] = nullptr;
    out << rec.dump() << "\n";
  }
}

struct LoadedSample {
  WeightedSample sample;
  json meta;
};

LoadedSample read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  LoadedSample out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    if (first && rec.contains("meta")) {
      out.meta = rec["meta"];
      first = false;
      continue;
    }
    first = false;
    std::vector<double> pv = rec.at("p").get<std::vector<double>>();
    out.sample.points.push_back(Eigen::Map<ProbVector>(pv.data(), pv.size()));
    out.sample.weights.push_back(rec.value("w", 1.0));
  }
  if (out.sample.points.empty()) throw std::runtime_error("no points in " + path);
  return out;
}

void print_report(const SampleMeta& meta, std::size_t count, double seconds) {
  std::fprintf(stderr,
               "qss: method=%s pom=%s target=%s points=%zu proposals=%ld "
               "acceptance=%.6g ess=%.6g rng=%s wall=%.2fs\n",
               meta.method.c_str(), meta.pom_name.c_str(), meta.target.c_str(),
               count, meta.proposals_total, meta.acceptance_rate, meta.ess,
               meta.rng_name.c_str(), seconds);
}

int cmd_sample(const std::string& pom_name, const std::string& target_name,
               const std::string& data_csv, const std::string& method, long n,
               std::uint64_t seed, double sigma, bool tune, long burn_in,
               long thinning, const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  Pom pom = pom_by_name(pom_name);
  std::optional<Dataset> data;
  if (!data_csv.empty()) data = Dataset::parse_csv(data_csv);
  TargetKind kind = parse_target_kind(target_name);
  TargetDensity target = TargetDensity::make(kind, data);

  json config{{"subcommand", "sample"}, {"pom", pom_name},
              {"target", target_name},  {"data", data_csv},
              {"method", method},       {"n", n},
              {"seed", seed},           {"sigma", sigma},
              {"tune", tune},           {"burn_in", burn_in},
              {"thinning", thinning}};

  Rng rng(seed);
  PhysicalityChecker checker(pom);
  WeightedSample sample;

  if (method == "reject") {
    double bound = 0.0;
    if (prior_of(kind) == PriorKind::Jeffreys)
      bound += jeffreys_log_cap(pom.outcome_count());
    if (is_posterior(kind)) {
      auto [p_ml, logl_max] = maximize_likelihood(*data, pom);
      (void)p_ml;
      bound += logl_max;
    }
    sample = rejection_sample(target, checker, n, rng, bound);
  } else if (method == "importance") {
    sample = importance_sample(target, checker, n, rng);
  } else if (method == "mcmc") {
    ChainConfig cfg;
    cfg.thinning = thinning;
    cfg.burn_in = burn_in >= 0 ? burn_in : (n * thinning + 8) / 9;  // ~10% of M
    cfg.length = cfg.burn_in + n * thinning;
    cfg.tune = tune || sigma <= 0.0;
    cfg.step_sigma = sigma > 0.0 ? sigma : 0.1;
    cfg.seed = seed;
    sample = xmhmc_sample(target, checker, cfg, rng);
  } else if (method == "ginibre" || method == "prior1") {
    // state-space shortcuts; map states to probabilities through the POM
    sample.meta.method = method;
    sample.meta.pom_name = pom.name();
    sample.meta.target = target_name;
    for (long i = 0; i < n; ++i) {
      DensityOperator rho = method == "ginibre" ? sample_ginibre(pom.dim(), rng)
                                                : sample_prior_one(pom.dim(), rng);
      sample.points.push_back(born_probabilities(rho, pom));
      sample.weights.push_back(1.0);
    }
    sample.meta.proposals_total = n;
    sample.meta.acceptance_rate = 1.0;
    sample.meta.ess = static_cast<double>(n);
  } else {
    throw std::invalid_argument("unknown method: " + method);
  }
  sample.meta.seed = seed;

  write_jsonl(out_path, sample, data, config);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_report(sample.meta, sample.points.size(), secs);
  return 0;
}

int cmd_check(const std::string& pom_name, const std::string& point_csv) {
  Pom pom = pom_by_name(pom_name);
  ProbVector p = parse_point(point_csv);
  if (p.size() != pom.outcome_count())
    throw std::invalid_argument("point length does not match POM outcomes");
  PhysicalityChecker checker(pom);
  const bool physical = checker.is_physical(p);
  AscentResult r = maximize_q(p, pom);
  std::printf("%s q_max=%.10g\n", physical ? "physical" : "unphysical", r.q_max);
  return physical ? 0 : 1;
}

int cmd_analyze_purity(const std::string& in_path, const std::string& prior,
                       int dim, int bins, const std::string& out_path) {
  LoadedSample in = read_jsonl(in_path);
  Pom pom = pom_by_name(in.meta.at("pom").get<std::string>());
  Histogram h = purity_histogram(in.sample, pom, bins);
  PriorLabel label = prior == "I" ? PriorLabel::I : PriorLabel::II;

  std::ofstream out(out_path);
  out << "bin_center,empirical_density,analytic_density_or_NA\n";
  for (std::size_t b = 0; b < h.centers.size(); ++b) {
    out << h.centers[b] << "," << h.densities[b] << ",";
    try {
      PurityDensityValue v = analytic_purity_density(label, dim, h.centers[b]);
      if (v.normalized)
        out << v.value;
      else
        out << "NA";
    } catch (const std::invalid_argument&) {
      out << "NA";
    }
    out << "\n";
  }
  return 0;
}

int cmd_analyze_size_curve(const std::string& in_path, const std::string& data_csv,
                           const std::string& pom_name, const std::string& out_path) {
  LoadedSample in = read_jsonl(in_path);
  Dataset data = Dataset::parse_csv(data_csv);
  const std::string name =
      pom_name.empty() ? in.meta.at("pom").get<std::string>() : pom_name;
  SizeCurve curve = size_curve(in.sample, data, pom_by_name(name));
  std::ofstream out(out_path);
  out << "lambda,size,std_error\n";
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
    out << curve.lambdas[i] << "," << curve.sizes[i] << "," << curve.std_errors[i]
        << "\n";
  std::fprintf(stderr, "qss: logL_max=%.10g ess=%.6g\n", curve.logl_max, curve.ess);
  return 0;
}

int cmd_analyze_separable(const std::string& in_path, int bins,
                          const std::string& out_path) {
  LoadedSample in = read_jsonl(in_path);
  Pom pom = pom_by_name(in.meta.at("pom").get<std::string>());
  if (pom.dim() != 4)
    throw std::invalid_argument("separability analysis needs a two-qubit POM");
  IcReconstructor rec(pom);
  std::vector<DensityOperator> states;
  states.reserve(in.sample.points.size());
  for (std::size_t j = 0; j < in.sample.points.size(); ++j) {
    if (in.sample.weights[j] <= 0.0) continue;
    states.push_back(DensityOperator::trusted(rec.reconstruct(in.sample.points[j])));
  }
  SeparableFraction f = separable_fraction(states, bins);
  std::ofstream out(out_path);
  out << "bin_center,fraction,std_error,count\n";
  out << "overall," << f.overall.estimate << "," << f.overall.std_error << ","
      << states.size() << "\n";
  for (std::size_t b = 0; b < f.per_bin.size(); ++b)
    out << f.bin_centers[b] << "," << f.per_bin[b].estimate << ","
        << f.per_bin[b].std_error << "," << f.bin_counts[b] << "\n";
  return 0;
}

int cmd_bench(const std::string& pom_name, long n, std::uint64_t seed,
              const std::string& out_path) {
  Pom pom = pom_by_name(pom_name);
  std::ofstream out(out_path);
  out << "strategy,target,points,seconds,ascent_iterations,acceptance_rate\n";

  struct Strategy {
    std::string name;
    bool mcmc;
    bool force_ascent;
    AscentMethod method;
  };
  const std::vector<Strategy> strategies = {
      {"mcmc-search", true, false, AscentMethod::CG},
      {"mcmc-cg", true, true, AscentMethod::CG},
      {"mcmc-dg", true, true, AscentMethod::DG},
      {"independence-search", false, false, AscentMethod::CG},
  };
  for (PriorKind prior : {PriorKind::Primitive, PriorKind::Jeffreys}) {
    TargetDensity target = TargetDensity::prior(prior);
    for (const auto& s : strategies) {
      AscentConfig cfg;
      cfg.method = s.method;
      PhysicalityChecker checker(pom, cfg, s.force_ascent);
      Rng rng(seed);
      const auto t0 = std::chrono::steady_clock::now();
      WeightedSample sample;
      if (s.mcmc) {
        ChainConfig ccfg;
        ccfg.length = n + n / 9;
        ccfg.burn_in = n / 9;
        ccfg.tune = true;
        sample = xmhmc_sample(target, checker, ccfg, rng);
      } else if (prior == PriorKind::Jeffreys) {
        // rejection under the Jeffreys cap has a vanishing yield for
        // many-outcome POMs; importance sampling is the practical choice
        sample = importance_sample(target, checker, n, rng);
      } else {
        sample = rejection_sample(target, checker, n, rng, 0.0);
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      out << s.name << "," << target_kind_name(target.kind) << ","
          << sample.points.size() << "," << secs << ","
          << checker.total_iterations() << "," << sample.meta.acceptance_rate
          << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo sampling from the quantum state space"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "draw a weighted sample");
  std::string pom_name, target_name = "prior-primitive", data_csv, method = "reject";
  std::string out_path = "sample.jsonl";
  long n = 1000, burn_in = -1, thinning = 1;
  std::uint64_t seed = 0;
  bool seed_given = false, tune = false;
  double sigma = -1.0;
  int threads = 1;
  sample->add_option("--pom", pom_name, "trine|antitrine|tetra|tetra2|tat")
      ->required();
  sample->add_option("--target", target_name,
                     "prior-primitive|prior-jeffreys|posterior-primitive|"
                     "posterior-jeffreys");
  sample->add_option("--data", data_csv, "comma-separated counts");
  sample->add_option("--method", method, "reject|importance|mcmc|ginibre|prior1");
  sample->add_option("-n", n, "points (proposals for importance)");
  sample->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
    seed_given = true;
  });
  sample->add_option("--sigma", sigma, "MCMC step size (tuned if omitted)");
  sample->add_flag("--tune", tune, "tune sigma during burn-in");
  sample->add_option("--burn-in", burn_in, "MCMC burn-in steps (default 10%)");
  sample->add_option("--thinning", thinning, "MCMC thinning factor");
  sample->add_option("--threads", threads, "worker threads")->envname("QSS_THREADS");
  sample->add_option("--out", out_path, "output JSONL path");

  // check
  auto* check = app.add_subcommand("check", "physicality of a probability vector");
  std::string point_csv;
  std::string check_pom;
  check->add_option("--pom", check_pom, "POM name")->required();
  check->add_option("--point", point_csv, "comma-separated probabilities")
      ->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "post-process a sample file");
  analyze->require_subcommand(1);
  auto* purity_cmd = analyze->add_subcommand("purity", "purity histogram + overlay");
  std::string in_path, prior_label = "I", analyze_out = "analysis.csv";
  int dim = 2, bins = 40;
  purity_cmd->add_option("--in", in_path, "input JSONL")->required();
  purity_cmd->add_option("--prior", prior_label, "I|II");
  purity_cmd->add_option("--dim", dim, "Hilbert-space dimension");
  purity_cmd->add_option("--bins", bins, "histogram bins");
  purity_cmd->add_option("--out", analyze_out, "output CSV")->required();

  auto* size_cmd = analyze->add_subcommand("size-curve", "bounded-likelihood sizes");
  std::string size_data, size_pom;
  size_cmd->add_option("--in", in_path, "input JSONL")->required();
  size_cmd->add_option("--data", size_data, "comma-separated counts")->required();
  size_cmd->add_option("--pom", size_pom, "POM name (default: from input metadata)");
  size_cmd->add_option("--out", analyze_out, "output CSV")->required();

  auto* sep_cmd = analyze->add_subcommand("separable", "PPT separable fractions");
  int sep_bins = 0;
  sep_cmd->add_option("--in", in_path, "input JSONL")->required();
  sep_cmd->add_option("--bins", sep_bins, "purity bins (0 = overall only)");
  sep_cmd->add_option("--out", analyze_out, "output CSV")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "compare sampling strategies");
  std::string bench_pom = "tat", bench_out = "bench.csv";
  long bench_n = 2000;
  bench->add_option("--pom", bench_pom, "POM name");
  bench->add_option("-n", bench_n, "points per strategy");
  bench->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
    seed_given = true;
  });
  bench->add_option("--out", bench_out, "output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) {
      if (!seed_given) {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        std::fprintf(stderr, "qss: no --seed given; using %llu\n",
                     static_cast<unsigned long long>(seed));
      }
      return cmd_sample(pom_name, target_name, data_csv, method, n, seed, sigma,
                        tune, burn_in, thinning, out_path);
    }
    if (check->parsed()) return cmd_check(check_pom, point_csv);
    if (analyze->parsed()) {
      if (purity_cmd->parsed())
        return cmd_analyze_purity(in_path, prior_label, dim, bins, analyze_out);
      if (size_cmd->parsed())
        return cmd_analyze_size_curve(in_path, size_data, size_pom, analyze_out);
      if (sep_cmd->parsed())
        return cmd_analyze_separable(in_path, sep_bins, analyze_out);
    }
    if (bench->parsed()) {
      if (!seed_given) seed = 1;
      return cmd_bench(bench_pom, bench_n, seed, bench_out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qss: error: %s\n", e.what());
    return 1;
  }
  return 2;
}
