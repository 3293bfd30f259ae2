// dpaudit: train differentially private random forests, mount the
// maximum-likelihood reconstruction attack against them, and score the
// result. Subcommands: train, attack, evaluate, sweep, pmf-dump,
// noise-compare.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpaudit/anytime_solver.hpp"
#include "dpaudit/budget.hpp"
#include "dpaudit/dataset.hpp"
#include "dpaudit/evaluation.hpp"
#include "dpaudit/exact_solver.hpp"
#include "dpaudit/forest.hpp"
#include "dpaudit/isolation_forest.hpp"
#include "dpaudit/noise_model.hpp"
#include "dpaudit/reconstruction.hpp"
#include "dpaudit/rng.hpp"
#include "dpaudit/serialize.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dpaudit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative output paths land under DPAUDIT_OUTPUT_ROOT when it is set.
fs::path resolve_out(const std::string& out) {
  fs::path path(out);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("DPAUDIT_OUTPUT_ROOT")) {
    return fs::path(root) / path;
  }
  return path;
}

double parse_epsilon(const json& value) {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") return kInf;
    throw std::runtime_error("epsilon must be a number or \"inf\"");
  }
  const double epsilon = value.get<double>();
  if (!(epsilon > 0)) throw std::runtime_error("epsilon must be positive");
  return epsilon;
}

std::string epsilon_label(double epsilon) {
  if (std::isinf(epsilon)) return "inf";
  std::ostringstream out;
  out << epsilon;
  return out.str();
}

std::uint64_t epsilon_bits(double epsilon) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &epsilon, sizeof(bits));
  return bits;
}

json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? json("inf") : json("-inf");
}

double real_from_json(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::runtime_error("bad numeric field: " + s);
  }
  return v.get<double>();
}

ThreatModel parse_threat(const std::string& name) {
  if (name == "full") return ThreatModel::full;
  if (name == "unknown-n" || name == "unknown_n") return ThreatModel::unknown_n;
  if (name == "partial") return ThreatModel::partial;
  if (name == "informed") return ThreatModel::informed;
  throw std::runtime_error("unknown threat model: " + name);
}

std::string threat_name(ThreatModel threat) {
  switch (threat) {
    case ThreatModel::full: return "full";
    case ThreatModel::unknown_n: return "unknown_n";
    case ThreatModel::partial: return "partial";
    case ThreatModel::informed: return "informed";
  }
  return "full";
}

// ---------------------------------------------------------------------------
// train

struct TrainParams {
  std::string dataset_path;
  int n_train = 0;
  int num_trees = 0;
  int depth = 0;
  double epsilon = 0;
  std::uint64_t seed = 0;
};

TrainParams train_params_from_config(const json& config) {
  TrainParams params;
  params.dataset_path = config.at("dataset").get<std::string>();
  params.n_train = config.at("n_train").get<int>();
  params.num_trees = config.at("num_trees").get<int>();
  params.depth = config.at("depth").get<int>();
  params.epsilon = parse_epsilon(config.at("epsilon"));
  params.seed = config.value("seed", 0ULL);
  return params;
}

struct TrainArtifacts {
  Forest forest;
  BinaryDataset train;
  BinaryDataset heldout;
};

TrainArtifacts run_train(const TrainParams& params) {
  const BinaryDataset pool =
      dataset_from_json(read_text_file(params.dataset_path));
  if (params.n_train < 1 || params.n_train > pool.n()) {
    throw std::runtime_error("n_train outside the dataset size");
  }
  TrainHeldoutSplit split =
      sample_training_set(pool, params.n_train, params.seed);
  TrainArtifacts artifacts;
  artifacts.forest = train_dp_forest(split.train, params.num_trees,
                                     params.depth, params.epsilon, params.seed);
  artifacts.train = std::move(split.train);
  artifacts.heldout = std::move(split.heldout);
  return artifacts;
}

void write_train_artifacts(const TrainArtifacts& artifacts,
                           const TrainParams& params, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file((dir / "forest_attacker.json").string(),
                  forest_to_json(artifacts.forest, true));
  json priv;
  priv["forest"] = json::parse(forest_to_json(artifacts.forest, false));
  priv["train"] = json::parse(dataset_to_json(artifacts.train));
  priv["heldout"] = json::parse(dataset_to_json(artifacts.heldout));
  priv["seed"] = params.seed;
  priv["epsilon"] = std::isinf(params.epsilon) ? json("inf")
                                               : json(params.epsilon);
  write_text_file((dir / "forest_private.json").string(), priv.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// attack

struct AttackParams {
  std::string forest_path;
  std::string groups_from;  // dataset JSON carrying the one-hot groups
  ThreatModel threat = ThreatModel::full;
  int n_train = -1;
  std::string known_columns_path;
  std::string known_rows_path;
  double alpha = -1;
  bool exact = false;
  double ceiling = 1e7;
  AnytimeOptions solver;
};

struct AttackOutcome {
  ReconstructionProblem problem;
  CandidateSolution solution;
  std::vector<TracePoint> trace;
  bool found_hard_feasible = false;
  double time_to_first_feasible = -1;
  double soft_objective = 0;
  long long moves = 0;
  std::string solver_name;
  std::string exact_status;
  double wall_seconds = 0;
};

AttackOutcome run_attack(const AttackParams& params) {
  const BinaryDataset encoding =
      dataset_from_json(read_text_file(params.groups_from));
  ForestView view = forest_view_from_json(read_text_file(params.forest_path),
                                          encoding.groups);

  ProblemOptions options;
  options.n_train = params.threat == ThreatModel::unknown_n ? -1
                                                            : params.n_train;
  options.alpha = params.alpha;
  if (params.threat == ThreatModel::partial) {
    const json kc = json::parse(read_text_file(params.known_columns_path));
    options.known_columns.columns = kc.at("columns").get<std::vector<int>>();
    for (const auto& row : kc.at("values")) {
      options.known_columns.values.push_back(
          row.get<std::vector<std::uint8_t>>());
    }
  }
  if (params.threat == ThreatModel::informed) {
    options.known_rows =
        dataset_from_json(read_text_file(params.known_rows_path));
  }

  AttackOutcome outcome;
  outcome.problem = build_problem(view, params.threat, options);

  const auto t0 = std::chrono::steady_clock::now();
  if (params.exact) {
    ExactLimits limits;
    limits.ceiling = params.ceiling;
    ExactResult result = solve_exact(outcome.problem, limits);
    outcome.solution = std::move(result.best);
    outcome.found_hard_feasible = result.status == ExactStatus::optimal;
    outcome.exact_status = result.status == ExactStatus::optimal
                               ? "optimal"
                               : "infeasible_hard";
    outcome.solver_name = "exact";
    outcome.moves = result.evaluated;
  } else {
    AnytimeResult result = solve_anytime(outcome.problem, params.solver);
    outcome.solution = std::move(result.best);
    outcome.trace = std::move(result.trace);
    outcome.found_hard_feasible = result.found_hard_feasible;
    outcome.time_to_first_feasible = result.time_to_first_feasible;
    outcome.soft_objective = result.soft_objective;
    outcome.moves = result.moves;
    outcome.solver_name = "anytime";
  }
  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const std::string verdict = check_solution(outcome.problem, outcome.solution);
  if (!verdict.empty()) {
    throw std::runtime_error("internal checker rejected the solution: " +
                             verdict);
  }
  return outcome;
}

json solution_to_json(const AttackOutcome& outcome) {
  const CandidateSolution& sol = outcome.solution;
  json out;
  out["threat"] = threat_name(outcome.problem.threat);
  out["solver"] = outcome.solver_name;
  if (!outcome.exact_status.empty()) out["exact_status"] = outcome.exact_status;
  out["n_tilde"] = sol.rows.size();
  out["rows"] = sol.rows;
  out["labels"] = sol.labels;
  out["derived_counts"] = sol.derived_counts;
  out["deltas"] = sol.deltas;
  out["objective"] = real_to_json(sol.objective);
  out["log_likelihood"] = real_to_json(sol.log_likelihood_term);
  out["regularizer"] = sol.regularizer_term;
  out["hard_feasible"] = sol.hard_feasible;
  out["found_hard_feasible"] = outcome.found_hard_feasible;
  out["time_to_first_feasible"] = outcome.time_to_first_feasible;
  out["soft_objective"] = real_to_json(outcome.soft_objective);
  out["moves"] = outcome.moves;
  out["wall_seconds"] = outcome.wall_seconds;
  if (outcome.problem.threat == ThreatModel::informed) {
    out["known_rows_count"] = outcome.problem.known_rows.n();
  }
  if (outcome.problem.threat == ThreatModel::unknown_n) {
    const NInterval& iv = outcome.problem.n_interval;
    out["n_interval"] = {{"n_star", iv.n_star},
                         {"sigma_zeta", iv.sigma_zeta},
                         {"t95", iv.t95},
                         {"n_min", iv.n_min},
                         {"n_max", iv.n_max},
                         {"normal_fallback", iv.normal_fallback}};
  }
  return out;
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream out;
  out << "wall_seconds,objective,hard_feasible\n";
  for (const auto& point : trace) {
    out << point.wall_seconds << ',' << point.objective << ','
        << (point.hard_feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateParams {
  std::string solution_path;
  std::string private_path;
  int leak_samples = 100;
  int baseline_runs = 100;
  std::uint64_t seed = 0;
};

json run_evaluate(const EvaluateParams& params) {
  const json sol = json::parse(read_text_file(params.solution_path));
  const json priv = json::parse(read_text_file(params.private_path));

  const Forest forest = forest_from_json(priv.at("forest").dump());
  const BinaryDataset train = dataset_from_json(priv.at("train").dump());
  const BinaryDataset heldout = dataset_from_json(priv.at("heldout").dump());

  BinaryDataset reconstructed;
  reconstructed.groups = train.groups;
  reconstructed.num_classes = train.num_classes;
  for (const auto& row : sol.at("rows")) {
    reconstructed.rows.push_back(row.get<std::vector<std::uint8_t>>());
  }
  reconstructed.labels = sol.at("labels").get<std::vector<int>>();
  reconstructed.validate();

  json report;
  report["threat"] = sol.at("threat");
  report["n_tilde"] = reconstructed.n();
  report["n_true"] = train.n();
  report["hard_feasible"] = sol.at("hard_feasible");
  report["objective"] = sol.at("objective");

  // Unknown-N solutions are aligned to the true size before matching.
  BinaryDataset aligned = reconstructed;
  if (reconstructed.n() != train.n()) {
    aligned = align_unknown_n(reconstructed, train.n(),
                              Rng::derive(params.seed, {0x2f8e11d3ULL}));
  }

  const auto cost = manhattan_cost_matrix(aligned, train);
  const MatchingResult matching = min_cost_matching(cost);
  const double error =
      static_cast<double>(matching.total_cost) /
      (static_cast<double>(train.n()) * train.m());
  report["reconstruction_error"] = error;

  report["random_baseline_error"] = random_baseline(
      train, train.groups, params.baseline_runs,
      Rng::derive(params.seed, {0x66b09c55ULL}));

  const PerfectStats perfect = perfect_reconstruction_stats(matching, train.m());
  report["proportion_perfect"] = perfect.proportion_perfect;
  report["worst_individual_error"] = perfect.worst_individual_error;

  int label_matches = 0;
  for (int i = 0; i < aligned.n(); ++i) {
    label_matches +=
        aligned.labels[i] == train.labels[matching.assignment[i]];
  }
  report["label_agreement"] =
      train.n() > 0 ? static_cast<double>(label_matches) / train.n() : 0.0;

  // Inlier/outlier breakdown of the original training rows.
  IsolationOptions iso;
  iso.seed = Rng::derive(params.seed, {0x41517a09ULL});
  const std::vector<double> scores = isolation_scores(train, iso);
  const InlierSplit split = split_inliers_outliers(scores);
  std::vector<int> cost_of_original(train.n(), 0);
  for (int i = 0; i < aligned.n(); ++i) {
    cost_of_original[matching.assignment[i]] = matching.per_pair_costs[i];
  }
  auto subset_stats = [&](const std::vector<int>& idx) {
    json stats;
    stats["count"] = idx.size();
    if (idx.empty()) {
      stats["avg_error"] = 0.0;
      stats["proportion_perfect"] = 0.0;
      return stats;
    }
    double total = 0;
    int perfect_rows = 0;
    for (int j : idx) {
      total += static_cast<double>(cost_of_original[j]) / train.m();
      perfect_rows += cost_of_original[j] == 0;
    }
    stats["avg_error"] = total / idx.size();
    stats["proportion_perfect"] =
        static_cast<double>(perfect_rows) / idx.size();
    return stats;
  };
  report["inlier_stats"] = subset_stats(split.inliers);
  report["outlier_stats"] = subset_stats(split.outliers);

  if (heldout.n() >= train.n()) {
    const LeakResult leak =
        privacy_leak_cdf(aligned, train, heldout, params.leak_samples,
                         Rng::derive(params.seed, {0x09d3f6c7ULL}));
    report["privacy_leak_cdf"] = leak.cdf;
    report["leak_mean"] = leak.mean;
    report["leak_std"] = leak.stddev;
    report["leak_degenerate"] = leak.degenerate;
  }

  report["accuracy_train"] = accuracy(forest, train, CountMode::noisy_counts);
  if (heldout.n() > 0) {
    report["accuracy_test"] = accuracy(forest, heldout, CountMode::noisy_counts);
  }

  // Informed mode: per-example error of the free rows against the true tail
  // of the training set, next to the majority baseline on the known head.
  if (sol.at("threat").get<std::string>() == "informed") {
    const int known = sol.at("known_rows_count").get<int>();
    if (known < train.n() && reconstructed.n() == train.n()) {
      BinaryDataset head = train;
      head.rows.assign(train.rows.begin(), train.rows.begin() + known);
      head.labels.assign(train.labels.begin(), train.labels.begin() + known);
      const std::vector<std::uint8_t> majority = majority_baseline(head);
      double attack_total = 0;
      double majority_total = 0;
      for (int k = known; k < train.n(); ++k) {
        int attack_dist = 0;
        int majority_dist = 0;
        for (int j = 0; j < train.m(); ++j) {
          attack_dist += reconstructed.rows[k][j] != train.rows[k][j];
          majority_dist += majority[j] != train.rows[k][j];
        }
        attack_total += static_cast<double>(attack_dist) / train.m();
        majority_total += static_cast<double>(majority_dist) / train.m();
      }
      const int free_rows = train.n() - known;
      report["informed_attack_error"] = attack_total / free_rows;
      report["majority_baseline_error"] = majority_total / free_rows;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepConfig {
  std::string dataset_path;
  std::vector<int> n_train;
  std::vector<int> num_trees;
  std::vector<int> depth;
  std::vector<double> epsilon;
  std::vector<std::uint64_t> seeds;
  ThreatModel threat = ThreatModel::full;
  double budget_seconds = 120;
  double stall_stop_seconds = -1;
  long long max_moves = -1;
  int threads = 1;
  int leak_samples = 100;
  std::uint64_t master_seed = 0;
};

SweepConfig sweep_config_from_json(const json& config) {
  SweepConfig sweep;
  sweep.dataset_path = config.at("dataset").get<std::string>();
  sweep.n_train = config.at("n_train").get<std::vector<int>>();
  sweep.num_trees = config.at("num_trees").get<std::vector<int>>();
  sweep.depth = config.at("depth").get<std::vector<int>>();
  for (const auto& e : config.at("epsilon")) {
    sweep.epsilon.push_back(parse_epsilon(e));
  }
  sweep.seeds = config.at("seeds").get<std::vector<std::uint64_t>>();
  sweep.threat = parse_threat(config.value("threat", std::string("full")));
  if (sweep.threat != ThreatModel::full &&
      sweep.threat != ThreatModel::unknown_n) {
    throw std::runtime_error(
        "sweep supports the full and unknown-n threat models");
  }
  sweep.budget_seconds = config.value("budget_seconds", 120.0);
  sweep.stall_stop_seconds = config.value("stall_stop_seconds", -1.0);
  sweep.max_moves = config.value("max_moves", -1LL);
  sweep.threads = config.value("threads", 1);
  sweep.leak_samples = config.value("leak_samples", 100);
  sweep.master_seed = config.value("master_seed", 0ULL);
  if (sweep.n_train.empty() || sweep.num_trees.empty() ||
      sweep.depth.empty() || sweep.epsilon.empty() || sweep.seeds.empty()) {
    throw std::runtime_error("sweep grid axes must be non-empty");
  }
  return sweep;
}

const std::vector<std::string> kCsvColumns = {
    "n_train", "num_trees", "depth", "epsilon", "seed",
    "reconstruction_error", "random_baseline_error", "proportion_perfect",
    "worst_individual_error", "privacy_leak_cdf", "accuracy_train",
    "accuracy_test", "hard_feasible", "objective", "time_to_first_feasible",
    "wall_seconds", "n_tilde", "status"};

void append_csv_row(std::ostringstream& csv, const json& record) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) csv << ',';
    const auto it = record.find(kCsvColumns[i]);
    if (it == record.end()) {
      csv << "";
    } else if (it->is_string()) {
      csv << it->get<std::string>();
    } else if (it->is_boolean()) {
      csv << (it->get<bool>() ? 1 : 0);
    } else {
      csv << it->dump();
    }
  }
  csv << '\n';
}

int run_sweep(const SweepConfig& sweep, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<json> records;

  for (int n : sweep.n_train) {
    for (int trees : sweep.num_trees) {
      for (int depth : sweep.depth) {
        for (double epsilon : sweep.epsilon) {
          for (std::uint64_t seed : sweep.seeds) {
            std::ostringstream name;
            name << "n" << n << "_t" << trees << "_d" << depth << "_eps"
                 << epsilon_label(epsilon) << "_s" << seed;
            const fs::path cell_dir = out_dir / name.str();
            const fs::path report_path = cell_dir / "report.json";

            json record;
            record["n_train"] = n;
            record["num_trees"] = trees;
            record["depth"] = depth;
            record["epsilon"] = epsilon_label(epsilon);
            record["seed"] = seed;

            if (fs::exists(report_path)) {
              // Resumable: completed cells are folded in, not recomputed.
              const json report = json::parse(read_text_file(
                  report_path.string()));
              for (const auto& [key, value] : report.items()) {
                record[key] = value;
              }
              record["status"] = "cached";
              records.push_back(record);
              continue;
            }

            const std::uint64_t cell_seed = Rng::derive(
                sweep.master_seed,
                {static_cast<std::uint64_t>(n),
                 static_cast<std::uint64_t>(trees),
                 static_cast<std::uint64_t>(depth), epsilon_bits(epsilon),
                 seed});
            try {
              TrainParams train_params;
              train_params.dataset_path = sweep.dataset_path;
              train_params.n_train = n;
              train_params.num_trees = trees;
              train_params.depth = depth;
              train_params.epsilon = epsilon;
              train_params.seed = cell_seed;
              const TrainArtifacts artifacts = run_train(train_params);
              write_train_artifacts(artifacts, train_params, cell_dir);

              AttackParams attack_params;
              attack_params.forest_path =
                  (cell_dir / "forest_attacker.json").string();
              attack_params.groups_from = sweep.dataset_path;
              attack_params.threat = sweep.threat;
              attack_params.n_train =
                  sweep.threat == ThreatModel::unknown_n ? -1 : n;
              attack_params.solver.time_budget_seconds = sweep.budget_seconds;
              attack_params.solver.stall_stop_seconds =
                  sweep.stall_stop_seconds;
              attack_params.solver.max_moves = sweep.max_moves;
              attack_params.solver.threads = sweep.threads;
              attack_params.solver.seed = Rng::derive(cell_seed, {1});
              const AttackOutcome outcome = run_attack(attack_params);
              write_text_file((cell_dir / "solution.json").string(),
                              solution_to_json(outcome).dump(2) + "\n");
              write_text_file((cell_dir / "trace.csv").string(),
                              trace_to_csv(outcome.trace));

              EvaluateParams eval_params;
              eval_params.solution_path =
                  (cell_dir / "solution.json").string();
              eval_params.private_path =
                  (cell_dir / "forest_private.json").string();
              eval_params.leak_samples = sweep.leak_samples;
              eval_params.seed = Rng::derive(cell_seed, {2});
              json report = run_evaluate(eval_params);
              report["wall_seconds"] = outcome.wall_seconds;
              report["time_to_first_feasible"] =
                  outcome.time_to_first_feasible;
              write_text_file(report_path.string(), report.dump(2) + "\n");

              for (const auto& [key, value] : report.items()) {
                record[key] = value;
              }
              record["status"] = "ok";
            } catch (const std::exception& e) {
              // A failing cell is recorded and the sweep moves on.
              record["status"] = std::string("error: ") + e.what();
            }
            records.push_back(record);
            std::cout << name.str() << ": "
                      << record.value("status", std::string("?")) << "\n";
          }
        }
      }
    }
  }

  std::ostringstream csv;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) csv << ',';
    csv << kCsvColumns[i];
  }
  csv << '\n';
  for (const auto& record : records) append_csv_row(csv, record);
  write_text_file((out_dir / "results.csv").string(), csv.str());

  // Mean and std of the error per grid cell across seeds.
  std::ostringstream summary;
  summary << "n_train,num_trees,depth,epsilon,runs,mean_error,std_error\n";
  for (int n : sweep.n_train) {
    for (int trees : sweep.num_trees) {
      for (int depth : sweep.depth) {
        for (double epsilon : sweep.epsilon) {
          std::vector<double> errors;
          for (const auto& record : records) {
            if (record["n_train"] == n && record["num_trees"] == trees &&
                record["depth"] == depth &&
                record["epsilon"] == epsilon_label(epsilon) &&
                record.contains("reconstruction_error")) {
              errors.push_back(record["reconstruction_error"].get<double>());
            }
          }
          if (errors.empty()) continue;
          double mean = 0;
          for (double e : errors) mean += e;
          mean /= errors.size();
          double var = 0;
          for (double e : errors) var += (e - mean) * (e - mean);
          var = errors.size() > 1 ? var / (errors.size() - 1) : 0;
          summary << n << ',' << trees << ',' << depth << ','
                  << epsilon_label(epsilon) << ',' << errors.size() << ','
                  << mean << ',' << std::sqrt(var) << '\n';
        }
      }
    }
  }
  write_text_file((out_dir / "summary.csv").string(), summary.str());
  return 0;
}

// ---------------------------------------------------------------------------
// pmf-dump and noise-compare

int run_pmf_dump(double epsilon_v, const fs::path& out_path) {
  const NoiseModel model = NoiseModel::make(epsilon_v);
  std::ostringstream out;
  out << "l,p,log_p\n";
  for (long long l = -model.gamma; l <= model.gamma; ++l) {
    out << l << ',' << model.pmf(l) << ',' << model.log_pmf(l) << '\n';
  }
  write_text_file(out_path.string(), out.str());
  std::cout << "epsilon_v=" << epsilon_v << " gamma=" << model.gamma
            << " coverage=" << model.coverage() << "\n";
  return 0;
}

int run_noise_compare(int num_trees, double epsilon, double delta,
                      double delta_prime, const fs::path& out_path) {
  if (num_trees < 1) throw std::runtime_error("need at least one tree");
  if (!(epsilon > 0) || std::isinf(epsilon)) {
    throw std::runtime_error("epsilon must be finite and positive");
  }
  if (!(delta > 0) || delta >= 1) {
    throw std::runtime_error("delta must be in (0, 1)");
  }
  if (delta_prime <= 0) delta_prime = delta / 2;

  const double laplace_eps_v = epsilon / num_trees;
  const double laplace_scale = 1.0 / laplace_eps_v;

  const double basic_eps_v = epsilon / num_trees;
  const double basic_delta_v = delta / num_trees;
  const double basic_sigma = gaussian_sigma(basic_eps_v, basic_delta_v);

  const double adv_eps_v = advanced_epsilon_v(epsilon, num_trees, delta_prime);
  const double adv_delta_v = (delta - delta_prime) / num_trees;
  const double adv_sigma = gaussian_sigma(adv_eps_v, adv_delta_v);

  std::ostringstream out;
  out << "mechanism,composition,epsilon_v,delta_v,scale\n";
  out.precision(15);
  out << "laplace,sequential," << laplace_eps_v << ",0," << laplace_scale
      << '\n';
  out << "gaussian,basic," << basic_eps_v << ',' << basic_delta_v << ','
      << basic_sigma << '\n';
  out << "gaussian,advanced," << adv_eps_v << ',' << adv_delta_v << ','
      << adv_sigma << '\n';
  write_text_file(out_path.string(), out.str());
  std::cout << "laplace_scale=" << laplace_scale
            << " gaussian_basic=" << basic_sigma
            << " gaussian_advanced=" << adv_sigma << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private random forest reconstruction audit"};
  app.require_subcommand(1);

  // train
  std::string train_config_path, train_out;
  CLI::App* train = app.add_subcommand("train", "train a DP random forest");
  train->add_option("--config", train_config_path, "train config JSON")
      ->required();
  train->add_option("--out", train_out, "output directory")->required();

  // attack
  AttackParams attack_params;
  std::string attack_threat = "full", attack_out;
  CLI::App* attack =
      app.add_subcommand("attack", "reconstruct the training set");
  attack->add_option("--forest", attack_params.forest_path,
                     "attacker-view forest JSON")->required();
  attack->add_option("--groups-from", attack_params.groups_from,
                     "dataset JSON carrying the one-hot groups")->required();
  attack->add_option("--threat", attack_threat,
                     "full | unknown-n | partial | informed");
  attack->add_option("--n", attack_params.n_train, "training-set size");
  attack->add_option("--known-columns", attack_params.known_columns_path,
                     "pinned columns JSON (partial mode)");
  attack->add_option("--known-rows", attack_params.known_rows_path,
                     "known rows dataset JSON (informed mode)");
  attack->add_option("--alpha", attack_params.alpha,
                     "informed regularization weight (default 20*epsilon)");
  attack->add_flag("--exact", attack_params.exact, "run the exhaustive oracle");
  attack->add_option("--ceiling", attack_params.ceiling,
                     "exact-solver search-space ceiling");
  attack->add_option("--budget", attack_params.solver.time_budget_seconds,
                     "solver wall budget, seconds");
  attack->add_option("--threads", attack_params.solver.threads,
                     "portfolio workers");
  attack->add_option("--seed", attack_params.solver.seed, "solver seed");
  attack->add_option("--restarts", attack_params.solver.restarts,
                     "annealing restarts");
  attack->add_option("--stall-stop", attack_params.solver.stall_stop_seconds,
                     "stop after this many stalled seconds once feasible");
  attack->add_option("--max-moves", attack_params.solver.max_moves,
                     "deterministic move budget (overrides wall clock)");
  attack->add_option("--out", attack_out, "output directory")->required();

  // evaluate
  EvaluateParams eval_params;
  std::string eval_out;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score a reconstruction");
  evaluate->add_option("--solution", eval_params.solution_path,
                       "solution JSON")->required();
  evaluate->add_option("--private", eval_params.private_path,
                       "private train artifact JSON")->required();
  evaluate->add_option("--samples", eval_params.leak_samples,
                       "privacy-leak sample count");
  evaluate->add_option("--baseline-runs", eval_params.baseline_runs,
                       "random-baseline repetitions");
  evaluate->add_option("--seed", eval_params.seed, "evaluation seed");
  evaluate->add_option("--out", eval_out, "report JSON path")->required();

  // sweep
  std::string sweep_config_path, sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "grid of train-attack-evaluate");
  sweep->add_option("--config", sweep_config_path, "sweep config JSON")
      ->required();
  sweep->add_option("--out", sweep_out, "output directory")->required();

  // pmf-dump
  double pmf_epsilon_v = 1;
  std::string pmf_out;
  CLI::App* pmf = app.add_subcommand("pmf-dump", "integer noise pmf table");
  pmf->add_option("--epsilon-v", pmf_epsilon_v, "per-leaf budget")->required();
  pmf->add_option("--out", pmf_out, "CSV path")->required();

  // noise-compare
  int nc_trees = 10;
  double nc_epsilon = 10, nc_delta = 1e-4, nc_delta_prime = -1;
  std::string nc_out;
  CLI::App* nc = app.add_subcommand(
      "noise-compare", "Laplace vs Gaussian scales at a shared budget");
  nc->add_option("--num-trees", nc_trees, "trees in the forest")->required();
  nc->add_option("--epsilon", nc_epsilon, "total epsilon")->required();
  nc->add_option("--delta", nc_delta, "total delta")->required();
  nc->add_option("--delta-prime", nc_delta_prime,
                 "advanced-composition slack (default delta/2)");
  nc->add_option("--out", nc_out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const json config = json::parse(read_text_file(train_config_path));
      const TrainParams params = train_params_from_config(config);
      const TrainArtifacts artifacts = run_train(params);
      write_train_artifacts(artifacts, params, resolve_out(train_out));
      return 0;
    }
    if (attack->parsed()) {
      attack_params.threat = parse_threat(attack_threat);
      if (attack_params.threat != ThreatModel::unknown_n &&
          attack_params.n_train < 1) {
        throw std::runtime_error("--n is required outside unknown-n mode");
      }
      const AttackOutcome outcome = run_attack(attack_params);
      const fs::path dir = resolve_out(attack_out);
      fs::create_directories(dir);
      write_text_file((dir / "solution.json").string(),
                      solution_to_json(outcome).dump(2) + "\n");
      write_text_file((dir / "trace.csv").string(),
                      trace_to_csv(outcome.trace));
      std::cout << "hard_feasible="
                << (outcome.solution.hard_feasible ? "true" : "false")
                << " objective=" << outcome.solution.objective << "\n";
      return 0;
    }
    if (evaluate->parsed()) {
      const json report = run_evaluate(eval_params);
      const fs::path out_path = resolve_out(eval_out);
      if (out_path.has_parent_path()) {
        fs::create_directories(out_path.parent_path());
      }
      write_text_file(out_path.string(), report.dump(2) + "\n");
      std::cout << "reconstruction_error="
                << report.at("reconstruction_error").get<double>() << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      const json config = json::parse(read_text_file(sweep_config_path));
      return run_sweep(sweep_config_from_json(config), resolve_out(sweep_out));
    }
    if (pmf->parsed()) {
      return run_pmf_dump(pmf_epsilon_v, resolve_out(pmf_out));
    }
    if (nc->parsed()) {
      return run_noise_compare(nc_trees, nc_epsilon, nc_delta, nc_delta_prime,
                               resolve_out(nc_out));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
