#include "csa/apps.hpp"
#include "csa/coreset.hpp"
#include "csa/engine.hpp"
#include "csa/io.hpp"
#include "csa/linalg.hpp"
#include "csa/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::string input;
  std::string output;
  long k = 1;
  double eps = 0.5;
  double delta = 0.25;
  bool multiplicative = false;
  long budget = 0;
  long seed = 0;
  long threads = 1;
  bool deterministic = false;
};

json basis_to_json(const csa::Matrix& m) {
  json rows = json::array();
  for (csa::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (csa::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json config_echo(const CommonOpts& opts, double p) {
  json cfg;
  cfg["k"] = opts.k;
  cfg["p"] = p;
  cfg["epsilon"] = opts.eps;
  cfg["delta"] = opts.delta;
  cfg["multiplicative"] = opts.multiplicative;
  cfg["budget"] = opts.budget;
  cfg["seed"] = opts.seed;
  if (!opts.deterministic) {
    // Execution detail, not problem configuration: reports must be
    // byte-identical across thread counts in deterministic mode.
    cfg["threads"] = opts.threads;
  }
  return cfg;
}

json guarantee_block(const csa::Solution& sol, double epsilon, double kappa) {
  json g;
  g["epsilon"] = epsilon;
  g["delta"] = sol.net_granularity;
  g["kappa"] = kappa;
  g["delta_bound_value"] = sol.delta_bound;
  g["exhaustive"] = sol.exhaustive;
  return g;
}

void emit(const json& report, const std::string& output_path) {
  const std::string text = report.dump(2) + "\n";
  if (output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output_path);
    if (!out) {
      throw csa::InvalidInput("cannot open output file " + output_path);
    }
    out << text;
  }
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json base_report(const std::string& app, const CommonOpts& opts, double p) {
  json report;
  report["schema"] = 1;
  report["version"] = kVersion;
  report["app"] = app;
  report["config"] = config_echo(opts, p);
  report["seed"] = opts.seed;
  return report;
}

void finish_report(json& report, const CommonOpts& opts, const Timer& timer) {
  if (!opts.deterministic) {
    report["timing_ms"] = timer.elapsed_ms();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained subspace approximation toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  double p = 2.0;
  std::string model_path;
  long lmin = 0;
  std::vector<std::string> subspace_paths;
  std::vector<long> caps;
  long s_rows = 1;
  long coreset_size = 0;
  long samples = 200;
  std::string oracle_which;
  long restarts = 200;

  auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
    auto* in = cmd->add_option("--input", opts.input, "CSV matrix path");
    if (needs_input) {
      in->required();
    }
    cmd->add_option("--output", opts.output, "JSON report path (stdout if omitted)");
    cmd->add_option("--k", opts.k, "rank / cluster count");
    cmd->add_option("--eps", opts.eps, "coreset accuracy in (0,1)");
    cmd->add_option("--delta", opts.delta, "net granularity in (0,1]");
    cmd->add_flag("--multiplicative", opts.multiplicative,
                  "derive delta from the spectrum");
    cmd->add_option("--budget", opts.budget, "guess/enumeration cap (0 = unlimited)");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--threads", opts.threads, "worker threads");
    cmd->add_flag("--deterministic", opts.deterministic,
                  "omit timing so identical runs are byte-identical");
  };

  CLI::App* cse = app.add_subcommand("cse", "constrained subspace estimation");
  add_common(cse);
  cse->add_option("--model", model_path, "model subspace W (CSV, columns span W)")
      ->required();
  cse->add_option("--lmin", lmin, "minimum intersection dimension")->required();

  CLI::App* pcsa = app.add_subcommand("pcsa", "partition-constrained subspace approximation");
  add_common(pcsa);
  pcsa->add_option("--p", p, "cost exponent p >= 1");
  pcsa->add_option("--subspace", subspace_paths, "group subspace CSV (repeatable)")
      ->required();
  pcsa->add_option("--cap", caps, "per-group capacity (repeatable, default 1)");

  CLI::App* pnmf = app.add_subcommand("pnmf", "projective NMF");
  add_common(pnmf);

  CLI::App* kmeans = app.add_subcommand("kmeans", "k-means clustering");
  add_common(kmeans);
  kmeans->add_option("--coreset-size", coreset_size,
                     "row coreset size (0 = use all points)");

  CLI::App* sparsepca = app.add_subcommand("sparsepca", "row-sparse PCA");
  add_common(sparsepca);
  sparsepca->add_option("--s", s_rows, "row support budget")->required();

  CLI::App* verify = app.add_subcommand("verify-coreset", "sketch band check");
  add_common(verify);
  verify->add_option("--samples", samples, "sampled projections");

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force references");
  add_common(oracle);
  oracle->add_option("--which", oracle_which, "kmeans | pnmf | sparsepca")
      ->required();
  oracle->add_option("--s", s_rows, "row support budget (sparsepca)");
  oracle->add_option("--restarts", restarts, "restarts (pnmf)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  Timer timer;
  try {
    csa::Matrix a = csa::parse_matrix_csv(opts.input);

    if (cse->parsed()) {
      csa::CseInstance inst;
      inst.a = a;
      inst.w = csa::orthonormalize(csa::parse_matrix_csv(model_path));
      inst.k = opts.k;
      inst.l_min = lmin;
      inst.epsilon = opts.eps;
      inst.delta = opts.delta;
      inst.budget = static_cast<std::uint64_t>(opts.budget);
      inst.seed = static_cast<std::uint64_t>(opts.seed);
      inst.threads = static_cast<int>(opts.threads);
      if (opts.multiplicative) {
        inst.delta = csa::multiplicative_delta(a, inst.k, inst.epsilon).delta;
      }
      csa::CseResult res = csa::run_cse(inst);

      json report = base_report("cse", opts, 2.0);
      report["config"]["lmin"] = lmin;
      report["config"]["delta"] = inst.delta;
      report["cost_original"] = res.solution.cost_original;
      report["cost_coreset"] = res.solution.cost_coreset;
      report["guarantee"] = guarantee_block(res.solution, inst.epsilon, 1.0);
      report["basis"] = basis_to_json(res.solution.basis.vectors);
      json cases = json::array();
      for (const csa::CseCase& c : res.cases) {
        cases.push_back({{"intersection_dim", c.intersection_dim},
                         {"cost_original", c.cost_original},
                         {"exhaustive", c.exhaustive}});
      }
      report["extras"] =
          json{{"cases", cases}, {"chosen_case", res.chosen_case}};
      finish_report(report, opts, timer);
      emit(report, opts.output);
    } else if (pcsa->parsed()) {
      csa::PcsaInstance inst;
      inst.a = a;
      if (!caps.empty() && caps.size() != subspace_paths.size()) {
        throw csa::InvalidInput("--cap count must match --subspace count");
      }
      for (size_t i = 0; i < subspace_paths.size(); ++i) {
        csa::PcsaGroup group;
        group.subspace = csa::orthonormalize(csa::parse_matrix_csv(subspace_paths[i]));
        group.capacity = caps.empty() ? 1 : caps[i];
        inst.groups.push_back(std::move(group));
      }
      inst.p = p;
      inst.epsilon = opts.eps;
      inst.budget = static_cast<std::uint64_t>(opts.budget);
      inst.seed = static_cast<std::uint64_t>(opts.seed);
      inst.threads = static_cast<int>(opts.threads);
      csa::PcsaResult res = csa::run_pcsa(inst);

      json report = base_report("pcsa", opts, p);
      report["cost_original"] = res.solution.cost_original;
      report["cost_coreset"] = res.solution.cost_coreset;
      report["guarantee"] =
          guarantee_block(res.solution, inst.epsilon, res.chosen_kappa);
      report["basis"] = basis_to_json(res.solution.basis.vectors);
      json trace = json::array();
      for (const csa::PcsaKappaTrace& t : res.kappa_trace) {
        trace.push_back({{"kappa", t.kappa},
                         {"cost_original", t.cost_original},
                         {"exhaustive", t.exhaustive}});
      }
      report["extras"] = json{{"kappa_trace", trace},
                              {"chosen_kappa", res.chosen_kappa},
                              {"selected_vectors", basis_to_json(res.selected_vectors)}};
      finish_report(report, opts, timer);
      emit(report, opts.output);
    } else if (pnmf->parsed()) {
      csa::PnmfInstance inst;
      inst.a = a;
      inst.k = opts.k;
      inst.epsilon = opts.eps;
      inst.delta = opts.delta;
      inst.multiplicative = opts.multiplicative;
      inst.budget = static_cast<std::uint64_t>(opts.budget);
      inst.seed = static_cast<std::uint64_t>(opts.seed);
      inst.threads = static_cast<int>(opts.threads);
      csa::PnmfResult res = csa::run_pnmf(inst);

      json report = base_report("pnmf", opts, 2.0);
      report["config"]["delta"] = res.delta_used;
      report["cost_original"] = res.solution.cost_original;
      report["cost_coreset"] = res.solution.cost_coreset;
      report["guarantee"] = guarantee_block(res.solution, inst.epsilon, 1.0);
      report["basis"] = basis_to_json(res.solution.basis.vectors);
      report["extras"] = json{{"delta_used", res.delta_used},
                              {"delta_degenerate", res.delta_degenerate}};
      finish_report(report, opts, timer);
      emit(report, opts.output);
    } else if (kmeans->parsed()) {
      csa::KmeansInstance inst;
      inst.points = a;
      inst.k = opts.k;
      inst.epsilon = opts.eps;
      if (coreset_size > 0) {
        inst.row_coreset = csa::RowCoresetSample{
            coreset_size, static_cast<std::uint64_t>(opts.seed)};
      }
      if (opts.budget > 0) {
        inst.enumeration_budget = static_cast<std::uint64_t>(opts.budget);
      }
      csa::KmeansResult res = csa::run_kmeans(inst);

      json report = base_report("kmeans", opts, 2.0);
      report["config"]["coreset_size"] = coreset_size;
      report["cost_original"] = res.cost;
      report["cost_coreset"] = res.cost_reduced;
      report["guarantee"] = json{{"epsilon", opts.eps},
                                 {"delta", nullptr},
                                 {"kappa", nullptr},
                                 {"delta_bound_value", nullptr},
                                 {"exhaustive", true}};
      report["basis"] = json::array();
      report["extras"] = json{{"centers", basis_to_json(res.centers)},
                              {"assignment", res.assignment},
                              {"reduced_dim", res.reduced_dim},
                              {"assignments_evaluated", res.assignments_evaluated}};
      finish_report(report, opts, timer);
      emit(report, opts.output);
    } else if (sparsepca->parsed()) {
      csa::SparsePcaInstance inst;
      inst.a = a;
      inst.k = opts.k;
      inst.s_rows = s_rows;
      inst.epsilon = opts.eps;
      csa::SparsePcaResult res = csa::run_sparse_pca(inst);

      json report = base_report("sparsepca", opts, 2.0);
      report["config"]["s"] = s_rows;
      report["cost_original"] = res.cost_min;
      report["cost_coreset"] = nullptr;
      report["guarantee"] = json{{"epsilon", opts.eps},
                                 {"delta", nullptr},
                                 {"kappa", nullptr},
                                 {"delta_bound_value", nullptr},
                                 {"exhaustive", true}};
      report["basis"] = basis_to_json(res.u);
      report["extras"] = json{{"support", res.support},
                              {"mass_max", res.mass_max},
                              {"coreset_cols", res.coreset_cols}};
      finish_report(report, opts, timer);
      emit(report, opts.output);
    } else if (verify->parsed()) {
      csa::Coreset coreset = csa::pcps_p2(a, opts.k, opts.eps);
      const double tolerance = 1e-8 * a.squaredNorm();
      csa::VerificationReport res = csa::verify_pcps(
          a, coreset.B, opts.k, opts.eps, static_cast<int>(samples),
          static_cast<std::uint64_t>(opts.seed), tolerance);

      json report = base_report("verify-coreset", opts, 2.0);
      report["result"] = json{{"passed", res.passed},
                              {"min_diff", res.min_diff},
                              {"max_diff", res.max_diff},
                              {"spread", res.spread},
                              {"band_bound", res.band_bound},
                              {"tail_energy", res.tail_energy},
                              {"n_samples", res.n_samples},
                              {"tolerance", tolerance}};
      finish_report(report, opts, timer);
      emit(report, opts.output);
    } else if (oracle->parsed()) {
      csa::OracleReport res;
      if (oracle_which == "kmeans") {
        res = csa::brute_kmeans(a, opts.k);
      } else if (oracle_which == "pnmf") {
        res = csa::brute_pnmf(a, opts.k, static_cast<int>(restarts),
                              static_cast<std::uint64_t>(opts.seed));
      } else if (oracle_which == "sparsepca") {
        res = csa::sparse_pca_full_enum(a, opts.k, s_rows);
      } else {
        throw csa::InvalidInput("oracle --which must be kmeans, pnmf, or sparsepca");
      }
      json report = base_report("oracle", opts, 2.0);
      report["result"] = json{{"opt_value", res.opt_value},
                              {"which", oracle_which},
                              {"note", res.note}};
      if (!res.assignment.empty()) {
        report["result"]["assignment"] = res.assignment;
      }
      if (!res.support.empty()) {
        report["result"]["support"] = res.support;
      }
      finish_report(report, opts, timer);
      emit(report, opts.output);
    }
  } catch (const csa::Overflow& e) {
    std::cerr << "overflow: " << e.what() << "\n";
    return 4;
  } catch (const csa::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
