// surco: generate instances, run methods, train priors, emit theory tables.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "surco/errors.hpp"
#include "surco/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kSolve = 3, kIo = 4 };

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<std::string> regime;
  std::optional<int> jobs;
};

surco::ExperimentConfig resolve(const Overrides& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty()) doc = surco::read_json_file(o.config);
  if (o.method) {
    doc.erase("methods");
    doc["method"] = *o.method;
  }
  if (o.regime) {
    doc.erase("regimes");
    doc["regime"] = *o.regime;
  }
  if (o.seed) doc["seed"] = *o.seed;
  if (o.out) doc["out"] = *o.out;
  if (o.jobs) doc["jobs"] = *o.jobs;
  return surco::ExperimentConfig::from_json(doc);
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "experiment config (JSON)");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--method", o.method, "zero|prior|hybrid|heuristic|oracle|let");
  sub->add_option("--regime", o.regime, "loose|normal|tight|all");
  sub->add_option("--jobs", o.jobs, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-cost combinatorial optimization experiments"};
  app.require_subcommand(1);

  Overrides o;
  auto* generate = app.add_subcommand("generate", "write train/test instance files");
  auto* run = app.add_subcommand("run", "evaluate methods on the test instances");
  auto* train = app.add_subcommand("train-prior", "fit the cost network on the train split");
  auto* theory = app.add_subcommand("theory", "emit cover, Lipschitz and 1-NN tables");
  auto* validate = app.add_subcommand("validate", "check instance, model or config files");
  for (auto* sub : {generate, run, train, theory}) add_common(sub, o);
  std::vector<std::string> files;
  validate->add_option("files", files, "JSON documents")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*validate) {
      int bad = 0;
      for (const auto& f : files) {
        const auto issues = surco::validate_document(surco::read_json_file(f));
        for (const auto& issue : issues) std::cout << f << ": " << issue << '\n';
        if (issues.empty()) std::cout << f << ": ok\n";
        bad += issues.empty() ? 0 : 1;
      }
      return bad ? kConfig : kOk;
    }
    const surco::ExperimentConfig cfg = resolve(o);
    if (*generate) {
      const auto summary = surco::cmd_generate(cfg);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "wrote " << summary.files.size() << " instance files under " << cfg.out_dir
                << "/instances\n";
    } else if (*run) {
      const auto summary = surco::cmd_run(cfg);
      for (const auto& h : summary.head_to_head) {
        std::cout << h.regime << ' ' << surco::method_name(h.method) << " vs "
                  << surco::method_name(h.opponent) << ": " << h.wins << " wins, " << h.losses
                  << " losses, " << h.ties << " ties\n";
      }
      std::cout << "results: " << summary.csv_path.string() << '\n';
    } else if (*train) {
      for (const auto& p : surco::cmd_train_prior(cfg)) std::cout << "model: " << p.string() << '\n';
    } else if (*theory) {
      std::cout << "theory: " << surco::cmd_theory(cfg).string() << '\n';
    }
  } catch (const surco::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const surco::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const surco::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolve;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolve;
  }
  return kOk;
}
