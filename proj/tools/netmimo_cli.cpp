#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "netmimo/error.hpp"
#include "netmimo/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
};

int execute(const std::string& command, const Flags& flags) {
  using namespace netmimo;
  try {
    auto cfg = load_config(flags.config);
    if (flags.seed) cfg.run.seed = *flags.seed;
    if (flags.trials) {
      if (*flags.trials < 0) throw ConfigError("--trials must be non-negative");
      cfg.run.trials = *flags.trials;
    }
    if (flags.threads) {
      if (*flags.threads < 1) throw ConfigError("--threads must be positive");
      cfg.run.threads = *flags.threads;
    }
    std::string cmd = command;
    if (cmd == "run") {
      if (cfg.run.command.empty()) throw ConfigError("run.command is not set in the config");
      cmd = cfg.run.command;
    }
    auto ex = build_experiment(cfg);
    auto result = run_command(cmd, ex);
    std::filesystem::create_directories(flags.out);
    for (const auto& f : result.files) {
      const auto path = std::filesystem::path(flags.out) / f.name;
      std::ofstream os(path, std::ios::binary);
      os << f.content;
      if (!os) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
      std::cout << "wrote " << path.string() << "\n";
    }
    for (const auto& m : result.messages) std::cout << m << "\n";
    return 0;
  } catch (const netmimo::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const netmimo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const netmimo::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-MIMO architecture evaluator"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"bin-rates", "closed-form (and optional Monte Carlo) rates per bin and scheme"},
      {"optimize-map", "best scheme and baseline gain per bin"},
      {"throughput-sweep", "PF cluster throughput versus the antenna factor M"},
      {"validate", "closed form vs Monte Carlo, training identities and partial traces"},
      {"schedule", "fairness scheduling across bins"},
      {"run", "the command named in run.command"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "experiment config (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--seed", flags.seed, "Monte Carlo seed (overrides run.seed)");
    sub->add_option("--trials", flags.trials, "Monte Carlo trials (overrides run.trials)");
    sub->add_option("--threads", flags.threads, "worker threads (overrides run.threads)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return execute(app.get_subcommands().front()->get_name(), flags);
}
