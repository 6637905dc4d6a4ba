#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "bbh/acceptance.hpp"
#include "bbh/common.hpp"
#include "bbh/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  bool exact = false, empirical = false;
};

void add_flags(CLI::App* sub, Flags& f, bool moment) {
  sub->add_option("--config", f.config, "key = value config file; flags override it");
  for (const auto& key : bbh::Config::known_keys()) {
    if (key == "mode") continue;
    sub->add_option_function<std::string>(
        "--" + key, [&f, key](const std::string& v) { f.values[key] = v; }, "config key '" + key + "'");
  }
  if (moment) {
    auto* ex = sub->add_flag("--exact", f.exact, "exact enumeration (default)");
    auto* em = sub->add_flag("--empirical", f.empirical, "Monte Carlo estimate");
    ex->excludes(em);
  }
}

bbh::Config build_config(const Flags& f) {
  bbh::Config cfg = f.config.empty() ? bbh::Config{} : bbh::Config::load(f.config);
  for (const auto& [k, v] : f.values) cfg.set(k, v);
  if (f.empirical) cfg.set("mode", "empirical");
  if (f.exact) cfg.set("mode", "exact");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boston-Bush-Hajir measure laboratory"};
  app.set_version_flag("--version", std::string(bbh::kVersion));
  app.require_subcommand(1);

  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& kind : bbh::experiment_kinds()) {
    subs[kind] = app.add_subcommand(kind, "run the '" + kind + "' experiment");
    add_flags(subs[kind], flags[kind], kind == "moment");
  }

  bbh::AcceptOptions accept;
  std::vector<int> only;
  auto* acc = app.add_subcommand("accept", "run the acceptance suite");
  acc->add_option("--workers", accept.workers, "worker threads")->check(CLI::PositiveNumber);
  acc->add_option("--only", only, "criterion ids to run")->delimiter(',')->check(CLI::Range(1, 9));
  acc->add_option("--out", accept.archive_dir, "directory for archived averages");

  CLI11_PARSE(app, argc, argv);

  try {
    if (acc->parsed()) {
      accept.only.insert(only.begin(), only.end());
      const auto results = bbh::run_acceptance(accept, std::cout);
      for (const auto& r : results)
        if (!r.pass) return 1;
      return 0;
    }
    for (const auto& [kind, sub] : subs) {
      if (!sub->parsed()) continue;
      const bbh::Config cfg = build_config(flags[kind]);
      const bbh::RunOutput out = bbh::run_experiment(kind, cfg);
      bbh::write_outputs(kind, cfg, out);
      std::cout << out.summary.dump(2) << '\n';
      if (cfg.flag("check") && !out.check_passed) {
        std::cerr << kind << ": check failed\n";
        return 1;
      }
    }
  } catch (const bbh::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
