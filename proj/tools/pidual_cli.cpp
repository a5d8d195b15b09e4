// Experiment runner: executes the example families against a config file,
// writes machine-readable reports with re-verifiable witnesses, and rechecks
// existing reports.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pidual/families.hpp"

namespace {

int exit_code_for(const pidual::Error& e) {
  return e.kind() == pidual::ErrorKind::Config ? 2 : 3;
}

int do_list_families() {
  for (const pidual::FamilyInfo& info : pidual::family_registry()) {
    std::cout << info.name << " -> " << info.description << "\n";
    std::cout << "  keys:";
    for (const std::string& key : info.keys) std::cout << " " << key;
    std::cout << "\n";
  }
  std::cout << "families: " << pidual::family_registry().size() << "\n";
  return 0;
}

int do_run(const std::string& config_path, const std::string& output_override,
           int threads) {
  pidual::Config cfg;
  try {
    cfg = pidual::Config::parse_file(config_path);
  } catch (const pidual::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  pidual::RunResult result;
  bool timing = false;
  try {
    timing = cfg.get_bool("report.timing", false);
    auto begin = std::chrono::steady_clock::now();
    result = pidual::run_family(cfg, threads);
    auto end = std::chrono::steady_clock::now();
    if (timing) {
      long ms = std::chrono::duration_cast<std::chrono::milliseconds>(end - begin).count();
      for (pidual::DualityRecord& rec : result.report.records) rec.wall_ms = ms;
    }
  } catch (const pidual::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  std::string out_path = !output_override.empty()
                             ? output_override
                             : cfg.get_string("output", "pidual_report.txt");
  {
    std::ofstream out(out_path);
    if (!out.good()) {
      std::cerr << "error: cannot write report to '" << out_path << "'\n";
      return 3;
    }
    out << pidual::serialize_report(result.report, result.config_echo);
  }

  // Standalone re-check pass over the just-written report.
  pidual::RecheckResult recheck;
  try {
    std::ifstream in(out_path);
    std::stringstream buf;
    buf << in.rdbuf();
    recheck = pidual::recheck_report(pidual::parse_report(buf.str()));
  } catch (const pidual::Error& e) {
    std::cerr << "recheck error: " << e.what() << "\n";
    return 3;
  }

  std::cout << pidual::summarize_report(result.report);
  std::cout << "witnesses rechecked: " << recheck.checked
            << ", recheck failures: " << recheck.failures << "\n";
  std::cout << "report: " << out_path << "\n";
  for (const std::string& msg : recheck.messages) std::cout << "recheck: " << msg << "\n";
  return (result.report.ok() && recheck.failures == 0) ? 0 : 1;
}

int do_recheck(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in.good()) {
    std::cerr << "error: cannot open report '" << report_path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    pidual::RecheckResult result = pidual::recheck_report(pidual::parse_report(buf.str()));
    std::cout << "witnesses rechecked: " << result.checked
              << ", failures: " << result.failures << "\n";
    for (const std::string& msg : result.messages) std::cout << msg << "\n";
    return result.failures == 0 ? 0 : 1;
  } catch (const pidual::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional product-duality laboratory"};
  app.require_subcommand(1);

  std::string config_path, report_path, output_override;
  int threads = pidual::thread_count_from_env();

  CLI::App* run = app.add_subcommand("run", "run an experiment family from a config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--output", output_override, "report output path");
  run->add_option("-j,--threads", threads, "worker threads (default from PIDUAL_THREADS)");

  app.add_subcommand("list-families", "list the experiment families and their schemas");

  CLI::App* recheck = app.add_subcommand("recheck", "re-verify the witnesses in a report");
  recheck->add_option("report", report_path, "machine-readable report file")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-families")) return do_list_families();
  if (app.got_subcommand("run")) return do_run(config_path, output_override, threads);
  return do_recheck(report_path);
}
