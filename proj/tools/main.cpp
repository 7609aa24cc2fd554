#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"

using namespace im2colsim::cli;

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("im2colsim"));
  spdlog::set_level(spdlog::level::warn);
  if (const char* levels = std::getenv("SIM_LOG_LEVEL")) spdlog::cfg::helpers::load_levels(levels);

  CLI::App app{"Systolic-array convolution simulator"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&opt](CLI::App* cmd) {
    cmd->add_option("--workload", opt.workload, "Workload JSON")->required();
    cmd->add_option("--out", opt.out, "CSV output path (default stdout)");
    cmd->add_option("--seed", opt.seed, "Seed for randomized data");
  };
  auto with_arch = [&opt](CLI::App* cmd) {
    cmd->add_option("--arch", opt.arch, "Architecture JSON (default: built-in TPU-like core)");
    cmd->add_option("--method", opt.methods, "Method name(s), repeatable or comma separated");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "One CSV row per layer and method");
  common(simulate);
  with_arch(simulate);
  simulate->add_flag("--verify", opt.verify, "Also check every OFMap against the direct convolution");
  simulate->add_option("--jobs", opt.jobs, "Worker threads (timing runs only)");

  CLI::App* sweep = app.add_subcommand("sweep", "Cross-product design sweep");
  common(sweep);
  with_arch(sweep);
  sweep->add_option("--grid", opt.grid, "Sweep grid JSON")->required();
  sweep->add_option("--jobs", opt.jobs, "Worker threads");

  CLI::App* overhead = app.add_subcommand("overhead", "Explicit im2col memory overhead");
  common(overhead);

  CLI::App* verify = app.add_subcommand("verify", "Functional check against the direct convolution");
  common(verify);
  with_arch(verify);

  CLI::App* reuse = app.add_subcommand("reuse", "Block scheduler SRAM reuse under both subtile orders");
  common(reuse);
  reuse->add_option("--block-m", opt.block_m, "GEMM rows per block (default: one output row)");
  reuse->add_option("--block-n", opt.block_n, "Output channels per block (default: all)");
  reuse->add_option("--block-k", opt.block_k, "K columns per subtile (default: C_I)");
  reuse->add_option("--budget-sets", opt.budget_sets, "SRAM budget in subtile working sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: E_USAGE: " << e.what() << '\n';
    return kUsage;
  }

  if (*simulate) return cmd_simulate(opt, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(opt, std::cout, std::cerr);
  if (*overhead) return cmd_overhead(opt, std::cout, std::cerr);
  if (*verify) return cmd_verify(opt, std::cout, std::cerr);
  return cmd_reuse(opt, std::cout, std::cerr);
}
