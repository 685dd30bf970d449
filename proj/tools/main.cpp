// Command-line front end: shape generation, training, prediction, oracle
// solves, evaluation and benchmarking.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scatter/commands.hpp"
#include "scatter/error.hpp"

namespace {

std::string one_line(std::string s) {
  for (char &c : s) {
    if (c == '\n' || c == '\r')
      c = ' ';
  }
  return s;
}

} // namespace

int main(int argc, char **argv) {
  using namespace scatter;

  CLI::App app{"Acoustic scattering operator network: train, predict, verify"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  GenShapesArgs gen;
  auto *gen_cmd = app.add_subcommand("gen-shapes", "Generate a shape set");
  gen_cmd->add_option("--role", gen.role, "train, test-circles or test-arbitrary")
      ->check(CLI::IsMember({"train", "test-circles", "test-arbitrary"}));
  gen_cmd->add_option("--count", gen.count, "Number of shapes")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Dataset seed");
  gen_cmd->add_option("--out", gen.out, "Output shape file")->required();
  gen_cmd->add_option("--config", gen.config, "Run configuration (INI)");
  gen_cmd->add_option("--exclude", gen.exclude, "Shape file whose vectors must not recur");

  TrainArgs tr;
  auto *train_cmd = app.add_subcommand("train", "Train the operator network");
  train_cmd->add_option("--config", tr.config, "Run configuration (INI)");
  train_cmd->add_option("--shapes", tr.shapes, "Training shape file")->required();
  train_cmd->add_option("--out-checkpoint", tr.out_checkpoint, "Checkpoint path")->required();
  train_cmd->add_option("--out-log", tr.out_log, "Training log CSV")->required();
  train_cmd->add_flag("--resume", tr.resume, "Continue from --out-checkpoint");
  train_cmd->add_option("--max-steps", tr.max_steps, "Stop after this many steps");

  PredictArgs pr;
  auto *predict_cmd = app.add_subcommand("predict", "Predict the scattered field on a grid");
  predict_cmd->add_option("--checkpoint", pr.checkpoint, "Trained checkpoint")->required();
  predict_cmd->add_option("--shapes", pr.shapes, "Shape file")->required();
  predict_cmd->add_option("--shape-id", pr.shape_id, "Shape id within the file");
  predict_cmd->add_option("--grid", pr.grid, "Grid points per side")->check(CLI::PositiveNumber);
  predict_cmd->add_option("--out", pr.out, "Field CSV")->required();
  predict_cmd->add_option("--image", pr.image_prefix, "Prefix for PGM images");
  predict_cmd->add_option("--config", pr.config, "Run configuration (INI)");

  OracleArgs orc;
  auto *oracle_cmd = app.add_subcommand("oracle", "Reference solutions");
  oracle_cmd->require_subcommand(1);
  auto *fdfd_cmd = oracle_cmd->add_subcommand("fdfd", "Finite-difference solve for a shape");
  fdfd_cmd->add_option("--shapes", orc.shapes, "Shape file")->required();
  fdfd_cmd->add_option("--shape-id", orc.shape_id, "Shape id within the file");
  fdfd_cmd->add_option("--n", orc.n, "Nodes per side")->check(CLI::Range(3, 100000));
  fdfd_cmd->add_option("--grid", orc.grid, "Resample onto a cell-centered grid")
      ->check(CLI::PositiveNumber);
  fdfd_cmd->add_option("--out", orc.out, "Field CSV")->required();
  fdfd_cmd->add_option("--config", orc.config, "Run configuration (INI)");
  auto *cyl_cmd = oracle_cmd->add_subcommand("cylinder", "Series solution for a rigid cylinder");
  cyl_cmd->add_option("--radius", orc.radius, "Cylinder radius")->check(CLI::PositiveNumber);
  cyl_cmd->add_option("--grid", orc.grid, "Grid points per side")->check(CLI::PositiveNumber);
  cyl_cmd->add_option("--out", orc.out, "Field CSV")->required();
  cyl_cmd->add_option("--config", orc.config, "Run configuration (INI)");

  EvalArgs ev;
  auto *eval_cmd = app.add_subcommand("eval", "Metrics of a checkpoint over a test set");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Trained checkpoint")->required();
  eval_cmd->add_option("--shapes", ev.shapes, "Test shape file")->required();
  eval_cmd->add_option("--out", ev.out, "Report CSV")->required();
  eval_cmd->add_option("--config", ev.config, "Run configuration (INI)");

  CompareArgs cmp;
  auto *compare_cmd = app.add_subcommand("compare", "Metrics between two field CSVs");
  compare_cmd->add_option("predicted", cmp.predicted, "Predicted field CSV")->required();
  compare_cmd->add_option("reference", cmp.reference, "Reference field CSV")->required();

  BenchArgs bn;
  auto *bench_cmd = app.add_subcommand("bench", "Time prediction against the FDFD solve");
  bench_cmd->add_option("--checkpoint", bn.checkpoint, "Checkpoint (untrained model if absent)");
  bench_cmd->add_option("--shapes", bn.shapes, "Shape file")->required();
  bench_cmd->add_option("--count", bn.limit, "Use the first N shapes")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bn.out, "Timing CSV")->required();
  bench_cmd->add_option("--config", bn.config, "Run configuration (INI)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (gen_cmd->parsed())
      cmd_gen_shapes(gen, std::cout);
    else if (train_cmd->parsed())
      cmd_train(tr, std::cout);
    else if (predict_cmd->parsed())
      cmd_predict(pr, std::cout);
    else if (fdfd_cmd->parsed()) {
      orc.kind = "fdfd";
      cmd_oracle(orc, std::cout, std::cerr);
    } else if (cyl_cmd->parsed()) {
      orc.kind = "cylinder";
      cmd_oracle(orc, std::cout, std::cerr);
    } else if (eval_cmd->parsed())
      cmd_eval(ev, std::cout);
    else if (compare_cmd->parsed())
      cmd_compare(cmp, std::cout);
    else if (bench_cmd->parsed())
      cmd_bench(bn, std::cout);
  } catch (const Error &e) {
    std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
