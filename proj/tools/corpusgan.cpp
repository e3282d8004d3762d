// Command-line driver: prepare a corpus tree, train the adversarial models,
// evaluate them against the word2vec baseline, and run the discrete-support
// convergence checks. Every subcommand takes --config and is deterministic
// for a fixed config file.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "corpusgan/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adversarial training across text corpora"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "path to the experiment config file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* prepare = app.add_subcommand(
      "prepare", "tokenize, split, and embed the raw corpora (idempotent)");
  CLI::App* train = app.add_subcommand("train", "train one model for every configured seed");
  std::string model;
  train->add_option("-m,--model", model, "wegan or degan")->required();
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "cluster, finetune, and compare every trained arm against the baseline");
  CLI::App* report = app.add_subcommand("report", "print the summary table from a past evaluate");
  CLI::App* conv = app.add_subcommand(
      "verify-convergence", "train on a known discrete support and check distributional convergence");
  std::string fixture = "three-point";
  conv->add_option("-f,--fixture", fixture, "two-point, three-point, or oracle-pair");

  CLI11_PARSE(app, argc, argv);

  try {
    const corpusgan::ConfigFile file = corpusgan::read_config(config_path);
    const corpusgan::ExperimentConfig cfg = corpusgan::experiment_from_config(file);
    if (prepare->parsed()) {
      corpusgan::cmd_prepare(cfg, std::cout);
    } else if (train->parsed()) {
      corpusgan::cmd_train(cfg, model, std::cout);
    } else if (evaluate->parsed()) {
      corpusgan::cmd_evaluate(cfg, std::cout);
    } else if (report->parsed()) {
      std::cout << corpusgan::cmd_report(cfg);
    } else if (conv->parsed()) {
      const corpusgan::ConvergenceReport rep = corpusgan::run_convergence_fixture(cfg, fixture, std::cout);
      std::cout << rep.to_json() << "\n";
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
