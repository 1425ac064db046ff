#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hdjoin/cli.hpp"

int main(int argc, char** argv) {
  using namespace hdjoin;
  cli::RunOptions opts;
  CLI::App app{"Epsilon-distance self-join over a k-dimensional grid index"};

  std::string input, gen, simulate;
  std::size_t k = 0;
  bool json = false;
  std::map<std::string, Format> formats{{"csv", Format::Csv}, {"f32", Format::F32Binary}, {"f32-binary", Format::F32Binary}};

  app.add_option("--input", input, "Dataset file");
  app.add_option("--format", opts.format, "Input format: csv | f32-binary")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_option("--gen", gen, "Generate a dataset: exp | uniform")->check(CLI::IsMember({"exp", "uniform"}));
  app.add_option("--n", opts.dims, "Dimensions")->required();
  app.add_option("--count", opts.count, "Generated point count");
  app.add_option("--lambda", opts.lambda, "Exponential rate");
  app.add_flag("--normalize", opts.normalizeGenerated, "Min-max normalize generated data too");
  app.add_option("--eps", opts.epsilon, "Search radius")->required();
  auto* kOpt = app.add_option("--k", k, "Indexed dimensions (default 6, capped at n)");
  app.add_flag("--tune-k", opts.tuneK, "Select k from the memory-operation model");
  app.add_option("--tune-k-max", opts.tuneKMax, "Largest k considered by --tune-k");
  app.add_flag("--reorder", opts.reorder, "Reorder dimensions by descending variance");
  app.add_flag("--sortidu", opts.flags.sortidu, "Sort cells on an un-indexed dimension");
  app.add_flag("--shortc", opts.flags.shortc, "Short-circuit the distance accumulation");
  app.add_option("--batch-size", opts.batchSize, "Expected pairs per batch");
  app.add_option("--sample-frac", opts.sampleFraction, "Sample fraction for estimation, variance and tuning");
  app.add_option("--seed", opts.seed, "Seed for generation and sampling");
  app.add_option("--threads", opts.threads, "Worker thread cap");
  app.add_flag("--oracle", opts.oracle, "Verify against the brute-force join");
  app.add_option("--simulate", simulate, "Entity-partitioning simulation: replicated | ring")
      ->check(CLI::IsMember({"replicated", "ring"}));
  app.add_option("--nodes", opts.nodes, "Simulated node count");
  app.add_option("--batches", opts.batches, "Simulated query batches (multiple of --nodes)");
  app.add_option("--out-pairs", opts.outPairs, "Neighbor table output (.bin for binary)");
  app.add_option("--out-trace", opts.outTrace, "Simulation trace CSV output");
  app.add_option("--out-cost", opts.outCost, "Per-k cost table CSV output (with --tune-k)");
  app.add_flag("--json", json, "Print the report as one JSON line");

  CLI11_PARSE(app, argc, argv);

  opts.input = input;
  if (gen == "exp") opts.gen = cli::Generator::Exponential;
  if (gen == "uniform") opts.gen = cli::Generator::Uniform;
  if (*kOpt) opts.k = k;
  if (simulate == "replicated") opts.simulate = cli::Simulation::Replicated;
  if (simulate == "ring") opts.simulate = cli::Simulation::Ring;

  try {
    const auto report = cli::run(opts);
    if (json) {
      std::cout << cli::reportJson(report) << '\n';
    } else {
      cli::writeReportText(std::cout, report);
    }
    if (report.oraclePass && !*report.oraclePass) return 3;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
