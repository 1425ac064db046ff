#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdjoin/batch_engine.hpp"
#include "hdjoin/partition_sim.hpp"
#include "hdjoin/tuning.hpp"

namespace hdjoin::cli {

enum class Generator { None, Exponential, Uniform };
enum class Simulation { None, Replicated, Ring };

struct RunOptions {
  // Input: either a file or a generator.
  std::filesystem::path input;
  Format format = Format::Csv;
  Generator gen = Generator::None;
  std::size_t dims = 0;
  std::size_t count = 0;
  double lambda = 40.0;
  /// Imported files are always min-max normalized; generated data, which is
  /// already inside [0,1], only when this is set.
  bool normalizeGenerated = false;

  float epsilon = 0.0f;
  std::optional<std::size_t> k;
  bool tuneK = false;
  std::size_t tuneKMax = 10;
  bool reorder = false;
  KernelFlags flags;
  std::uint64_t batchSize = kDefaultBatchSize;
  double sampleFraction = 0.01;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool oracle = false;

  Simulation simulate = Simulation::None;
  std::size_t nodes = 1;
  std::size_t batches = 0;  // 0: same as nodes

  std::filesystem::path outPairs;  // .bin selects the binary dump
  std::filesystem::path outTrace;
  std::filesystem::path outCost;
};

struct StageTimes {
  double load = 0, reorder = 0, index = 0, tune = 0, estimate = 0, join = 0, table = 0;
};

struct SimulationReport {
  Simulation mode = Simulation::None;
  std::size_t nodes = 0;
  std::size_t batches = 0;
  std::uint64_t totalComm = 0;
  double commTime = 0.0;
  double batchWorkRatio = 0.0;  // max/min per-batch distance tests
  std::vector<SpeedupRow> speedup;
};

struct RunReport {
  std::string dataset;
  std::size_t count = 0;
  std::size_t dims = 0;
  float epsilon = 0.0f;
  std::size_t k = 0;
  bool reorder = false;
  KernelFlags flags;
  std::vector<std::size_t> perm;
  std::uint64_t resultPairs = 0;
  double selectivity = 0.0;
  std::uint64_t estimatedPairs = 0;
  std::size_t numBatches = 0;
  std::size_t retries = 0;
  std::uint64_t nonEmptyCells = 0;
  WorkCounters counters;
  std::vector<KCostProfile> costProfile;
  std::optional<bool> oraclePass;
  std::optional<SimulationReport> simulation;
  StageTimes times;
};

/// Throws InvalidArgument for inconsistent options.
void validate(const RunOptions& opts);

/// Load/generate, normalize, optionally reorder, index, optionally tune k,
/// estimate, plan, run the pipeline, and optionally verify and simulate.
RunReport run(const RunOptions& opts);

void writeReportText(std::ostream& out, const RunReport& report);
/// One JSON object on one line. Stage times are under the "times" key.
std::string reportJson(const RunReport& report, bool includeTimes = true);

}  // namespace hdjoin::cli
