#include "hdjoin/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "hdjoin/oracle.hpp"

namespace hdjoin::cli {

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::ofstream openOut(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

const char* simulationName(Simulation s) {
  switch (s) {
    case Simulation::Replicated: return "replicated";
    case Simulation::Ring: return "ring";
    default: return "none";
  }
}

}  // namespace

void validate(const RunOptions& opts) {
  const bool fromFile = !opts.input.empty();
  if (fromFile == (opts.gen != Generator::None)) throw InvalidArgument("give exactly one of --input or --gen");
  if (opts.dims < 2) throw InvalidArgument("--n must be at least 2");
  if (!fromFile && opts.count == 0) throw InvalidArgument("--count must be positive");
  if (!(opts.epsilon > 0.0f)) throw InvalidArgument("--eps must be positive");
  if (opts.k && opts.tuneK) throw InvalidArgument("--k and --tune-k are mutually exclusive");
  const std::size_t k = opts.k.value_or(std::min(kDefaultK, opts.dims));
  if (k < 2 || k > opts.dims) throw InvalidArgument("--k must satisfy 2 <= k <= n");
  if (opts.tuneK && opts.tuneKMax < 2) throw InvalidArgument("--tune-k-max must be at least 2");
  if (!(opts.sampleFraction > 0.0 && opts.sampleFraction <= 1.0)) {
    throw InvalidArgument("--sample-frac must be in (0,1]");
  }
  if (opts.batchSize == 0) throw InvalidArgument("--batch-size must be positive");
  if (opts.threads == 0) throw InvalidArgument("--threads must be positive");
  if (opts.simulate != Simulation::None) {
    const std::size_t batches = opts.batches ? opts.batches : opts.nodes;
    if (opts.nodes == 0) throw InvalidArgument("--nodes must be positive");
    if (batches % opts.nodes != 0) throw InvalidArgument("--batches must be a multiple of --nodes");
  }
  if (!opts.outTrace.empty() && opts.simulate == Simulation::None) {
    throw InvalidArgument("--out-trace requires --simulate");
  }
}

RunReport run(const RunOptions& opts) {
  validate(opts);
  RunReport report;
  Stopwatch clock;

  Dataset d;
  switch (opts.gen) {
    case Generator::Exponential:
      d = genExponential(opts.count, opts.dims, opts.lambda, opts.seed);
      report.dataset = "exp(lambda=" + nlohmann::json(opts.lambda).dump() + ")";
      break;
    case Generator::Uniform:
      d = genUniform(opts.count, opts.dims, opts.seed);
      report.dataset = "uniform";
      break;
    case Generator::None:
      d = importDataset(opts.input, opts.format, opts.dims);
      report.dataset = opts.input.filename().string();
      break;
  }
  if (opts.gen == Generator::None || opts.normalizeGenerated) d = normalize(d);
  report.times.load = clock.lap();

  if (opts.reorder) {
    const double frac = std::max(opts.sampleFraction, std::min(1.0, 2.0 / static_cast<double>(d.count)));
    if (d.count >= 2) d = reorderByVariance(d, estimateVariance(d, frac, opts.seed));
  }
  report.times.reorder = clock.lap();

  const auto cfg = KernelConfig::make(opts.epsilon, opts.flags);
  std::size_t k = opts.k.value_or(std::min(kDefaultK, d.dims));
  if (opts.tuneK) {
    std::vector<std::size_t> ks;
    for (std::size_t c = 2; c <= std::min(opts.tuneKMax, d.dims); ++c) ks.push_back(c);
    report.costProfile = profileK(d, opts.epsilon, opts.flags, ks, opts.sampleFraction, opts.seed, opts.threads);
    k = selectK(report.costProfile);
    if (!opts.outCost.empty()) {
      auto out = openOut(opts.outCost);
      writeCostCsv(out, report.costProfile);
    }
  }
  report.times.tune = clock.lap();

  const auto gp = GridParams::fromData(d, opts.epsilon, k);
  const auto g = buildIndex(d, gp, defaultUDim(k, d.dims));
  report.times.index = clock.lap();

  const auto est = estimateResultSize(d, g, gp, cfg, opts.sampleFraction, opts.seed, opts.threads);
  const auto plan = planBatches(std::max<std::uint64_t>(est.estimatedPairs, d.count), opts.batchSize, d.count);
  report.times.estimate = clock.lap();

  PipelineStats stats;
  PipelineOptions popts;
  popts.workers = opts.threads;
  const auto table = executePipeline(plan, d, g, gp, cfg, popts, &stats);
  report.times.join = clock.lap();

  if (!opts.outPairs.empty()) {
    const bool binary = opts.outPairs.extension() == ".bin";
    auto out = openOut(opts.outPairs, binary);
    if (binary) {
      writeTableBinary(out, table);
    } else {
      writeTableText(out, table);
    }
  }
  report.times.table = clock.lap();

  report.count = d.count;
  report.dims = d.dims;
  report.epsilon = opts.epsilon;
  report.k = k;
  report.reorder = opts.reorder;
  report.flags = opts.flags;
  report.perm = d.perm;
  report.resultPairs = table.totalPairs();
  report.selectivity = selectivity(table, d);
  report.estimatedPairs = est.estimatedPairs;
  report.numBatches = plan.numBatches;
  report.retries = stats.retries;
  report.nonEmptyCells = g.nonEmptyCount();
  report.counters = stats.counters;

  if (report.selectivity != selectivity(report.resultPairs, report.count)) {
    throw Error("selectivity cross-check failed");
  }

  if (opts.oracle) report.oraclePass = bruteJoin(d, opts.epsilon, opts.threads) == sortedPairs(table);

  if (opts.simulate != Simulation::None) {
    PartitionConfig pc;
    pc.numNodes = opts.nodes;
    pc.numQueryBatches = opts.batches ? opts.batches : opts.nodes;
    pc.mode = opts.simulate == Simulation::Ring ? PartitionMode::DistributedRing : PartitionMode::Replicated;
    JoinParams jp;
    jp.epsilon = opts.epsilon;
    jp.k = k;
    jp.flags = opts.flags;
    jp.seed = opts.seed;
    jp.workers = opts.threads;
    const auto sim = opts.simulate == Simulation::Ring ? runRing(d, pc, jp) : runReplicated(d, pc, jp);
    if (sortedPairs(sim.table) != sortedPairs(table)) throw Error("simulated join disagrees with the pipeline");

    SimulationReport sr;
    sr.mode = opts.simulate;
    sr.nodes = pc.numNodes;
    sr.batches = pc.numQueryBatches;
    sr.totalComm = sim.trace.totalComm;
    sr.commTime = sim.trace.commTime;
    std::uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& b : sim.trace.perBatch) {
      lo = std::min(lo, b.distanceTests);
      hi = std::max(hi, b.distanceTests);
    }
    sr.batchWorkRatio = lo > 0 ? static_cast<double>(hi) / static_cast<double>(lo) : 0.0;
    std::vector<std::size_t> counts;
    for (std::size_t p = 1; p <= pc.numQueryBatches; p *= 2) {
      if (pc.numQueryBatches % p == 0) counts.push_back(p);
    }
    sr.speedup = projectSpeedup(sim.trace, counts);
    report.simulation = sr;
    if (!opts.outTrace.empty()) {
      auto out = openOut(opts.outTrace);
      writeTraceCsv(out, sim.trace);
      out << '\n';
      writeSpeedupCsv(out, sr.speedup);
    }
  }
  return report;
}

void writeReportText(std::ostream& out, const RunReport& r) {
  out << "dataset        " << r.dataset << "\n"
      << "|D| x n        " << r.count << " x " << r.dims << "\n"
      << "epsilon        " << r.epsilon << "\n"
      << "k              " << r.k << "\n"
      << "flags          reorder=" << r.reorder << " sortidu=" << r.flags.sortidu << " shortc=" << r.flags.shortc
      << "\n"
      << "non-empty |G|  " << r.nonEmptyCells << "\n"
      << "|R|            " << r.resultPairs << " (estimated " << r.estimatedPairs << ")\n"
      << "S_D            " << r.selectivity << "\n"
      << "batches        " << r.numBatches << " (retries " << r.retries << ")\n"
      << "distance tests " << r.counters.distanceTests << "\n"
      << "mac steps      " << r.counters.macSteps << "\n"
      << "cells visited  " << r.counters.cellsVisited << "\n";
  if (!r.costProfile.empty()) {
    out << "k profile      ";
    for (const auto& p : r.costProfile) out << p.k << ":" << p.total() << ' ';
    out << "\n";
  }
  if (r.oraclePass) out << "oracle         " << (*r.oraclePass ? "PASS" : "FAIL") << "\n";
  if (r.simulation) {
    const auto& s = *r.simulation;
    out << "simulation     " << simulationName(s.mode) << " nodes=" << s.nodes << " batches=" << s.batches
        << " totalComm=" << s.totalComm << " batchWorkRatio=" << s.batchWorkRatio << "\n";
    for (const auto& row : s.speedup) {
      out << "  |p|=" << row.nodes << " makespan=" << row.makespan << " speedup=" << row.speedup << "\n";
    }
  }
  const auto& t = r.times;
  out << "times (s)      load=" << t.load << " reorder=" << t.reorder << " tune=" << t.tune << " index=" << t.index
      << " estimate=" << t.estimate << " join=" << t.join << " table=" << t.table << "\n";
}

std::string reportJson(const RunReport& r, bool includeTimes) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["count"] = r.count;
  j["dims"] = r.dims;
  j["epsilon"] = r.epsilon;
  j["k"] = r.k;
  j["reorder"] = r.reorder;
  j["sortidu"] = r.flags.sortidu;
  j["shortc"] = r.flags.shortc;
  j["perm"] = r.perm;
  j["resultPairs"] = r.resultPairs;
  j["selectivity"] = r.selectivity;
  j["estimatedPairs"] = r.estimatedPairs;
  j["numBatches"] = r.numBatches;
  j["retries"] = r.retries;
  j["nonEmptyCells"] = r.nonEmptyCells;
  j["counters"] = {{"distanceTests", r.counters.distanceTests},
                   {"macSteps", r.counters.macSteps},
                   {"shortcExits", r.counters.shortcExits},
                   {"cellsProbed", r.counters.cellsProbed},
                   {"cellsVisited", r.counters.cellsVisited}};
  if (!r.costProfile.empty()) {
    auto& arr = j["costProfile"] = nlohmann::ordered_json::array();
    for (const auto& p : r.costProfile) {
      arr.push_back({{"k", p.k}, {"searchOps", p.searchOps}, {"compareOps", p.compareOps},
                     {"nonEmptyCells", p.nonEmptyCells}});
    }
  }
  if (r.oraclePass) j["oracle"] = *r.oraclePass ? "PASS" : "FAIL";
  if (r.simulation) {
    const auto& s = *r.simulation;
    auto& sj = j["simulation"];
    sj["mode"] = simulationName(s.mode);
    sj["nodes"] = s.nodes;
    sj["batches"] = s.batches;
    sj["totalComm"] = s.totalComm;
    sj["commTime"] = s.commTime;
    sj["batchWorkRatio"] = s.batchWorkRatio;
    auto& rows = sj["speedup"] = nlohmann::ordered_json::array();
    for (const auto& row : s.speedup) {
      rows.push_back({{"nodes", row.nodes}, {"makespan", row.makespan}, {"speedup", row.speedup}});
    }
  }
  if (includeTimes) {
    const auto& t = r.times;
    j["times"] = {{"load", t.load}, {"reorder", t.reorder}, {"tune", t.tune}, {"index", t.index},
                  {"estimate", t.estimate}, {"join", t.join}, {"table", t.table}};
  }
  return j.dump();
}

}  // namespace hdjoin::cli
