#include "hdjoin/batch_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "hdjoin/parallel.hpp"

namespace hdjoin {

ResultEstimate estimateResultSize(const Dataset& d, const GridIndex& g, const GridParams& gp,
                                  const KernelConfig& cfg, double fraction, std::uint64_t seed,
                                  unsigned workers) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("sample fraction must be in (0,1]");
  const auto m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d.count))));
  auto sample = shuffledPrefix(d.count, m, seed);
  std::sort(sample.begin(), sample.end());

  std::vector<std::uint64_t> pairs(std::max(1u, workers), 0);
  std::vector<WorkCounters> work(pairs.size());
  parallelChunks(sample.size(), pairs.size(), workers, [&](std::size_t c, std::size_t b, std::size_t e) {
    std::vector<PointId> neighbors;
    for (std::size_t i = b; i < e; ++i) {
      neighbors.clear();
      queryPointInto(sample[i], d, g, gp, cfg, neighbors, work[c]);
      pairs[c] += neighbors.size();
    }
  });

  ResultEstimate est;
  est.sampleSize = m;
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    est.sampledPairs += pairs[c];
    est.comparisons += work[c].distanceTests;
  }
  // Scale by the realised sample fraction m/|D|, which equals f when f*|D| is integral.
  est.estimatedPairs = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(est.sampledPairs) * static_cast<double>(d.count) / static_cast<double>(m)));
  return est;
}

BatchPlan planBatches(std::uint64_t est, std::uint64_t batchSize, std::size_t pointCount,
                      std::size_t minBatches) {
  if (batchSize == 0) throw InvalidArgument("batch size must be positive");
  BatchPlan plan;
  plan.estTotalPairs = est;
  plan.batchSize = batchSize;
  plan.numBatches = std::max<std::size_t>(minBatches, static_cast<std::size_t>((est + batchSize - 1) / batchSize));
  plan.ranges.reserve(plan.numBatches);
  for (std::size_t b = 0; b < plan.numBatches; ++b) {
    plan.ranges.push_back({static_cast<PointId>(pointCount * b / plan.numBatches),
                           static_cast<PointId>(pointCount * (b + 1) / plan.numBatches)});
  }
  return plan;
}

void appendBatch(NeighborTable& table, const PairBuffer& batch, QueryRange range) {
  if (table.queryCount() != range.begin) throw InvalidArgument("batch does not continue the table");
  table.neighborIds.reserve(table.neighborIds.size() + batch.count());
  std::size_t i = 0;
  for (PointId q = range.begin; q < range.end; ++q) {
    for (; i < batch.pairs.size() && batch.pairs[i].first == q; ++i) {
      table.neighborIds.push_back(batch.pairs[i].second);
    }
    table.offsets.push_back(table.neighborIds.size());
  }
  if (i != batch.pairs.size()) throw InvalidArgument("batch keys out of order or outside range");
}

namespace {

struct CompletedBatch {
  QueryRange range;
  PairBuffer pairs;
};

/// Bounded single-producer single-consumer handoff.
class BatchQueue {
 public:
  explicit BatchQueue(std::size_t depth) : depth_(std::max<std::size_t>(1, depth)) {}

  /// Returns false once the consumer has cancelled.
  bool push(CompletedBatch b) {
    std::unique_lock lock(mu_);
    notFull_.wait(lock, [&] { return items_.size() < depth_ || cancelled_; });
    if (cancelled_) return false;
    items_.push_back(std::move(b));
    notEmpty_.notify_one();
    return true;
  }
  void cancel() {
    std::lock_guard lock(mu_);
    cancelled_ = true;
    notFull_.notify_one();
  }
  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    notEmpty_.notify_one();
  }
  std::optional<CompletedBatch> pop() {
    std::unique_lock lock(mu_);
    notEmpty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    CompletedBatch b = std::move(items_.front());
    items_.pop_front();
    notFull_.notify_one();
    return b;
  }

 private:
  std::size_t depth_;
  std::mutex mu_;
  std::condition_variable notFull_, notEmpty_;
  std::deque<CompletedBatch> items_;
  bool closed_ = false;
  bool cancelled_ = false;
};

struct Cancelled {};

}  // namespace

NeighborTable executePipeline(const BatchPlan& plan, const Dataset& d, const GridIndex& g,
                              const GridParams& gp, const KernelConfig& cfg, const PipelineOptions& opts,
                              PipelineStats* stats) {
  PipelineStats local;
  const double budget = opts.overflowFactor * static_cast<double>(plan.batchSize);
  const std::size_t capacity =
      budget >= static_cast<double>(std::numeric_limits<std::size_t>::max())
          ? std::numeric_limits<std::size_t>::max()
          : static_cast<std::size_t>(budget);

  // Runs every planned range in order, splitting any range whose output
  // exceeds the budget. `emit` receives completed batches in query order.
  auto produce = [&](auto&& emit) {
    std::deque<QueryRange> work(plan.ranges.begin(), plan.ranges.end());
    while (!work.empty()) {
      const QueryRange r = work.front();
      work.pop_front();
      const bool splittable = r.size() > 1;
      KernelOutput out = runKernel(r, d, g, gp, cfg, {opts.workers, splittable ? capacity : SIZE_MAX});
      if (out.overflowed) {
        ++local.retries;
        const PointId mid = r.begin + static_cast<PointId>(r.size() / 2);
        work.push_front({mid, r.end});
        work.push_front({r.begin, mid});
        continue;
      }
      ++local.batchesRun;
      local.counters += out.counters;
      emit(CompletedBatch{r, std::move(out.buffer)});
    }
  };

  NeighborTable table;
  table.offsets.reserve(d.count + 1);
  if (!opts.overlap) {
    produce([&](CompletedBatch b) { appendBatch(table, b.pairs, b.range); });
  } else {
    BatchQueue queue(opts.depth);
    std::exception_ptr failure;
    std::jthread producer([&] {
      try {
        produce([&](CompletedBatch b) {
          if (!queue.push(std::move(b))) throw Cancelled{};
        });
      } catch (const Cancelled&) {
      } catch (...) {
        failure = std::current_exception();
      }
      queue.close();
    });
    try {
      while (auto b = queue.pop()) appendBatch(table, b->pairs, b->range);
    } catch (...) {
      queue.cancel();
      throw;
    }
    producer.join();
    if (failure) std::rethrow_exception(failure);
  }
  if (table.queryCount() != d.count) throw Error("batch plan does not cover every query point");
  if (stats) *stats = local;
  return table;
}

double selectivity(std::uint64_t resultPairs, std::size_t pointCount) {
  return (static_cast<double>(resultPairs) - static_cast<double>(pointCount)) / static_cast<double>(pointCount);
}

double selectivity(const NeighborTable& table, const Dataset& d) {
  return selectivity(table.totalPairs(), d.count);
}

void writeTableText(std::ostream& out, const NeighborTable& table) {
  for (PointId q = 0; q < table.queryCount(); ++q) {
    out << q << ':';
    for (PointId n : table.neighbors(q)) out << ' ' << n;
    out << '\n';
  }
}

namespace {

void putU32(std::ostream& out, std::uint64_t v) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw Error("value does not fit the u32 table format");
  auto x = static_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) x = __builtin_bswap32(x);
  char b[4];
  std::memcpy(b, &x, 4);
  out.write(b, 4);
}

std::uint32_t getU32(std::istream& in) {
  char b[4];
  if (!in.read(b, 4)) throw Error("truncated table file");
  std::uint32_t x = 0;
  std::memcpy(&x, b, 4);
  if constexpr (std::endian::native == std::endian::big) x = __builtin_bswap32(x);
  return x;
}

}  // namespace

void writeTableBinary(std::ostream& out, const NeighborTable& table) {
  putU32(out, table.queryCount());
  putU32(out, table.totalPairs());
  for (auto o : table.offsets) putU32(out, o);
  for (auto id : table.neighborIds) putU32(out, id);
}

NeighborTable readTableBinary(std::istream& in) {
  NeighborTable t;
  const std::uint32_t queries = getU32(in);
  const std::uint32_t pairs = getU32(in);
  t.offsets.resize(std::size_t{queries} + 1);
  for (auto& o : t.offsets) o = getU32(in);
  t.neighborIds.resize(pairs);
  for (auto& id : t.neighborIds) id = getU32(in);
  if (t.offsets.front() != 0 || t.offsets.back() != pairs) throw Error("inconsistent table offsets");
  return t;
}

}  // namespace hdjoin
