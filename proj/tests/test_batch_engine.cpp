#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "hdjoin/batch_engine.hpp"
#include "hdjoin/oracle.hpp"

using namespace hdjoin;

namespace {

struct JoinSetup {
  Dataset d;
  GridParams gp;
  GridIndex g;
  KernelConfig cfg;

  JoinSetup(Dataset data, float eps, std::size_t k, KernelFlags flags = {true, true})
      : d(std::move(data)),
        gp(GridParams::fromData(d, eps, k)),
        g(buildIndex(d, gp, defaultUDim(k, d.dims))),
        cfg(KernelConfig::make(eps, flags)) {}

  std::uint64_t exactPairs() const {
    return runKernel(QueryRange{0, static_cast<PointId>(d.count)}, d, g, gp, cfg).buffer.count();
  }
};

}  // namespace

TEST(Estimate, FullSampleIsExact) {
  JoinSetup s(genExponential(2000, 8, 40.0, 1), 0.06f, 4);
  const auto est = estimateResultSize(s.d, s.g, s.gp, s.cfg, 1.0, 3);
  EXPECT_EQ(est.estimatedPairs, s.exactPairs());
  EXPECT_EQ(est.sampleSize, s.d.count);
}

TEST(Estimate, TinyEpsilonGivesSelfPairsOnly) {
  JoinSetup s(genUniform(1000, 4, 2), 1e-6f, 3);
  EXPECT_EQ(estimateResultSize(s.d, s.g, s.gp, s.cfg, 0.1, 3).estimatedPairs, 1000u);
}

TEST(Estimate, OnePercentWithinFactorTwo) {
  JoinSetup s(genExponential(20000, 16, 40.0, 1), 0.05f, 6);
  const auto est = estimateResultSize(s.d, s.g, s.gp, s.cfg, 0.01, 7);
  const double exact = static_cast<double>(s.exactPairs());
  EXPECT_EQ(est.sampleSize, 200u);
  EXPECT_GE(static_cast<double>(est.estimatedPairs), exact / 2);
  EXPECT_LE(static_cast<double>(est.estimatedPairs), exact * 2);
  EXPECT_GT(est.comparisons, 0u);
}

TEST(Plan, BatchCounts) {
  EXPECT_EQ(planBatches(300'000'000, 100'000'000, 1000).numBatches, 3u);
  EXPECT_EQ(planBatches(100'000, 100'000'000, 1000).numBatches, 3u);
  EXPECT_EQ(planBatches(1'000'000'000, 100'000'000, 1000).numBatches, 10u);
  EXPECT_EQ(planBatches(300'000'001, 100'000'000, 1000).numBatches, 4u);
}

TEST(Plan, RangesPartitionQueriesEvenly) {
  for (std::size_t count : {1u, 2u, 7u, 1000u, 1001u}) {
    for (std::uint64_t est : {1ull, 5'000ull, 10'000'000ull}) {
      const auto plan = planBatches(est, 1000, count);
      ASSERT_GE(plan.numBatches, 3u);
      ASSERT_EQ(plan.ranges.size(), plan.numBatches);
      PointId next = 0;
      std::size_t lo = SIZE_MAX, hi = 0;
      for (const auto& r : plan.ranges) {
        EXPECT_EQ(r.begin, next);
        next = r.end;
        lo = std::min(lo, r.size());
        hi = std::max(hi, r.size());
      }
      EXPECT_EQ(next, count);
      EXPECT_LE(hi - lo, 1u);
    }
  }
}

TEST(Pipeline, ThreeBatchesEqualSingleBatch) {
  JoinSetup s(genUniform(3000, 6, 3), 0.15f, 4);
  const auto three = executePipeline(planBatches(1, 1'000'000, s.d.count), s.d, s.g, s.gp, s.cfg);
  BatchPlan single;
  single.batchSize = UINT64_MAX / 4;
  single.numBatches = 1;
  single.ranges = {QueryRange{0, static_cast<PointId>(s.d.count)}};
  EXPECT_EQ(three, executePipeline(single, s.d, s.g, s.gp, s.cfg));
}

TEST(Pipeline, OverlappedEqualsSequential) {
  JoinSetup s(genExponential(3000, 8, 40.0, 4), 0.05f, 5);
  const auto plan = planBatches(estimateResultSize(s.d, s.g, s.gp, s.cfg, 0.05, 1).estimatedPairs, 5000, s.d.count);
  PipelineOptions seq;
  seq.overlap = false;
  const auto reference = executePipeline(plan, s.d, s.g, s.gp, s.cfg, seq);
  for (unsigned w : {1u, 2u, 4u}) {
    PipelineOptions o;
    o.workers = w;
    EXPECT_EQ(executePipeline(plan, s.d, s.g, s.gp, s.cfg, o), reference);
  }
}

TEST(Pipeline, SelfOnlyBatchAdvancesOffsetsByOne) {
  JoinSetup s(genUniform(500, 4, 9), 1e-7f, 2);
  const auto t = executePipeline(planBatches(500, 100, s.d.count), s.d, s.g, s.gp, s.cfg);
  ASSERT_EQ(t.queryCount(), 500u);
  for (PointId q = 0; q < 500; ++q) {
    EXPECT_EQ(t.offsets[q + 1] - t.offsets[q], 1u);
    EXPECT_EQ(t.neighbors(q)[0], q);
  }
}

TEST(Pipeline, UnderestimateTriggersRetryAndStaysCorrect) {
  JoinSetup s(genExponential(1500, 6, 40.0, 12), 0.08f, 3);
  // Force the estimate to |D| on dense data so every batch overflows.
  const auto plan = planBatches(s.d.count, s.d.count / 3, s.d.count);
  PipelineStats stats;
  const auto t = executePipeline(plan, s.d, s.g, s.gp, s.cfg, {}, &stats);
  EXPECT_GT(stats.retries, 0u);
  EXPECT_GT(stats.batchesRun, plan.numBatches);
  EXPECT_EQ(sortedPairs(t), bruteJoin(s.d, 0.08f));
}

TEST(Table, TotalityAndSelectivity) {
  JoinSetup s(genExponential(1000, 6, 40.0, 2), 0.07f, 3);
  const auto t = executePipeline(planBatches(1, 1, s.d.count), s.d, s.g, s.gp, s.cfg);
  std::uint64_t sum = 0;
  for (PointId q = 0; q < t.queryCount(); ++q) {
    EXPECT_GE(t.neighbors(q).size(), 1u);
    sum += t.neighbors(q).size();
  }
  EXPECT_EQ(sum, t.totalPairs());
  EXPECT_EQ(selectivity(t, s.d), (double(t.totalPairs()) - 1000.0) / 1000.0);
}

TEST(Selectivity, Formula) {
  EXPECT_EQ(selectivity(30, 10), 2.0);
  EXPECT_EQ(selectivity(10, 10), 0.0);
}

TEST(AppendBatch, RejectsOutOfOrderKeys) {
  NeighborTable t;
  PairBuffer b;
  b.pairs = {{1, 1}, {0, 0}};
  EXPECT_THROW(appendBatch(t, b, {0, 2}), InvalidArgument);
  NeighborTable t2;
  EXPECT_THROW(appendBatch(t2, PairBuffer{}, {1, 2}), InvalidArgument);
}

TEST(Export, TextFormat) {
  NeighborTable t;
  t.offsets = {0, 2, 3};
  t.neighborIds = {0, 1, 1};
  std::ostringstream out;
  writeTableText(out, t);
  EXPECT_EQ(out.str(), "0: 0 1\n1: 1\n");
}

TEST(Export, BinaryLayoutAndRoundTrip) {
  NeighborTable t;
  t.offsets = {0, 2, 3};
  t.neighborIds = {0, 1, 1};
  std::stringstream buf;
  writeTableBinary(buf, t);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u * (2 + 3 + 3));
  EXPECT_EQ(bytes.substr(0, 8), std::string("\x02\0\0\0\x03\0\0\0", 8));
  EXPECT_EQ(readTableBinary(buf), t);
}
