#include "hdjoin/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace hdjoin {

std::vector<PointId> shuffledPrefix(std::size_t count, std::size_t take, std::uint64_t seed) {
  std::vector<PointId> ids(count);
  std::iota(ids.begin(), ids.end(), PointId{0});
  take = std::min(take, count);
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(count - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(take);
  return ids;
}

Dataset Dataset::fromRows(std::vector<float> coords, std::size_t dims) {
  if (dims == 0) throw InvalidArgument("dataset needs at least one dimension");
  if (coords.empty()) throw EmptyInput("dataset has no points");
  if (coords.size() % dims != 0) {
    throw DimensionMismatch("coordinate count " + std::to_string(coords.size()) +
                            " is not a multiple of " + std::to_string(dims));
  }
  if (coords.size() / dims > std::numeric_limits<PointId>::max()) {
    throw InvalidArgument("too many points for 32-bit point ids");
  }
  Dataset d;
  d.count = coords.size() / dims;
  d.dims = dims;
  d.points = std::move(coords);
  d.perm.resize(dims);
  std::iota(d.perm.begin(), d.perm.end(), std::size_t{0});
  return d;
}

namespace {

bool isDelimiter(char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

Dataset parseCsv(std::istream& in, std::size_t dims) {
  std::vector<float> coords;
  std::string line;
  std::size_t row = 0;
  for (; std::getline(in, line); ++row) {
    const char* p = line.data();
    const char* end = p + line.size();
    std::size_t fields = 0;
    bool any = false;
    while (p < end) {
      while (p < end && isDelimiter(*p)) ++p;
      if (p == end) break;
      any = true;
      float v = 0.0f;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{} || (next < end && !isDelimiter(*next))) {
        throw ParseError(row, "non-numeric field");
      }
      if (!std::isfinite(v)) throw ParseError(row, "non-finite value");
      coords.push_back(v);
      ++fields;
      p = next;
    }
    if (!any) {
      --row;  // blank lines do not count as rows
      continue;
    }
    if (fields != dims) {
      throw DimensionMismatch("row " + std::to_string(row) + ": expected " + std::to_string(dims) +
                              " values, found " + std::to_string(fields));
    }
  }
  if (coords.empty()) throw EmptyInput("no data rows");
  return Dataset::fromRows(std::move(coords), dims);
}

Dataset parseF32(std::span<const std::byte> bytes, std::size_t dims) {
  if (dims == 0) throw InvalidArgument("dataset needs at least one dimension");
  if (bytes.empty()) throw EmptyInput("empty binary file");
  const std::size_t rowBytes = 4 * dims;
  if (bytes.size() % rowBytes != 0) {
    throw DimensionMismatch("binary length " + std::to_string(bytes.size()) +
                            " is not a multiple of " + std::to_string(rowBytes));
  }
  std::vector<float> coords(bytes.size() / 4);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, bytes.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    coords[i] = std::bit_cast<float>(bits);
    if (!std::isfinite(coords[i])) throw ParseError(i / dims, "non-finite value");
  }
  return Dataset::fromRows(std::move(coords), dims);
}

Dataset importDataset(const std::filesystem::path& path, Format format, std::size_t dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (format == Format::Csv) return parseCsv(in, dims);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parseF32(std::as_bytes(std::span<const char>(raw)), dims);
}

void writeCsv(std::ostream& out, const Dataset& d) {
  char buf[32];
  for (std::size_t i = 0; i < d.count; ++i) {
    for (std::size_t j = 0; j < d.dims; ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d.at(i, j));
      if (j) out.put(',');
      out.write(buf, end - buf);
    }
    out.put('\n');
  }
}

void writeF32(std::ostream& out, const Dataset& d) {
  for (float v : d.points) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    char b[4];
    std::memcpy(b, &bits, 4);
    out.write(b, 4);
  }
}

Dataset normalize(const Dataset& d) {
  Dataset out = d;
  for (std::size_t j = 0; j < d.dims; ++j) {
    float lo = d.at(0, j), hi = lo;
    for (std::size_t i = 1; i < d.count; ++i) {
      lo = std::min(lo, d.at(i, j));
      hi = std::max(hi, d.at(i, j));
    }
    const double span = static_cast<double>(hi) - lo;
    for (std::size_t i = 0; i < d.count; ++i) {
      float& v = out.points[i * d.dims + j];
      if (span == 0.0) {
        v = 0.0f;
      } else {
        v = static_cast<float>((static_cast<double>(d.at(i, j)) - lo) / span);
        v = std::clamp(v, 0.0f, 1.0f);
      }
    }
  }
  return out;
}

Dataset genExponential(std::size_t count, std::size_t dims, double lambda, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("count must be positive");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  Rng rng(seed);
  std::vector<float> coords(count * dims);
  for (float& v : coords) {
    for (;;) {
      const double x = -std::log1p(-rng.uniform()) / lambda;
      if (x <= 1.0) {
        v = static_cast<float>(x);
        break;
      }
    }
  }
  return Dataset::fromRows(std::move(coords), dims);
}

Dataset genUniform(std::size_t count, std::size_t dims, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("count must be positive");
  Rng rng(seed);
  std::vector<float> coords(count * dims);
  for (float& v : coords) v = std::min(static_cast<float>(rng.uniform()), std::nextafter(1.0f, 0.0f));
  return Dataset::fromRows(std::move(coords), dims);
}

DimStats estimateVariance(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("sample fraction must be in (0,1]");
  const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d.count)));
  if (m < 2) throw InvalidArgument("variance sample needs at least 2 points");
  const auto sample = shuffledPrefix(d.count, m, seed);

  DimStats s;
  s.sampleFraction = fraction;
  s.variance.assign(d.dims, 0.0);
  for (std::size_t j = 0; j < d.dims; ++j) {
    double mean = 0.0;
    for (PointId id : sample) mean += d.at(id, j);
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (PointId id : sample) {
      const double dev = d.at(id, j) - mean;
      ss += dev * dev;
    }
    s.variance[j] = ss / static_cast<double>(m - 1);
  }
  return s;
}

std::vector<std::size_t> varianceOrder(const DimStats& s) {
  std::vector<std::size_t> order(s.variance.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.variance[a] > s.variance[b]; });
  return order;
}

Dataset reorderByVariance(const Dataset& d, const DimStats& s) {
  if (s.variance.size() != d.dims) throw DimensionMismatch("variance stats do not match dataset dims");
  const auto order = varianceOrder(s);
  Dataset out = d;
  for (std::size_t i = 0; i < d.count; ++i) {
    for (std::size_t j = 0; j < d.dims; ++j) out.points[i * d.dims + j] = d.at(i, order[j]);
  }
  for (std::size_t j = 0; j < d.dims; ++j) out.perm[j] = d.perm[order[j]];
  return out;
}

}  // namespace hdjoin
