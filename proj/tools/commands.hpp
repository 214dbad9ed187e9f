#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "fsnet/config.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet::cli {

/// Parses argv, runs one subcommand and returns its exit code:
/// 0 success, 1 validation or config error, 2 runtime or numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct BenchRow {
  Shape shape;
  Variant variant = Variant::v0;
  std::size_t params = 0;  // learnable scalars the variant actually uses
  double median_ms = 0.0;
  double stdev_ms = 0.0;
  std::size_t peak_bytes = 0;  // estimate of live buffers inside one task
  std::size_t tasks = 0;
};

struct BenchOptions {
  std::size_t way = 5;
  std::size_t shot = 5;
  std::size_t queries = 15;
  std::size_t tasks = 20;
  std::size_t warmup = 3;
  std::uint64_t seed = 0;
  std::vector<Shape> scales{{64, 5, 5}, {40, 4, 4}};
};

/// V0 and V3 per-task timings, single-threaded, for each scale in order.
std::vector<BenchRow> run_bench(const BenchOptions& options);

std::size_t estimate_peak_bytes(const Shape& shape, std::size_t way, std::size_t shot,
                                std::size_t queries, std::size_t d_max, Variant variant);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle and round-trip checks; every entry is independent of the others.
std::vector<CheckResult> run_selftest();

}  // namespace fsnet::cli
