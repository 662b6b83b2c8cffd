#pragma once

// Data-parallel inner loops shared by the metrics and adaptors. Each kernel
// has an OpenMP implementation (unicorn::kernels) and a plain serial twin
// (unicorn::kernels::serial) kept as the reference for tests and benchmarks.
// Both produce bit-identical results: per-element work is the same, and the
// only cross-thread reductions are over integers.

#include <cstdint>
#include <span>
#include <vector>

namespace unicorn::kernels {

/// out[q * n_refs + r] = squared Euclidean distance between query row q and
/// reference row r. Rows are `dim` contiguous doubles.
void pairwise_sq_distances(std::span<const double> queries, std::span<const double> refs, std::size_t dim,
                           std::span<double> out);

/// Joint label histogram: counts[p * n_labels + r] = #voxels with predicted
/// label p and reference label r. Labels must lie in [0, n_labels).
std::vector<std::uint64_t> label_cooccurrence(std::span<const int> pred, std::span<const int> ref, int n_labels);

struct ConcordanceCounts {
  std::uint64_t comparable = 0;
  std::uint64_t concordant_halves = 0;  // 2 per concordant pair, 1 per risk tie
  bool operator==(const ConcordanceCounts&) const = default;
};

/// Ordered-pair concordance tally for right-censored data.
ConcordanceCounts concordance_pairs(std::span<const double> risks, std::span<const std::uint8_t> events,
                                    std::span<const double> times);

namespace serial {

void pairwise_sq_distances(std::span<const double> queries, std::span<const double> refs, std::size_t dim,
                           std::span<double> out);
std::vector<std::uint64_t> label_cooccurrence(std::span<const int> pred, std::span<const int> ref, int n_labels);
ConcordanceCounts concordance_pairs(std::span<const double> risks, std::span<const std::uint8_t> events,
                                    std::span<const double> times);

}  // namespace serial

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();

}  // namespace unicorn::kernels
