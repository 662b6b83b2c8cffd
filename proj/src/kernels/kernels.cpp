#include "unicorn/kernels/kernels.hpp"

#include <omp.h>

#include "unicorn/core/error.hpp"

namespace unicorn::kernels {
namespace {

inline double row_sq_distance(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

void check_distance_args(std::span<const double> queries, std::span<const double> refs, std::size_t dim,
                         std::span<double> out) {
  if (dim == 0) fail("invalid_input", "distance kernel: dim must be positive");
  if (queries.size() % dim != 0 || refs.size() % dim != 0) fail("invalid_input", "distance kernel: ragged rows");
  if (out.size() != (queries.size() / dim) * (refs.size() / dim)) fail("invalid_input", "distance kernel: bad output size");
}

void check_label_args(std::span<const int> pred, std::span<const int> ref, int n_labels) {
  if (pred.size() != ref.size()) fail("invalid_input", "co-occurrence kernel: size mismatch");
  if (n_labels <= 0) fail("invalid_input", "co-occurrence kernel: n_labels must be positive");
}

[[noreturn]] void label_out_of_range() { fail("invalid_input", "co-occurrence kernel: label out of range"); }

void check_pair_args(std::span<const double> risks, std::span<const std::uint8_t> events, std::span<const double> times) {
  if (risks.size() != events.size() || risks.size() != times.size())
    fail("invalid_input", "concordance kernel: length mismatch");
}

// Contribution of ordered pair (i, j) in half-credit units.
inline void tally_pair(double ri, double rj, bool ei, bool ej, double ti, double tj, std::uint64_t& comparable,
                       std::uint64_t& halves) {
  if (!ei) return;
  if (ti < tj) {
    ++comparable;
    halves += ri > rj ? 2 : (ri == rj ? 1 : 0);
  } else if (ti == tj && ej && ri != rj) {
    ++comparable;
    halves += ri > rj ? 2 : 0;
  }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void pairwise_sq_distances(std::span<const double> queries, std::span<const double> refs, std::size_t dim,
                           std::span<double> out) {
  check_distance_args(queries, refs, dim, out);
  const long nq = static_cast<long>(queries.size() / dim);
  const std::size_t nr = refs.size() / dim;
#pragma omp parallel for schedule(static)
  for (long q = 0; q < nq; ++q) {
    const double* a = queries.data() + static_cast<std::size_t>(q) * dim;
    double* row = out.data() + static_cast<std::size_t>(q) * nr;
    for (std::size_t r = 0; r < nr; ++r) row[r] = row_sq_distance(a, refs.data() + r * dim, dim);
  }
}

std::vector<std::uint64_t> label_cooccurrence(std::span<const int> pred, std::span<const int> ref, int n_labels) {
  check_label_args(pred, ref, n_labels);
  const std::size_t cells = static_cast<std::size_t>(n_labels) * static_cast<std::size_t>(n_labels);
  std::vector<std::uint64_t> counts(cells, 0);
  const long n = static_cast<long>(pred.size());
  bool bad = false;
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(cells, 0);
    bool local_bad = false;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < n; ++i) {
      const int p = pred[static_cast<std::size_t>(i)];
      const int r = ref[static_cast<std::size_t>(i)];
      if (p < 0 || r < 0 || p >= n_labels || r >= n_labels) {
        local_bad = true;
        continue;
      }
      ++local[static_cast<std::size_t>(p) * static_cast<std::size_t>(n_labels) + static_cast<std::size_t>(r)];
    }
#pragma omp critical
    {
      for (std::size_t c = 0; c < cells; ++c) counts[c] += local[c];
      bad = bad || local_bad;
    }
  }
  if (bad) label_out_of_range();
  return counts;
}

ConcordanceCounts concordance_pairs(std::span<const double> risks, std::span<const std::uint8_t> events,
                                    std::span<const double> times) {
  check_pair_args(risks, events, times);
  const long n = static_cast<long>(risks.size());
  std::uint64_t comparable = 0;
  std::uint64_t halves = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : comparable, halves)
  for (long i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < risks.size(); ++j) {
      if (j == ui) continue;
      tally_pair(risks[ui], risks[j], events[ui] != 0, events[j] != 0, times[ui], times[j], comparable, halves);
    }
  }
  return {comparable, halves};
}

namespace serial {

void pairwise_sq_distances(std::span<const double> queries, std::span<const double> refs, std::size_t dim,
                           std::span<double> out) {
  check_distance_args(queries, refs, dim, out);
  const std::size_t nq = queries.size() / dim;
  const std::size_t nr = refs.size() / dim;
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t r = 0; r < nr; ++r) out[q * nr + r] = row_sq_distance(queries.data() + q * dim, refs.data() + r * dim, dim);
}

std::vector<std::uint64_t> label_cooccurrence(std::span<const int> pred, std::span<const int> ref, int n_labels) {
  check_label_args(pred, ref, n_labels);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_labels) * static_cast<std::size_t>(n_labels), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i];
    const int r = ref[i];
    if (p < 0 || r < 0 || p >= n_labels || r >= n_labels) label_out_of_range();
    ++counts[static_cast<std::size_t>(p) * static_cast<std::size_t>(n_labels) + static_cast<std::size_t>(r)];
  }
  return counts;
}

ConcordanceCounts concordance_pairs(std::span<const double> risks, std::span<const std::uint8_t> events,
                                    std::span<const double> times) {
  check_pair_args(risks, events, times);
  ConcordanceCounts c;
  for (std::size_t i = 0; i < risks.size(); ++i)
    for (std::size_t j = 0; j < risks.size(); ++j)
      if (i != j) tally_pair(risks[i], risks[j], events[i] != 0, events[j] != 0, times[i], times[j], c.comparable, c.concordant_halves);
  return c;
}

}  // namespace serial
}  // namespace unicorn::kernels
