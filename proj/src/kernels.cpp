#include "fendi/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace fendi::kernels {

namespace {

inline void update_row(double* row, const double* prow, int pivot_col,
                       std::span<const int> pivot_nz, double drop) {
  const double factor = row[pivot_col];
  if (factor == 0.0) return;
  for (int c : pivot_nz) {
    double v = row[c] - factor * prow[c];
    row[c] = std::abs(v) < drop ? 0.0 : v;
  }
  row[pivot_col] = 0.0;
}

}  // namespace

void eliminate_column(std::span<double> tableau, int rows, int stride, int pivot_row,
                      int pivot_col, std::span<const int> pivot_nz, double drop, Exec exec) {
  double* base = tableau.data();
  const double* prow = base + static_cast<std::ptrdiff_t>(pivot_row) * stride;
  const long work = static_cast<long>(rows) * static_cast<long>(pivot_nz.size());
  if (exec == Exec::kParallel && work >= kParallelMinWork) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
      if (i == pivot_row) continue;
      update_row(base + static_cast<std::ptrdiff_t>(i) * stride, prow, pivot_col, pivot_nz, drop);
    }
  } else {
    for (int i = 0; i < rows; ++i) {
      if (i == pivot_row) continue;
      update_row(base + static_cast<std::ptrdiff_t>(i) * stride, prow, pivot_col, pivot_nz, drop);
    }
  }
}

void eliminate_column_reference(std::span<double> tableau, int rows, int stride,
                                int pivot_row, int pivot_col, double drop) {
  double* base = tableau.data();
  const double* prow = base + static_cast<std::ptrdiff_t>(pivot_row) * stride;
  for (int i = 0; i < rows; ++i) {
    if (i == pivot_row) continue;
    double* row = base + static_cast<std::ptrdiff_t>(i) * stride;
    const double factor = row[pivot_col];
    if (factor == 0.0) continue;
    for (int c = 0; c < stride; ++c) {
      if (prow[c] == 0.0) continue;
      double v = row[c] - factor * prow[c];
      row[c] = std::abs(v) < drop ? 0.0 : v;
    }
    row[pivot_col] = 0.0;
  }
}

void reduced_costs(std::span<const int> col_start, std::span<const int> row_index,
                   std::span<const double> values, std::span<const double> cost,
                   std::span<const double> y, std::span<double> out, Exec exec) {
  const int cols = static_cast<int>(cost.size());
  const long work = static_cast<long>(values.size());
  auto one = [&](int j) {
    double d = cost[j];
    for (int p = col_start[j]; p < col_start[j + 1]; ++p) d -= y[row_index[p]] * values[p];
    out[j] = d;
  };
  if (exec == Exec::kParallel && work >= kParallelMinWork) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < cols; ++j) one(j);
  } else {
    for (int j = 0; j < cols; ++j) one(j);
  }
}

}  // namespace fendi::kernels
