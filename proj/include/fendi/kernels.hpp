#pragma once

#include <span>

namespace fendi::kernels {

enum class Exec { kSerial, kParallel };

// Eliminates column `pivot_col` from every row of a row-major matrix except
// `pivot_row`, which must already be normalised (pivot entry == 1).
// `pivot_nz` lists the nonzero columns of the pivot row. Entries whose
// magnitude falls below `drop` after the update are flushed to zero.
void eliminate_column(std::span<double> tableau, int rows, int stride, int pivot_row,
                      int pivot_col, std::span<const int> pivot_nz, double drop, Exec exec);

// Reference implementation: dense sweep over every column, no sparsity.
void eliminate_column_reference(std::span<double> tableau, int rows, int stride,
                                int pivot_row, int pivot_col, double drop);

// out[j] = cost[j] - y . A[:, j] for a column-compressed matrix A.
void reduced_costs(std::span<const int> col_start, std::span<const int> row_index,
                   std::span<const double> values, std::span<const double> cost,
                   std::span<const double> y, std::span<double> out, Exec exec);

// Work (rows * pivot nonzeros, or matrix nonzeros) below which the parallel
// paths fall back to serial execution.
inline constexpr long kParallelMinWork = 1L << 16;

}  // namespace fendi::kernels
