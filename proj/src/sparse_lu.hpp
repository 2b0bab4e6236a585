#pragma once

#include <vector>

namespace floodsp::lp {

// Left-looking sparse LU with threshold partial pivoting: P B Q = L U, L unit
// lower triangular. Triangular solves skip zero entries, which pays off for the
// very sparse right-hand sides of simplex iterations.
class SparseLu {
 public:
  // B is square m x m in compressed-column form. Returns false if singular.
  bool factorize(int m, const std::vector<int>& col_start, const std::vector<int>& row_index,
                 const std::vector<double>& values);

  // In-place solves of B x = b and B^T x = b.
  void solve(double* b) const;
  void solve_transpose(double* b) const;

  [[nodiscard]] long nonzeros() const { return static_cast<long>(l_idx_.size() + u_idx_.size()) + m_; }

 private:
  int m_ = 0;
  std::vector<int> pinv_;  // row -> pivot step
  std::vector<int> q_;     // pivot step -> column
  std::vector<int> l_start_, l_idx_;  // strictly lower part, by column, pivot numbering
  std::vector<double> l_val_;
  std::vector<int> u_start_, u_idx_;  // strictly upper part, by column
  std::vector<double> u_val_;
  std::vector<double> u_diag_;
  std::vector<int> lt_start_, lt_idx_;  // row-wise copies for transposed solves
  std::vector<double> lt_val_;
  std::vector<int> ut_start_, ut_idx_;
  std::vector<double> ut_val_;
  mutable std::vector<double> work_;
};

}  // namespace floodsp::lp
