#include "sparse_lu.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <cmath>

namespace floodsp::lp {

namespace {

constexpr double kPivotThreshold = 0.1;
constexpr double kSingularTol = 1e-11;

void transpose(int m, const std::vector<int>& start, const std::vector<int>& idx, const std::vector<double>& val,
               std::vector<int>& t_start, std::vector<int>& t_idx, std::vector<double>& t_val) {
  t_start.assign(static_cast<size_t>(m) + 1, 0);
  for (int i : idx) ++t_start[static_cast<size_t>(i) + 1];
  for (int i = 0; i < m; ++i) t_start[static_cast<size_t>(i) + 1] += t_start[static_cast<size_t>(i)];
  t_idx.resize(idx.size());
  t_val.resize(val.size());
  std::vector<int> next(t_start.begin(), t_start.end() - 1);
  for (int j = 0; j < m; ++j) {
    for (int p = start[static_cast<size_t>(j)]; p < start[static_cast<size_t>(j) + 1]; ++p) {
      const int slot = next[static_cast<size_t>(idx[static_cast<size_t>(p)])]++;
      t_idx[static_cast<size_t>(slot)] = j;
      t_val[static_cast<size_t>(slot)] = val[static_cast<size_t>(p)];
    }
  }
}

}  // namespace

bool SparseLu::factorize(int m, const std::vector<int>& col_start, const std::vector<int>& row_index,
                         const std::vector<double>& values) {
  m_ = m;
  const auto M = static_cast<size_t>(m);
  pinv_.assign(M, -1);
  q_.assign(M, 0);
  l_start_.assign(1, 0);
  l_idx_.clear();
  l_val_.clear();
  u_start_.assign(1, 0);
  u_idx_.clear();
  u_val_.clear();
  u_diag_.assign(M, 0.0);
  work_.assign(M, 0.0);
  if (m == 0) return true;

  {
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::ColMajor, int>> mat(
        m, m, static_cast<Eigen::Index>(row_index.size()), col_start.data(), row_index.data(), values.data());
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> copy = mat;
    copy.makeCompressed();
    Eigen::COLAMDOrdering<int>::PermutationType perm;
    Eigen::COLAMDOrdering<int>()(copy, perm);
    for (int c = 0; c < m; ++c) q_[static_cast<size_t>(perm.indices()[c])] = c;
  }

  std::vector<int> row_count(M, 0);
  for (int r : row_index) ++row_count[static_cast<size_t>(r)];

  std::vector<double> x(M, 0.0);
  std::vector<int> xi(M), stack(M), pstack(M), mark(M, -1);
  for (int k = 0; k < m; ++k) {
    const int col = q_[static_cast<size_t>(k)];
    // Nonzero pattern of L \ B(:, col) in topological order, xi[top..m).
    int top = m;
    for (int p = col_start[static_cast<size_t>(col)]; p < col_start[static_cast<size_t>(col) + 1]; ++p) {
      const int root = row_index[static_cast<size_t>(p)];
      if (mark[static_cast<size_t>(root)] == k) continue;
      int head = 0;
      stack[0] = root;
      while (head >= 0) {
        const int j = stack[static_cast<size_t>(head)];
        const int J = pinv_[static_cast<size_t>(j)];
        if (mark[static_cast<size_t>(j)] != k) {
          mark[static_cast<size_t>(j)] = k;
          pstack[static_cast<size_t>(head)] = J < 0 ? 0 : l_start_[static_cast<size_t>(J)];
        }
        const int end = J < 0 ? 0 : l_start_[static_cast<size_t>(J) + 1];
        bool done = true;
        for (int q = pstack[static_cast<size_t>(head)]; q < end; ++q) {
          const int i = l_idx_[static_cast<size_t>(q)];
          if (mark[static_cast<size_t>(i)] == k) continue;
          pstack[static_cast<size_t>(head)] = q + 1;
          stack[static_cast<size_t>(++head)] = i;
          done = false;
          break;
        }
        if (done) {
          --head;
          xi[static_cast<size_t>(--top)] = j;
        }
      }
    }
    for (int p = col_start[static_cast<size_t>(col)]; p < col_start[static_cast<size_t>(col) + 1]; ++p)
      x[static_cast<size_t>(row_index[static_cast<size_t>(p)])] = values[static_cast<size_t>(p)];
    for (int p = top; p < m; ++p) {
      const int j = xi[static_cast<size_t>(p)];
      const int J = pinv_[static_cast<size_t>(j)];
      if (J < 0) continue;
      const double xj = x[static_cast<size_t>(j)];
      if (xj == 0.0) continue;
      for (int q = l_start_[static_cast<size_t>(J)]; q < l_start_[static_cast<size_t>(J) + 1]; ++q)
        x[static_cast<size_t>(l_idx_[static_cast<size_t>(q)])] -= l_val_[static_cast<size_t>(q)] * xj;
    }

    double amax = 0.0;
    for (int p = top; p < m; ++p) {
      const int i = xi[static_cast<size_t>(p)];
      if (pinv_[static_cast<size_t>(i)] < 0) amax = std::max(amax, std::abs(x[static_cast<size_t>(i)]));
    }
    if (amax <= kSingularTol) {
      for (int p = top; p < m; ++p) x[static_cast<size_t>(xi[static_cast<size_t>(p)])] = 0.0;
      return false;
    }
    int ipiv = -1;
    for (int p = top; p < m; ++p) {
      const int i = xi[static_cast<size_t>(p)];
      const double v = std::abs(x[static_cast<size_t>(i)]);
      if (pinv_[static_cast<size_t>(i)] >= 0 || v < kPivotThreshold * amax) continue;
      if (ipiv < 0 || row_count[static_cast<size_t>(i)] < row_count[static_cast<size_t>(ipiv)] ||
          (row_count[static_cast<size_t>(i)] == row_count[static_cast<size_t>(ipiv)] &&
           v > std::abs(x[static_cast<size_t>(ipiv)]))) {
        ipiv = i;
      }
    }
    const double pivot = x[static_cast<size_t>(ipiv)];
    u_diag_[static_cast<size_t>(k)] = pivot;
    for (int p = top; p < m; ++p) {
      const int i = xi[static_cast<size_t>(p)];
      const double v = x[static_cast<size_t>(i)];
      x[static_cast<size_t>(i)] = 0.0;
      if (i == ipiv || v == 0.0) continue;
      const int I = pinv_[static_cast<size_t>(i)];
      if (I >= 0) {
        u_idx_.push_back(I);
        u_val_.push_back(v);
      } else {
        l_idx_.push_back(i);
        l_val_.push_back(v / pivot);
      }
    }
    pinv_[static_cast<size_t>(ipiv)] = k;
    l_start_.push_back(static_cast<int>(l_idx_.size()));
    u_start_.push_back(static_cast<int>(u_idx_.size()));
  }
  for (int& i : l_idx_) i = pinv_[static_cast<size_t>(i)];
  transpose(m, l_start_, l_idx_, l_val_, lt_start_, lt_idx_, lt_val_);
  transpose(m, u_start_, u_idx_, u_val_, ut_start_, ut_idx_, ut_val_);
  return true;
}

void SparseLu::solve(double* b) const {
  auto& w = work_;
  for (int i = 0; i < m_; ++i) w[static_cast<size_t>(pinv_[static_cast<size_t>(i)])] = b[i];
  for (int k = 0; k < m_; ++k) {
    const double v = w[static_cast<size_t>(k)];
    if (v == 0.0) continue;
    for (int p = l_start_[static_cast<size_t>(k)]; p < l_start_[static_cast<size_t>(k) + 1]; ++p)
      w[static_cast<size_t>(l_idx_[static_cast<size_t>(p)])] -= l_val_[static_cast<size_t>(p)] * v;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    if (w[static_cast<size_t>(k)] == 0.0) continue;
    const double v = w[static_cast<size_t>(k)] /= u_diag_[static_cast<size_t>(k)];
    for (int p = u_start_[static_cast<size_t>(k)]; p < u_start_[static_cast<size_t>(k) + 1]; ++p)
      w[static_cast<size_t>(u_idx_[static_cast<size_t>(p)])] -= u_val_[static_cast<size_t>(p)] * v;
  }
  for (int k = 0; k < m_; ++k) b[q_[static_cast<size_t>(k)]] = w[static_cast<size_t>(k)];
}

void SparseLu::solve_transpose(double* b) const {
  auto& w = work_;
  for (int k = 0; k < m_; ++k) w[static_cast<size_t>(k)] = b[q_[static_cast<size_t>(k)]];
  for (int k = 0; k < m_; ++k) {
    if (w[static_cast<size_t>(k)] == 0.0) continue;
    const double v = w[static_cast<size_t>(k)] /= u_diag_[static_cast<size_t>(k)];
    for (int p = ut_start_[static_cast<size_t>(k)]; p < ut_start_[static_cast<size_t>(k) + 1]; ++p)
      w[static_cast<size_t>(ut_idx_[static_cast<size_t>(p)])] -= ut_val_[static_cast<size_t>(p)] * v;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    const double v = w[static_cast<size_t>(k)];
    if (v == 0.0) continue;
    for (int p = lt_start_[static_cast<size_t>(k)]; p < lt_start_[static_cast<size_t>(k) + 1]; ++p)
      w[static_cast<size_t>(lt_idx_[static_cast<size_t>(p)])] -= lt_val_[static_cast<size_t>(p)] * v;
  }
  for (int i = 0; i < m_; ++i) b[i] = w[static_cast<size_t>(pinv_[static_cast<size_t>(i)])];
}

}  // namespace floodsp::lp
