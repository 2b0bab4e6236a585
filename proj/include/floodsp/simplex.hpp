#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "floodsp/lp.hpp"

namespace floodsp::lp {

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

/// Basis snapshot: one status per structural column followed by one per row
/// logical. Exactly num_constraints() entries are kBasic.
struct Basis {
  std::vector<VarStatus> status;
};

/// Bounded revised simplex over the computational form
///   A x - s = 0,  l <= x <= u,  rlo <= s <= rhi
/// with an LU-factored basis and product-form updates. Dual simplex is used
/// whenever the starting basis can be made dual feasible (always the case for
/// boxed problems and after bound changes in branch-and-bound); otherwise a
/// composite phase-1/phase-2 primal simplex runs.
class SimplexEngine {
 public:
  explicit SimplexEngine(const Model& model, LpOptions options = {});
  ~SimplexEngine();
  SimplexEngine(const SimplexEngine&) = delete;
  SimplexEngine& operator=(const SimplexEngine&) = delete;
  SimplexEngine(SimplexEngine&&) noexcept;
  SimplexEngine& operator=(SimplexEngine&&) noexcept;

  /// Bounds of structural column `var`; takes effect at the next solve().
  void set_bounds(int var, double lower, double upper);
  void reset_bounds();
  [[nodiscard]] double lower(int var) const;
  [[nodiscard]] double upper(int var) const;

  LpStatus solve();

  [[nodiscard]] Basis basis() const;
  void set_basis(const Basis& basis);

  [[nodiscard]] LpSolution solution() const;
  [[nodiscard]] double objective() const;
  [[nodiscard]] std::span<const double> values() const;
  [[nodiscard]] long iterations() const;
  [[nodiscard]] LpStatus status() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace floodsp::lp
