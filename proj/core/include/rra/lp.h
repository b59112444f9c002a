#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rra/error.h"

namespace rra {

enum class ObjectiveSense { kMaximize, kMinimize };
enum class RowSense { kLessEqual, kGreaterEqual, kEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view to_string(LpStatus status);
std::string_view to_string(RowSense sense);

struct LpEntry {
  std::size_t index = 0;
  double value = 0.0;
};

struct LpVariable {
  std::string name;
  double objective = 0.0;
  bool nonnegative = true;  // otherwise free
};

struct LpRow {
  std::string name;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::vector<LpEntry> entries;  // (variable, coefficient)
};

/// A linear program over nonnegative or free variables with <=, >= and =
/// rows. Coefficients are stored row-wise and may be appended in any order;
/// duplicates for the same (row, variable) are summed.
class LinearProgram {
 public:
  explicit LinearProgram(ObjectiveSense sense = ObjectiveSense::kMaximize) : sense_(sense) {}

  std::size_t add_variable(double objective, bool nonnegative = true, std::string name = {});
  std::size_t add_row(RowSense sense, double rhs, std::string name = {});
  void add_coefficient(std::size_t row, std::size_t var, double value);

  ObjectiveSense sense() const { return sense_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_coefficients() const;
  const LpVariable& variable(std::size_t j) const { return vars_[j]; }
  const LpRow& row(std::size_t r) const { return rows_[r]; }
  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpRow>& rows() const { return rows_; }

  /// Column view (row, coefficient) of every variable.
  std::vector<std::vector<LpEntry>> columns() const;

  double objective_value(std::span<const double> x) const;
  /// Largest violation of any row or sign constraint at `x`.
  double max_violation(std::span<const double> x) const;

 private:
  ObjectiveSense sense_;
  std::vector<LpVariable> vars_;
  std::vector<LpRow> rows_;
};

struct LpOptions {
  double pricing_tolerance = 1e-9;
  double feasibility_tolerance = 1e-8;
  double duality_tolerance = 1e-6;
  double pivot_tolerance = 1e-9;
  std::size_t max_iterations = 2'000'000;
  std::size_t refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after_degenerate = 50;
  /// When false, a failed post-solve certificate is reported in the
  /// solution instead of thrown.
  bool throw_on_certificate_failure = true;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  /// Shadow prices: the rate at which the optimum changes per unit increase
  /// of each row's right-hand side.
  std::vector<double> duals;
  std::vector<double> primal;
  /// Sum of rhs times shadow price.
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  double primal_violation = 0.0;
  /// Largest positive reduced cost or wrong-signed shadow price.
  double dual_violation = 0.0;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

/// Revised primal simplex with a dense basis inverse. Columns can be added
/// after a solve and the next solve resumes from the previous basis, which is
/// what column generation needs.
class SimplexSolver {
 public:
  explicit SimplexSolver(LinearProgram lp, LpOptions options = {});
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  LpSolution solve();

  /// Appends a variable with the given objective and column entries
  /// (row, coefficient) and returns its index.
  std::size_t add_column(double objective, std::span<const LpEntry> entries,
                         bool nonnegative = true, std::string name = {});

  const LinearProgram& program() const;
  const LpOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Solves `lp` from scratch. Throws kNumericalFailure when an optimal basis
/// fails its primal or dual certificate.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

/// Plain-text sparse dump: one header line, then `var`, `row` and `coef`
/// records, one per line. See docs/file_formats.md.
void write_lp_text(const LinearProgram& lp, std::ostream& out);
LinearProgram read_lp_text(std::istream& in);

}  // namespace rra
