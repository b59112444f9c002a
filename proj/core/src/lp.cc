#include "rra/lp.h"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rra {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

std::string_view to_string(RowSense sense) {
  switch (sense) {
    case RowSense::kLessEqual: return "le";
    case RowSense::kGreaterEqual: return "ge";
    case RowSense::kEqual: return "eq";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LinearProgram

std::size_t LinearProgram::add_variable(double objective, bool nonnegative, std::string name) {
  if (!std::isfinite(objective))
    throw Error(ErrorCode::kInvalidArgument, "objective coefficient must be finite");
  vars_.push_back(LpVariable{std::move(name), objective, nonnegative});
  return vars_.size() - 1;
}

std::size_t LinearProgram::add_row(RowSense sense, double rhs, std::string name) {
  if (!std::isfinite(rhs)) throw Error(ErrorCode::kInvalidArgument, "rhs must be finite");
  rows_.push_back(LpRow{std::move(name), sense, rhs, {}});
  return rows_.size() - 1;
}

void LinearProgram::add_coefficient(std::size_t row, std::size_t var, double value) {
  if (row >= rows_.size() || var >= vars_.size())
    throw Error(ErrorCode::kIndexOutOfRange, "coefficient references a missing row or variable");
  if (!std::isfinite(value)) throw Error(ErrorCode::kInvalidArgument, "coefficient not finite");
  if (value == 0.0) return;
  rows_[row].entries.push_back(LpEntry{var, value});
}

std::size_t LinearProgram::num_coefficients() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.entries.size();
  return n;
}

std::vector<std::vector<LpEntry>> LinearProgram::columns() const {
  std::vector<std::vector<LpEntry>> cols(vars_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r)
    for (const auto& e : rows_[r].entries) cols[e.index].push_back(LpEntry{r, e.value});
  return cols;
}

double LinearProgram::objective_value(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) v += vars_[j].objective * x[j];
  return v;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j)
    if (vars_[j].nonnegative) worst = std::max(worst, -x[j]);
  for (const auto& r : rows_) {
    double lhs = 0.0;
    for (const auto& e : r.entries) lhs += e.value * x[e.index];
    switch (r.sense) {
      case RowSense::kLessEqual: worst = std::max(worst, lhs - r.rhs); break;
      case RowSense::kGreaterEqual: worst = std::max(worst, r.rhs - lhs); break;
      case RowSense::kEqual: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// SimplexSolver

namespace {

enum class ColKind { kStructural, kSlack, kArtificial };

struct Column {
  std::vector<LpEntry> entries;  // (row, coefficient) in the sign-normalized system
  double cost = 0.0;             // internal maximization cost
  ColKind kind = ColKind::kStructural;
  std::size_t var = 0;           // original variable for structural columns
  double var_sign = 1.0;         // -1 for the negative half of a free variable
};

}  // namespace

struct SimplexSolver::Impl {
  LinearProgram lp;
  LpOptions opt;
  std::size_t m = 0;
  std::vector<double> row_sign;
  Eigen::VectorXd b;
  std::vector<Column> cols;
  std::vector<std::size_t> basis;
  std::vector<long> position;  // row index in basis, or -1
  Eigen::MatrixXd binv;
  Eigen::VectorXd xb;
  bool phase1_done = false;
  std::size_t since_refactor = 0;
  std::size_t iterations = 0;
  std::vector<std::size_t> good_basis;
  bool exact_updates = false;

  Impl(LinearProgram program, LpOptions options) : lp(std::move(program)), opt(options) {
    m = lp.num_rows();
    row_sign.assign(m, 1.0);
    b.resize(static_cast<Eigen::Index>(m));
    std::vector<bool> needs_artificial(m, false);
    std::vector<double> slack_coef(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const LpRow& row = lp.row(r);
      double rhs = row.rhs;
      switch (row.sense) {
        case RowSense::kLessEqual:
          if (rhs < 0) {
            row_sign[r] = -1.0;
            slack_coef[r] = -1.0;
            needs_artificial[r] = true;
          } else {
            slack_coef[r] = 1.0;
          }
          break;
        case RowSense::kGreaterEqual:
          if (rhs > 0) {
            slack_coef[r] = -1.0;
            needs_artificial[r] = true;
          } else {
            row_sign[r] = -1.0;
            slack_coef[r] = 1.0;
          }
          break;
        case RowSense::kEqual:
          if (rhs < 0) row_sign[r] = -1.0;
          needs_artificial[r] = true;
          break;
      }
      b[static_cast<Eigen::Index>(r)] = row_sign[r] * rhs;
    }

    const auto structural = lp.columns();
    for (std::size_t j = 0; j < lp.num_variables(); ++j) append_structural(j, structural[j]);

    basis.assign(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
      if (slack_coef[r] != 0.0) {
        Column c;
        c.kind = ColKind::kSlack;
        c.entries.push_back(LpEntry{r, slack_coef[r]});
        cols.push_back(std::move(c));
        if (!needs_artificial[r]) basis[r] = cols.size() - 1;
      }
      if (needs_artificial[r]) {
        Column c;
        c.kind = ColKind::kArtificial;
        c.entries.push_back(LpEntry{r, 1.0});
        cols.push_back(std::move(c));
        basis[r] = cols.size() - 1;
      }
    }
    phase1_done = std::none_of(needs_artificial.begin(), needs_artificial.end(),
                               [](bool x) { return x; });
    position.assign(cols.size(), -1);
    for (std::size_t r = 0; r < m; ++r) position[basis[r]] = static_cast<long>(r);
    binv = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    xb = b;
    good_basis = basis;
  }

  void append_structural(std::size_t var, const std::vector<LpEntry>& entries) {
    const LpVariable& v = lp.variable(var);
    const double sense = lp.sense() == ObjectiveSense::kMaximize ? 1.0 : -1.0;
    for (double s : {1.0, -1.0}) {
      if (s < 0 && v.nonnegative) break;
      Column c;
      c.kind = ColKind::kStructural;
      c.var = var;
      c.var_sign = s;
      c.cost = sense * s * v.objective;
      for (const auto& e : entries) c.entries.push_back(LpEntry{e.index, s * row_sign[e.index] * e.value});
      cols.push_back(std::move(c));
      position.push_back(-1);
    }
  }

  double phase_cost(const Column& c, int phase) const {
    if (phase == 1) return c.kind == ColKind::kArtificial ? -1.0 : 0.0;
    return c.kind == ColKind::kStructural ? c.cost : 0.0;
  }

  Eigen::VectorXd ftran(const Column& c) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (const auto& e : c.entries) u += e.value * binv.col(static_cast<Eigen::Index>(e.index));
    return u;
  }

  double dot(const Eigen::VectorXd& y, const Column& c) const {
    double s = 0.0;
    for (const auto& e : c.entries) s += y[static_cast<Eigen::Index>(e.index)] * e.value;
    return s;
  }

  Eigen::VectorXd simplex_multipliers(int phase) const {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) cb[static_cast<Eigen::Index>(r)] = phase_cost(cols[basis[r]], phase);
    return binv.transpose() * cb;
  }

  void refactor() {
    if (!try_refactor()) throw Error(ErrorCode::kNumericalFailure, "basis matrix became singular");
  }

  // Refactors, and if the basis has drifted into singularity through
  // accumulated update error, returns to the last basis that factored
  // cleanly and refactors after every pivot from then on.
  void refactor_or_recover() {
    if (try_refactor()) return;
    basis = good_basis;
    position.assign(cols.size(), -1);
    for (std::size_t r = 0; r < m; ++r) position[basis[r]] = static_cast<long>(r);
    exact_updates = true;
    refactor();
  }

  bool try_refactor() {
    if (m == 0) return true;
    // Bases are mostly slack columns, so a sparse factorization is far
    // cheaper than a dense one at master-problem sizes.
    const auto M = static_cast<Eigen::Index>(m);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < m; ++r)
      for (const auto& e : cols[basis[r]].entries)
        trip.emplace_back(static_cast<Eigen::Index>(e.index), static_cast<Eigen::Index>(r), e.value);
    Eigen::SparseMatrix<double> B(M, M);
    B.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(B);
    if (lu.info() == Eigen::Success) {
      binv = lu.solve(Eigen::MatrixXd::Identity(M, M));
    } else {
      // SparseLU gives up on some small pivots that full pivoting handles.
      const Eigen::FullPivLU<Eigen::MatrixXd> dense{Eigen::MatrixXd(B)};
      if (!dense.isInvertible()) return false;
      binv = dense.inverse();
    }
    if (!binv.allFinite()) return false;
    xb = binv * b;
    for (Eigen::Index i = 0; i < xb.size(); ++i)
      if (xb[i] < 0 && xb[i] > -opt.feasibility_tolerance) xb[i] = 0.0;
    since_refactor = 0;
    good_basis = basis;
    return true;
  }

  void pivot(std::size_t r, std::size_t q, const Eigen::VectorXd& u) {
    const auto R = static_cast<Eigen::Index>(r);
    const double theta = std::max(xb[R], 0.0) / u[R];
    xb -= theta * u;
    xb[R] = theta;
    const Eigen::RowVectorXd prow = binv.row(R) / u[R];
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i) {
      if (i == R || u[i] == 0.0) continue;
      binv.row(i) -= u[i] * prow;
    }
    binv.row(R) = prow;
    position[basis[r]] = -1;
    basis[r] = q;
    position[q] = static_cast<long>(r);
    ++since_refactor;
    ++iterations;
  }

  // Returns optimal / unbounded / iteration-limit for the given phase.
  LpStatus iterate(int phase) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iterations >= opt.max_iterations) return LpStatus::kIterationLimit;
      const std::size_t refactor_every = exact_updates ? 1 : std::max(opt.refactor_interval, m / 2);
      if (since_refactor >= refactor_every) refactor_or_recover();
      const Eigen::VectorXd y = simplex_multipliers(phase);

      std::size_t q = cols.size();
      double best = opt.pricing_tolerance;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (position[j] >= 0 || cols[j].kind == ColKind::kArtificial) continue;
        const double d = phase_cost(cols[j], phase) - dot(y, cols[j]);
        if (d > best) {
          q = j;
          if (bland) break;
          best = d;
        }
      }
      if (q == cols.size()) return LpStatus::kOptimal;

      const Eigen::VectorXd u = ftran(cols[q]);
      std::size_t leave = m;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const auto I = static_cast<Eigen::Index>(i);
        // A zero-level artificial left in the basis must not move; pivot it out.
        if (phase == 2 && cols[basis[i]].kind == ColKind::kArtificial &&
            std::abs(u[I]) > opt.pivot_tolerance) {
          min_ratio = 0.0;
          leave = i;
          break;
        }
        if (u[I] <= opt.pivot_tolerance) continue;
        const double ratio = std::max(xb[I], 0.0) / u[I];
        if (ratio < min_ratio) min_ratio = ratio;
      }
      if (leave == m) {
        if (!std::isfinite(min_ratio)) return LpStatus::kUnbounded;
        const double slack = 1e-12 * std::max(1.0, min_ratio);
        double best_pivot = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const auto I = static_cast<Eigen::Index>(i);
          if (u[I] <= opt.pivot_tolerance) continue;
          const double ratio = std::max(xb[I], 0.0) / u[I];
          if (ratio > min_ratio + slack) continue;
          if (bland) {
            if (leave == m || basis[i] < basis[leave]) leave = i;
          } else if (u[I] > best_pivot) {
            best_pivot = u[I];
            leave = i;
          }
        }
      }
      const bool degenerate = min_ratio <= 1e-12;
      pivot(leave, q, u);
      if (degenerate) {
        if (++degenerate_run >= opt.bland_after_degenerate) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m; ++r) {
      if (cols[basis[r]].kind != ColKind::kArtificial) continue;
      const Eigen::RowVectorXd row = binv.row(static_cast<Eigen::Index>(r));
      std::size_t q = cols.size();
      double best = 1e-7;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (position[j] >= 0 || cols[j].kind == ColKind::kArtificial) continue;
        double alpha = 0.0;
        for (const auto& e : cols[j].entries) alpha += row[static_cast<Eigen::Index>(e.index)] * e.value;
        if (std::abs(alpha) > best) {
          best = std::abs(alpha);
          q = j;
        }
      }
      if (q == cols.size()) continue;  // redundant row; the artificial stays at zero
      const Eigen::VectorXd u = ftran(cols[q]);
      const auto R = static_cast<Eigen::Index>(r);
      xb[R] = 0.0;
      pivot(r, q, u);
    }
  }

  LpSolution solve() {
    LpSolution sol;
    if (!phase1_done) {
      LpStatus s1 = iterate(1);
      while (s1 == LpStatus::kOptimal && since_refactor > 0) {
        refactor_or_recover();
        s1 = iterate(1);
      }
      if (s1 == LpStatus::kIterationLimit) {
        sol.status = s1;
        sol.iterations = iterations;
        return sol;
      }
      double infeas = 0.0;
      for (std::size_t r = 0; r < m; ++r)
        if (cols[basis[r]].kind == ColKind::kArtificial) infeas += std::max(xb[static_cast<Eigen::Index>(r)], 0.0);
      const double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
      if (infeas > opt.feasibility_tolerance * scale) {
        sol.status = LpStatus::kInfeasible;
        sol.iterations = iterations;
        return sol;
      }
      drive_out_artificials();
      phase1_done = true;
    }

    LpStatus s2 = iterate(2);
    while (s2 == LpStatus::kOptimal && since_refactor > 0) {
      refactor_or_recover();
      s2 = iterate(2);  // confirm with a fresh factorization
    }
    sol.status = s2;
    sol.iterations = iterations;
    if (s2 != LpStatus::kOptimal) return sol;
    extract(sol);
    return sol;
  }

  void extract(LpSolution& sol) const {
    sol.primal.assign(lp.num_variables(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const Column& c = cols[basis[r]];
      if (c.kind == ColKind::kStructural)
        sol.primal[c.var] += c.var_sign * xb[static_cast<Eigen::Index>(r)];
    }
    for (std::size_t j = 0; j < lp.num_variables(); ++j)
      if (lp.variable(j).nonnegative && sol.primal[j] < 0.0 &&
          sol.primal[j] > -opt.feasibility_tolerance)
        sol.primal[j] = 0.0;

    const Eigen::VectorXd y = simplex_multipliers(2);
    const double sense = lp.sense() == ObjectiveSense::kMaximize ? 1.0 : -1.0;
    sol.duals.assign(m, 0.0);
    sol.dual_objective = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      sol.duals[r] = sense * row_sign[r] * y[static_cast<Eigen::Index>(r)];
      sol.dual_objective += lp.row(r).rhs * sol.duals[r];
    }
    sol.objective = lp.objective_value(sol.primal);
    sol.duality_gap = std::abs(sol.objective - sol.dual_objective);
    sol.primal_violation = lp.max_violation(sol.primal);
    double dual_violation = 0.0;
    for (const Column& c : cols) {
      if (c.kind == ColKind::kArtificial) continue;
      dual_violation = std::max(dual_violation, phase_cost(c, 2) - dot(y, c));
    }
    sol.dual_violation = dual_violation;
  }
};

SimplexSolver::SimplexSolver(LinearProgram lp, LpOptions options)
    : impl_(std::make_unique<Impl>(std::move(lp), options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

const LinearProgram& SimplexSolver::program() const { return impl_->lp; }
const LpOptions& SimplexSolver::options() const { return impl_->opt; }

std::size_t SimplexSolver::add_column(double objective, std::span<const LpEntry> entries,
                                      bool nonnegative, std::string name) {
  Impl& s = *impl_;
  const std::size_t var = s.lp.add_variable(objective, nonnegative, std::move(name));
  std::vector<LpEntry> col(entries.begin(), entries.end());
  for (const auto& e : col) s.lp.add_coefficient(e.index, var, e.value);
  s.append_structural(var, col);
  return var;
}

namespace {

void certify(const LpSolution& sol, const LpOptions& opt) {
  if (!opt.throw_on_certificate_failure || !sol.optimal()) return;
  const double scale = std::max(1.0, std::abs(sol.objective));
  if (sol.primal_violation > opt.feasibility_tolerance * scale)
    throw Error(ErrorCode::kNumericalFailure,
                fmt::format("primal violation {} exceeds tolerance", sol.primal_violation));
  if (sol.duality_gap > opt.duality_tolerance * scale)
    throw Error(ErrorCode::kNumericalFailure,
                fmt::format("duality gap {} exceeds tolerance", sol.duality_gap));
  if (sol.dual_violation > 1e-7 * scale)
    throw Error(ErrorCode::kNumericalFailure,
                fmt::format("dual violation {} exceeds tolerance", sol.dual_violation));
}

}  // namespace

LpSolution SimplexSolver::solve() {
  LpSolution sol = impl_->solve();
  certify(sol, impl_->opt);
  return sol;
}

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  SimplexSolver solver(lp, options);
  return solver.solve();
}

}  // namespace rra
