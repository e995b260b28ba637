#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fleetflow {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, Equal };

/// Maximization LP with sparse rows and variables bounded below by 0.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> objective;  // size num_vars
  std::vector<double> upper;      // size num_vars, kInfinity when unbounded above
  std::vector<Row> rows;

  int add_variable(double obj, double ub = kInfinity) {
    objective.push_back(obj);
    upper.push_back(ub);
    return num_vars++;
  }
  Row& add_row(Relation rel, double rhs) {
    rows.push_back({{}, rel, rhs});
    return rows.back();
  }

  void validate() const {
    if (static_cast<int>(objective.size()) != num_vars ||
        static_cast<int>(upper.size()) != num_vars)
      throw std::invalid_argument("LP dimension mismatch");
    for (const Row& r : rows) {
      if (!std::isfinite(r.rhs)) throw std::invalid_argument("non-finite right-hand side");
      for (auto [v, c] : r.coeffs)
        if (v < 0 || v >= num_vars)
          throw std::invalid_argument("row references unknown variable " + std::to_string(v));
    }
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct BasicSolution {
  SolveStatus status = SolveStatus::Optimal;
  std::vector<double> values;  // structural variables only
  double objective_value = 0.0;
  std::vector<int> basis;  // internal column indices (slacks included)
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feas_tol = 1e-7;
  int refactor_interval = 64;
  long long max_iterations = 2'000'000;
  // Consecutive degenerate pivots before Bland's rule engages.
  int degenerate_switch = 50;
};

namespace detail {

/// Bounded-variable revised primal simplex. Two phases; the basis inverse
/// is kept as a sparse LU of a reference basis plus product-form eta
/// updates, refactorized periodically.
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, SimplexOptions opt) : lp_(lp), opt_(opt) {
    lp.validate();
    m_ = static_cast<int>(lp.rows.size());
    build_columns();
  }

  BasicSolution solve() {
    BasicSolution out;
    init_basis();

    if (needs_phase1_) {
      phase_ = 1;
      if (!iterate()) throw std::runtime_error("simplex iteration limit exceeded (phase 1)");
      double infeas = 0;
      for (int a : artificials_) infeas += value_of(a);
      if (infeas > opt_.feas_tol * (1 + std::abs(rhs_norm_))) {
        out.status = SolveStatus::Infeasible;
        return out;
      }
      // Artificials are pinned to zero for phase 2.
      for (int a : artificials_) upper_[a] = 0.0;
    }

    phase_ = 2;
    if (!iterate()) throw std::runtime_error("simplex iteration limit exceeded (phase 2)");
    if (unbounded_) {
      out.status = SolveStatus::Unbounded;
      return out;
    }

    out.status = SolveStatus::Optimal;
    out.values.resize(lp_.num_vars);
    for (int j = 0; j < lp_.num_vars; ++j) out.values[j] = value_of(j);
    out.objective_value = 0;
    for (int j = 0; j < lp_.num_vars; ++j)
      out.objective_value += lp_.objective[j] * out.values[j];
    out.basis = basis_;
    return out;
  }

 private:
  enum VarState : uint8_t { kAtLower, kAtUpper, kBasic };

  void build_columns() {
    // Structural columns.
    cols_.assign(lp_.num_vars, {});
    obj_.assign(lp_.num_vars, 0.0);
    upper_.assign(lp_.num_vars, 0.0);
    is_artificial_.assign(lp_.num_vars, 0);
    for (int j = 0; j < lp_.num_vars; ++j) {
      obj_[j] = lp_.objective[j];
      upper_[j] = lp_.upper[j];
    }
    for (int i = 0; i < m_; ++i)
      for (auto [v, c] : lp_.rows[i].coeffs)
        if (c != 0.0) cols_[v].push_back({i, c});

    // Slack columns for inequality rows.
    slack_of_row_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
      if (lp_.rows[i].rel == Relation::LessEq) {
        slack_of_row_[i] = add_internal_col(0.0, kInfinity);
        cols_[slack_of_row_[i]].push_back({i, 1.0});
      }
    }
  }

  int add_internal_col(double obj, double ub, bool artificial = false) {
    cols_.push_back({});
    obj_.push_back(obj);
    upper_.push_back(ub);
    is_artificial_.push_back(artificial);
    return static_cast<int>(cols_.size()) - 1;
  }

  void init_basis() {
    basis_.assign(m_, -1);
    state_.assign(cols_.size(), kAtLower);
    x_basic_.assign(m_, 0.0);
    rhs_norm_ = 0;

    // All structurals start at their lower bound 0; a slack is basic
    // wherever it is feasible, otherwise an artificial fills the row.
    for (int i = 0; i < m_; ++i) {
      double b = lp_.rows[i].rhs;
      rhs_norm_ = std::max(rhs_norm_, std::abs(b));
      int s = slack_of_row_[i];
      if (s >= 0 && b >= 0) {
        basis_[i] = s;
        state_[s] = kBasic;
        x_basic_[i] = b;
      } else {
        int a = add_internal_col(0.0, kInfinity, /*artificial=*/true);
        cols_[a].push_back({i, b >= 0 ? 1.0 : -1.0});
        state_.push_back(kBasic);
        artificials_.push_back(a);
        basis_[i] = a;
        x_basic_[i] = std::abs(b);
        needs_phase1_ = true;
      }
    }
    refactorize();
  }

  double value_of(int j) const {
    if (state_[j] == kAtLower) return 0.0;
    if (state_[j] == kAtUpper) return upper_[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == j) return x_basic_[i];
    return 0.0;  // unreachable
  }

  double phase_obj(int j) const {
    // Phase 1 minimizes the artificial sum, expressed as a maximization.
    if (phase_ == 1) return is_artificial_[j] ? -1.0 : 0.0;
    return obj_[j];
  }

  void refactorize() {
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m_; ++i)
      for (auto [r, c] : cols_[basis_[i]]) trips.push_back({r, i, c});
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    lu_.compute(B);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("singular basis during simplex refactorization");
    Bt_ = B.transpose();
    lut_.compute(Bt_);
    if (lut_.info() != Eigen::Success)
      throw std::runtime_error("singular transposed basis during refactorization");
    etas_.clear();
    recompute_basics();
  }

  void recompute_basics() {
    Eigen::VectorXd r(m_);
    for (int i = 0; i < m_; ++i) r[i] = lp_.rows[i].rhs;
    for (size_t j = 0; j < cols_.size(); ++j) {
      if (state_[j] == kAtUpper && upper_[j] != 0.0)
        for (auto [row, c] : cols_[j]) r[row] -= c * upper_[j];
    }
    Eigen::VectorXd xb = lu_.solve(r);
    for (int i = 0; i < m_; ++i) x_basic_[i] = xb[i];
  }

  Eigen::VectorXd ftran(const Eigen::VectorXd& a) const {
    Eigen::VectorXd w = lu_.solve(a);
    for (const auto& [r, d] : etas_) {
      double wr = w[r] / d[r];
      if (wr != 0.0) w -= d * wr;
      w[r] = wr;
    }
    return w;
  }

  Eigen::VectorXd btran(Eigen::VectorXd c) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const auto& [r, d] = *it;
      double zr = c[r];
      for (int i = 0; i < m_; ++i)
        if (i != r) zr -= d[i] * c[i];
      c[r] = zr / d[r];
    }
    return lut_.solve(c);
  }

  /// Runs pivots until optimal/unbounded for the current phase objective.
  /// Returns false when the iteration cap is hit.
  bool iterate() {
    unbounded_ = false;
    int degenerate_streak = 0;
    Eigen::VectorXd cb(m_);

    for (long long iter = 0; iter < opt_.max_iterations; ++iter) {
      for (int i = 0; i < m_; ++i) cb[i] = phase_obj(basis_[i]);
      Eigen::VectorXd y = btran(cb);

      bool use_bland = degenerate_streak >= opt_.degenerate_switch;
      int entering = -1, direction = 0;
      double best_score = opt_.pivot_tol;
      for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
        if (state_[j] == kBasic) continue;
        if (upper_[j] == 0.0) continue;  // fixed (pinned artificials)
        double dj = phase_obj(j);
        for (auto [row, c] : cols_[j]) dj -= y[row] * c;
        int dir = 0;
        if (state_[j] == kAtLower && dj > opt_.pivot_tol) dir = +1;
        if (state_[j] == kAtUpper && dj < -opt_.pivot_tol) dir = -1;
        if (dir == 0) continue;
        if (use_bland) {
          entering = j;
          direction = dir;
          break;
        }
        if (std::abs(dj) > best_score) {
          best_score = std::abs(dj);
          entering = j;
          direction = dir;
        }
      }
      if (entering < 0) return true;  // optimal for this phase

      Eigen::VectorXd aq = Eigen::VectorXd::Zero(m_);
      for (auto [row, c] : cols_[entering]) aq[row] = c;
      Eigen::VectorXd w = ftran(aq);

      // Ratio test: x_entering moves by theta in `direction`; basic
      // variable i moves by -direction * w[i] * theta.
      double theta = upper_[entering];  // bound-flip limit (lower bound is 0)
      int leave_pos = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        double delta = -direction * w[i];
        double limit;
        bool hits_upper;
        if (delta < -opt_.pivot_tol) {
          limit = x_basic_[i] / (-delta);  // falls to lower bound 0
          hits_upper = false;
        } else if (delta > opt_.pivot_tol && std::isfinite(upper_[basis_[i]])) {
          limit = (upper_[basis_[i]] - x_basic_[i]) / delta;
          hits_upper = true;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        if (limit < theta - opt_.pivot_tol ||
            (leave_pos >= 0 && limit < theta + opt_.pivot_tol &&
             (use_bland ? basis_[i] < basis_[leave_pos]
                        : std::abs(w[i]) > std::abs(w[leave_pos])))) {
          theta = limit;
          leave_pos = i;
          leave_at_upper = hits_upper;
        }
      }

      if (!std::isfinite(theta)) {
        unbounded_ = true;
        return true;
      }
      degenerate_streak = theta <= opt_.pivot_tol ? degenerate_streak + 1 : 0;

      // Apply the step.
      for (int i = 0; i < m_; ++i) x_basic_[i] += -direction * w[i] * theta;

      if (leave_pos < 0) {
        // Bound flip, basis unchanged.
        state_[entering] = direction > 0 ? kAtUpper : kAtLower;
        continue;
      }

      int leaving = basis_[leave_pos];
      state_[leaving] = leave_at_upper ? kAtUpper : kAtLower;
      basis_[leave_pos] = entering;
      state_[entering] = kBasic;
      x_basic_[leave_pos] =
          direction > 0 ? theta : upper_[entering] - theta;

      if (std::abs(w[leave_pos]) < opt_.pivot_tol)
        throw std::runtime_error("numerically singular pivot (|pivot| = " +
                                 std::to_string(std::abs(w[leave_pos])) + ")");
      etas_.push_back({leave_pos, w});
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactorize();
    }
    return false;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int m_ = 0;
  int phase_ = 2;
  bool needs_phase1_ = false;
  bool unbounded_ = false;
  double rhs_norm_ = 0;

  std::vector<std::vector<std::pair<int, double>>> cols_;  // (row, coef)
  std::vector<double> obj_, upper_;
  std::vector<uint8_t> is_artificial_;
  std::vector<int> slack_of_row_;
  std::vector<int> artificials_;

  std::vector<int> basis_;        // column index per row
  std::vector<uint8_t> state_;    // VarState per column
  std::vector<double> x_basic_;   // value per basic row

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
  Eigen::SparseMatrix<double> Bt_;
  std::vector<std::pair<int, Eigen::VectorXd>> etas_;
};

}  // namespace detail

/// Optimal basic feasible solution of the LP, or infeasible/unbounded.
inline BasicSolution simplex_solve(const LinearProgram& lp, SimplexOptions opt = {}) {
  if (lp.rows.empty()) {
    // Degenerate LP over the box: each variable sits at whichever bound
    // its objective sign prefers.
    BasicSolution out;
    out.values.resize(lp.num_vars, 0.0);
    for (int j = 0; j < lp.num_vars; ++j) {
      if (lp.objective[j] > 0) {
        if (!std::isfinite(lp.upper[j])) {
          out.status = SolveStatus::Unbounded;
          return out;
        }
        out.values[j] = lp.upper[j];
        out.objective_value += lp.objective[j] * lp.upper[j];
      }
    }
    return out;
  }
  detail::SimplexSolver solver(lp, opt);
  return solver.solve();
}

/// Free MPS-style text export for manual cross-validation.
inline std::string export_mps(const LinearProgram& lp, const std::string& name = "FLEETLP") {
  std::ostringstream os;
  os << "NAME " << name << "\nROWS\n N OBJ\n";
  for (size_t i = 0; i < lp.rows.size(); ++i)
    os << " " << (lp.rows[i].rel == Relation::Equal ? "E" : "L") << " R" << i << "\n";
  os << "COLUMNS\n";
  for (int j = 0; j < lp.num_vars; ++j) {
    if (lp.objective[j] != 0) os << " X" << j << " OBJ " << lp.objective[j] << "\n";
    for (size_t i = 0; i < lp.rows.size(); ++i)
      for (auto [v, c] : lp.rows[i].coeffs)
        if (v == j) os << " X" << j << " R" << i << " " << c << "\n";
  }
  os << "RHS\n";
  for (size_t i = 0; i < lp.rows.size(); ++i)
    if (lp.rows[i].rhs != 0) os << " RHS R" << i << " " << lp.rows[i].rhs << "\n";
  os << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars; ++j)
    if (std::isfinite(lp.upper[j])) os << " UP BND X" << j << " " << lp.upper[j] << "\n";
  os << "ENDATA\n";
  return os.str();
}

}  // namespace fleetflow
