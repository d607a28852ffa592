// Dense bounded-variable primal simplex for small linear programs.
//
// Problems are stated as maximizations over box-bounded variables with
// <=, = and >= rows. The solver keeps a full tableau (B^-1 A) in an Eigen
// matrix, starts from a slack/artificial basis, runs a phase-1 search for
// feasibility and then optimizes the real objective. Pricing is Dantzig's
// largest reduced cost until a run of degenerate pivots is seen, after which
// Bland's smallest-index rule takes over for the rest of the phase.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2p::lp {

enum class Relation { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "?";
}

template <typename Scalar>
inline constexpr Scalar infinity = std::numeric_limits<Scalar>::infinity();

template <typename Scalar>
struct Term {
  Eigen::Index var;
  Scalar coeff;
};

template <typename Scalar>
struct Row {
  std::vector<Term<Scalar>> terms;
  Relation relation = Relation::less_equal;
  Scalar rhs = 0;
  std::string name;
};

/// max c'x  s.t.  rows,  lower <= x <= upper.
template <typename Scalar = double>
class LinearProgram {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Eigen::Index add_variable(Scalar lower, Scalar upper, Scalar cost = 0, std::string name = {}) {
    lower_.push_back(lower);
    upper_.push_back(upper);
    objective_.push_back(cost);
    if (name.empty()) name = "x" + std::to_string(lower_.size() - 1);
    names_.push_back(std::move(name));
    return static_cast<Eigen::Index>(lower_.size() - 1);
  }

  Eigen::Index add_row(std::vector<Term<Scalar>> terms, Relation rel, Scalar rhs,
                       std::string name = {}) {
    if (name.empty()) name = "r" + std::to_string(rows_.size());
    rows_.push_back({std::move(terms), rel, rhs, std::move(name)});
    return static_cast<Eigen::Index>(rows_.size() - 1);
  }

  void set_cost(Eigen::Index var, Scalar c) { objective_.at(static_cast<std::size_t>(var)) = c; }

  Eigen::Index num_variables() const { return static_cast<Eigen::Index>(lower_.size()); }
  Eigen::Index num_rows() const { return static_cast<Eigen::Index>(rows_.size()); }

  const std::vector<Row<Scalar>>& rows() const { return rows_; }
  const Row<Scalar>& row(Eigen::Index k) const { return rows_[static_cast<std::size_t>(k)]; }
  const std::string& variable_name(Eigen::Index j) const { return names_[static_cast<std::size_t>(j)]; }

  Vector objective() const { return as_vector(objective_); }
  Vector lower() const { return as_vector(lower_); }
  Vector upper() const { return as_vector(upper_); }

  Scalar activity(Eigen::Index k, const Vector& x) const {
    Scalar s = 0;
    for (const auto& t : row(k).terms) s += t.coeff * x(t.var);
    return s;
  }

  /// Dense constraint matrix (rows x variables), duplicate terms summed.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense_matrix() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(num_rows(), num_variables());
    for (Eigen::Index k = 0; k < num_rows(); ++k)
      for (const auto& t : row(k).terms) a(k, t.var) += t.coeff;
    return a;
  }

  /// Well-formedness problems; empty when the program can be solved.
  std::vector<std::string> validate() const {
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < num_variables(); ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (std::isnan(lower_[u]) || std::isnan(upper_[u]) || lower_[u] > upper_[u] ||
          lower_[u] == infinity<Scalar> || upper_[u] == -infinity<Scalar>)
        out.push_back("variable " + names_[u] + ": invalid bounds");
      if (!std::isfinite(objective_[u])) out.push_back("variable " + names_[u] + ": non-finite cost");
    }
    for (const auto& r : rows_) {
      if (!std::isfinite(r.rhs)) out.push_back("row " + r.name + ": non-finite rhs");
      for (const auto& t : r.terms) {
        if (t.var < 0 || t.var >= num_variables())
          out.push_back("row " + r.name + ": invalid variable index " + std::to_string(t.var));
        else if (!std::isfinite(t.coeff))
          out.push_back("row " + r.name + ": non-finite coefficient");
      }
    }
    return out;
  }

 private:
  static Vector as_vector(const std::vector<Scalar>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  std::vector<Scalar> objective_, lower_, upper_;
  std::vector<std::string> names_;
  std::vector<Row<Scalar>> rows_;
};

template <typename Scalar = double>
struct Solution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Status status = Status::infeasible;
  Vector values;          // structural variables
  Scalar objective_value = 0;
  Vector duals;           // one per row, at the final basis
  Vector reduced_costs;   // one per structural variable
  Vector ray;             // improving direction when unbounded
  Scalar infeasibility = 0;  // phase-1 residual when infeasible
  Eigen::Index iterations = 0;
  bool used_bland = false;
};

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  int bland_after = 50;          // consecutive degenerate pivots
  int refactor_every = 400;
  long max_iterations = 200000;
};

namespace detail {

template <typename Scalar>
class BoundedSimplex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BoundedSimplex(const LinearProgram<Scalar>& lp, const SolverOptions& opt) : lp_(lp), opt_(opt) {}

  Solution<Scalar> run() {
    build();
    Solution<Scalar> sol;

    // Phase 1: maximize -sum(artificials).
    Vector c1 = Vector::Zero(ncols_);
    for (Eigen::Index j = first_art_; j < ncols_; ++j) c1(j) = -1;
    if (first_art_ < ncols_) {
      optimize(c1, /*allow_unbounded=*/false);
      const Scalar infeas = x_.segment(first_art_, ncols_ - first_art_).sum();
      if (infeas > Scalar(opt_.feasibility_tol)) {
        sol.status = Status::infeasible;
        sol.infeasibility = infeas;
        sol.values = x_.head(n_);
        sol.iterations = iterations_;
        sol.used_bland = used_bland_;
        return sol;
      }
      drive_out_artificials();
    }

    Vector c2 = Vector::Zero(ncols_);
    c2.head(n_) = lp_.objective();
    bool bounded = optimize(c2, /*allow_unbounded=*/true);
    // Re-derive the tableau from the original data and keep pivoting until the
    // reduced costs certify optimality on fresh numbers.
    for (int round = 0; bounded && round < 5; ++round) {
      refactor(c2);
      if (certified()) break;
      bounded = optimize(c2, true);
    }

    sol.iterations = iterations_;
    sol.used_bland = used_bland_;
    sol.values = x_.head(n_);
    if (!bounded) {
      sol.status = Status::unbounded;
      sol.ray = ray_;
      sol.objective_value = c2.head(n_).dot(sol.values);
      return sol;
    }
    sol.status = Status::optimal;
    sol.objective_value = c2.head(n_).dot(sol.values);
    sol.duals = duals_;
    sol.reduced_costs = d_.head(n_).transpose();
    return sol;
  }

 private:
  enum class At { lower, upper, zero, basic };

  void build() {
    n_ = lp_.num_variables();
    m_ = lp_.num_rows();
    const Matrix a = lp_.dense_matrix();
    Vector lo = lp_.lower();
    Vector up = lp_.upper();

    // Nonbasic start: a finite bound, or 0 when the box straddles zero.
    Vector x0(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (lo(j) <= 0 && 0 <= up(j)) x0(j) = 0;
      else if (std::isfinite(lo(j))) x0(j) = lo(j);
      else x0(j) = up(j);
    }

    // One slack per inequality row, then artificials where the slack cannot
    // absorb the initial residual.
    std::vector<Eigen::Index> slack_of(static_cast<std::size_t>(m_), -1);
    Eigen::Index n_slack = 0;
    for (Eigen::Index k = 0; k < m_; ++k)
      if (lp_.row(k).relation != Relation::equal) slack_of[static_cast<std::size_t>(k)] = n_ + n_slack++;

    Vector resid(m_);
    for (Eigen::Index k = 0; k < m_; ++k) resid(k) = lp_.row(k).rhs - a.row(k).dot(x0);

    std::vector<Eigen::Index> art_rows;
    for (Eigen::Index k = 0; k < m_; ++k) {
      const Relation rel = lp_.row(k).relation;
      const bool slack_ok = (rel == Relation::less_equal && resid(k) >= 0) ||
                            (rel == Relation::greater_equal && resid(k) <= 0);
      if (!slack_ok) art_rows.push_back(k);
    }

    first_art_ = n_ + n_slack;
    ncols_ = first_art_ + static_cast<Eigen::Index>(art_rows.size());
    a_ = Matrix::Zero(m_, ncols_);
    a_.leftCols(n_) = a;
    lo_ = Vector::Zero(ncols_);
    up_ = Vector::Constant(ncols_, infinity<Scalar>);
    lo_.head(n_) = lo;
    up_.head(n_) = up;
    x_ = Vector::Zero(ncols_);
    x_.head(n_) = x0;
    b_.resize(m_);
    for (Eigen::Index k = 0; k < m_; ++k) b_(k) = lp_.row(k).rhs;

    basis_.assign(static_cast<std::size_t>(m_), -1);
    state_.assign(static_cast<std::size_t>(ncols_), At::lower);
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (x0(j) == lo(j)) state_[static_cast<std::size_t>(j)] = At::lower;
      else if (x0(j) == up(j)) state_[static_cast<std::size_t>(j)] = At::upper;
      else state_[static_cast<std::size_t>(j)] = At::zero;
    }

    for (Eigen::Index k = 0; k < m_; ++k) {
      const Eigen::Index s = slack_of[static_cast<std::size_t>(k)];
      if (s < 0) continue;
      a_(k, s) = lp_.row(k).relation == Relation::less_equal ? Scalar(1) : Scalar(-1);
      x_(s) = 0;
      state_[static_cast<std::size_t>(s)] = At::lower;
    }
    for (std::size_t q = 0; q < art_rows.size(); ++q) {
      const Eigen::Index k = art_rows[q];
      const Eigen::Index col = first_art_ + static_cast<Eigen::Index>(q);
      a_(k, col) = resid(k) >= 0 ? Scalar(1) : Scalar(-1);
    }

    // Initial basis: the artificial where present, otherwise the slack.
    std::vector<Eigen::Index> art_col(static_cast<std::size_t>(m_), -1);
    for (std::size_t q = 0; q < art_rows.size(); ++q)
      art_col[static_cast<std::size_t>(art_rows[q])] = first_art_ + static_cast<Eigen::Index>(q);
    for (Eigen::Index k = 0; k < m_; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const Eigen::Index col = art_col[uk] >= 0 ? art_col[uk] : slack_of[uk];
      basis_[uk] = col;
      state_[static_cast<std::size_t>(col)] = At::basic;
      x_(col) = resid(k) / a_(k, col);
    }

    // Basis columns are +-unit vectors, so B^-1 A is a row scaling.
    t_ = a_;
    for (Eigen::Index k = 0; k < m_; ++k) t_.row(k) /= a_(k, basis_[static_cast<std::size_t>(k)]);
  }

  /// Runs simplex iterations on `c`. Returns false on an unbounded ray.
  bool optimize(const Vector& c, bool allow_unbounded) {
    compute_reduced_costs(c);
    bool bland = false;
    int degenerate_run = 0;
    long since_refactor = 0;
    for (;;) {
      if (++iterations_ > opt_.max_iterations)
        throw std::runtime_error("simplex: iteration limit reached");
      if (since_refactor++ >= opt_.refactor_every) {
        refactor(c);
        since_refactor = 0;
      }

      const auto [j, dir] = choose_entering(bland);
      if (j < 0) return true;

      // Ratio test: the entering variable's own bound competes with the
      // first basic variable to hit a bound.
      Scalar flip = up_(j) - lo_(j);
      if (state_[static_cast<std::size_t>(j)] == At::zero)
        flip = dir > 0 ? up_(j) - x_(j) : x_(j) - lo_(j);
      const Scalar tie = Scalar(1e-12);
      Eigen::Index leave = -1;
      Scalar leave_alpha = 0;
      Scalar row_step = infinity<Scalar>;
      for (Eigen::Index r = 0; r < m_; ++r) {
        const Scalar alpha = t_(r, j) * Scalar(dir);
        if (std::abs(alpha) <= Scalar(opt_.pivot_tol)) continue;
        const Eigen::Index bvar = basis_[static_cast<std::size_t>(r)];
        Scalar limit;
        if (alpha > 0) {
          if (!std::isfinite(lo_(bvar))) continue;
          limit = std::max(Scalar(0), (x_(bvar) - lo_(bvar)) / alpha);
        } else {
          if (!std::isfinite(up_(bvar))) continue;
          limit = std::max(Scalar(0), (up_(bvar) - x_(bvar)) / -alpha);
        }
        bool take = limit < row_step - tie;
        if (!take && leave >= 0 && limit <= row_step + tie) {
          take = bland ? bvar < basis_[static_cast<std::size_t>(leave)]
                       : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          leave = r;
          leave_alpha = alpha;
          row_step = std::min(row_step, limit);
        }
      }
      Scalar step = row_step;
      if (flip <= row_step) {
        step = flip;
        leave = -1;
      }

      if (!std::isfinite(step)) {
        if (!allow_unbounded) throw std::runtime_error("simplex: unbounded phase-1 direction");
        ray_ = Vector::Zero(n_);
        if (j < n_) ray_(j) = Scalar(dir);
        for (Eigen::Index r = 0; r < m_; ++r) {
          const Eigen::Index bvar = basis_[static_cast<std::size_t>(r)];
          if (bvar < n_) ray_(bvar) = -t_(r, j) * Scalar(dir);
        }
        return false;
      }

      // Move along the edge.
      if (step > 0) {
        x_(j) += Scalar(dir) * step;
        for (Eigen::Index r = 0; r < m_; ++r)
          x_(basis_[static_cast<std::size_t>(r)]) -= t_(r, j) * Scalar(dir) * step;
      }
      degenerate_run = step <= Scalar(opt_.pivot_tol) ? degenerate_run + 1 : 0;
      if (!bland && degenerate_run >= opt_.bland_after) {
        bland = true;
        used_bland_ = true;
      }

      if (leave < 0) {
        // Bound flip, no basis change.
        state_[static_cast<std::size_t>(j)] = dir > 0 ? At::upper : At::lower;
        x_(j) = dir > 0 ? up_(j) : lo_(j);
        continue;
      }

      const Eigen::Index out = basis_[static_cast<std::size_t>(leave)];
      const bool to_lower = leave_alpha > 0;
      x_(out) = to_lower ? lo_(out) : up_(out);
      state_[static_cast<std::size_t>(out)] = to_lower ? At::lower : At::upper;
      pivot(leave, j);
    }
  }

  std::pair<Eigen::Index, int> choose_entering(bool bland) const {
    const Scalar tol = Scalar(opt_.optimality_tol);
    Eigen::Index best = -1;
    int best_dir = 0;
    Scalar best_score = 0;
    for (Eigen::Index j = 0; j < ncols_; ++j) {
      const At s = state_[static_cast<std::size_t>(j)];
      if (s == At::basic || lo_(j) == up_(j)) continue;
      const Scalar dj = d_(j);
      int dir = 0;
      if (s == At::lower && dj > tol) dir = 1;
      else if (s == At::upper && dj < -tol) dir = -1;
      else if (s == At::zero && std::abs(dj) > tol) dir = dj > 0 ? 1 : -1;
      if (dir == 0) continue;
      if (bland) return {j, dir};
      if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = j;
        best_dir = dir;
      }
    }
    return {best, best_dir};
  }

  void pivot(Eigen::Index r, Eigen::Index j) {
    const RowVector prow = t_.row(r) / t_(r, j);
    Vector col = t_.col(j);
    col(r) = 0;
    t_.noalias() -= col * prow;
    t_.row(r) = prow;
    d_ -= d_(j) * prow;
    d_(j) = 0;
    state_[static_cast<std::size_t>(j)] = At::basic;
    basis_[static_cast<std::size_t>(r)] = j;
  }

  void compute_reduced_costs(const Vector& c) {
    Vector cb(m_);
    for (Eigen::Index r = 0; r < m_; ++r) cb(r) = c(basis_[static_cast<std::size_t>(r)]);
    d_ = c.transpose() - cb.transpose() * t_;
    for (Eigen::Index r = 0; r < m_; ++r) d_(basis_[static_cast<std::size_t>(r)]) = 0;
  }

  /// Rebuilds tableau, basic values, duals and reduced costs from A and b.
  void refactor(const Vector& c) {
    if (m_ == 0) {
      duals_ = Vector::Zero(0);
      compute_reduced_costs(c);
      return;
    }
    Matrix basis_matrix(m_, m_);
    Vector cb(m_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      basis_matrix.col(r) = a_.col(basis_[static_cast<std::size_t>(r)]);
      cb(r) = c(basis_[static_cast<std::size_t>(r)]);
    }
    const Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    Vector rhs = b_;
    for (Eigen::Index j = 0; j < ncols_; ++j)
      if (state_[static_cast<std::size_t>(j)] != At::basic && x_(j) != 0) rhs -= a_.col(j) * x_(j);
    const Vector xb = lu.solve(rhs);
    for (Eigen::Index r = 0; r < m_; ++r) x_(basis_[static_cast<std::size_t>(r)]) = xb(r);
    t_ = lu.solve(a_);
    duals_ = lu.transpose().solve(cb);
    d_ = c.transpose() - duals_.transpose() * a_;
    for (Eigen::Index r = 0; r < m_; ++r) d_(basis_[static_cast<std::size_t>(r)]) = 0;
  }

  bool certified() const { return choose_entering(true).first < 0; }

  void drive_out_artificials() {
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < first_art_) continue;
      Eigen::Index best = -1;
      Scalar best_abs = Scalar(opt_.pivot_tol);
      for (Eigen::Index j = 0; j < first_art_; ++j) {
        if (state_[static_cast<std::size_t>(j)] == At::basic) continue;
        if (std::abs(t_(r, j)) > best_abs) {
          best_abs = std::abs(t_(r, j));
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at 0
      const Eigen::Index out = basis_[static_cast<std::size_t>(r)];
      x_(out) = 0;
      state_[static_cast<std::size_t>(out)] = At::lower;
      pivot(r, best);
    }
    for (Eigen::Index j = first_art_; j < ncols_; ++j) {
      lo_(j) = 0;
      up_(j) = 0;
      if (state_[static_cast<std::size_t>(j)] != At::basic) x_(j) = 0;
    }
  }

  const LinearProgram<Scalar>& lp_;
  SolverOptions opt_;
  Eigen::Index n_ = 0, m_ = 0, first_art_ = 0, ncols_ = 0;
  Matrix a_, t_;
  Vector b_, lo_, up_, x_, duals_, ray_;
  RowVector d_;
  std::vector<Eigen::Index> basis_;
  std::vector<At> state_;
  long iterations_ = 0;
  bool used_bland_ = false;
};

}  // namespace detail

template <typename Scalar>
Solution<Scalar> solve(const LinearProgram<Scalar>& lp, const SolverOptions& options = {}) {
  if (const auto problems = lp.validate(); !problems.empty())
    throw std::invalid_argument("malformed linear program: " + problems.front());
  return detail::BoundedSimplex<Scalar>(lp, options).run();
}

struct FeasibilityIssue {
  std::string what;
  double amount = 0;  // size of the breach
};

/// Checks `x` against every row and bound, independently of the solver.
template <typename Scalar>
std::vector<FeasibilityIssue> check_feasibility(const LinearProgram<Scalar>& lp,
                                                const typename LinearProgram<Scalar>::Vector& x,
                                                double row_tol = 1e-7, double bound_tol = 1e-9) {
  std::vector<FeasibilityIssue> out;
  const auto lo = lp.lower();
  const auto up = lp.upper();
  for (Eigen::Index j = 0; j < lp.num_variables(); ++j) {
    if (x(j) < lo(j) - bound_tol)
      out.push_back({"variable " + lp.variable_name(j) + " below lower bound", double(lo(j) - x(j))});
    if (x(j) > up(j) + bound_tol)
      out.push_back({"variable " + lp.variable_name(j) + " above upper bound", double(x(j) - up(j))});
  }
  for (Eigen::Index k = 0; k < lp.num_rows(); ++k) {
    const auto& row = lp.row(k);
    const double act = static_cast<double>(lp.activity(k, x));
    const double rhs = static_cast<double>(row.rhs);
    double breach = 0;
    switch (row.relation) {
      case Relation::less_equal: breach = act - rhs; break;
      case Relation::greater_equal: breach = rhs - act; break;
      case Relation::equal: breach = std::abs(act - rhs); break;
    }
    if (breach > row_tol) out.push_back({"row " + row.name + " violated", breach});
  }
  return out;
}

/// Writes the program in fixed-layout MPS. Rows are named R1..Rm and columns
/// C1..Cn; a comment block maps them back to the program's own names.
/// The objective sense is declared in an OBJSENSE MAX section.
template <typename Scalar>
void write_mps(const LinearProgram<Scalar>& lp, std::ostream& os, const std::string& name = "P2PCLEAR") {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  auto field = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  auto row_id = [](Eigen::Index k) { return "R" + std::to_string(k + 1); };
  auto col_id = [](Eigen::Index j) { return "C" + std::to_string(j + 1); };

  for (Eigen::Index j = 0; j < lp.num_variables(); ++j)
    os << "* " << col_id(j) << " = " << lp.variable_name(j) << '\n';
  for (Eigen::Index k = 0; k < lp.num_rows(); ++k)
    os << "* " << row_id(k) << " = " << lp.row(k).name << '\n';

  os << field("NAME", 14) << name << '\n';
  os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n N  OBJ\n";
  for (Eigen::Index k = 0; k < lp.num_rows(); ++k) {
    const char* t = lp.row(k).relation == Relation::less_equal  ? "L"
                    : lp.row(k).relation == Relation::equal     ? "E"
                                                                : "G";
    os << ' ' << field(t, 3) << row_id(k) << '\n';
  }

  const auto a = lp.dense_matrix();
  const auto c = lp.objective();
  os << "COLUMNS\n";
  for (Eigen::Index j = 0; j < lp.num_variables(); ++j) {
    if (c(j) != 0)
      os << "    " << field(col_id(j), 10) << field("OBJ", 10) << num(double(c(j))) << '\n';
    for (Eigen::Index k = 0; k < lp.num_rows(); ++k)
      if (a(k, j) != 0)
        os << "    " << field(col_id(j), 10) << field(row_id(k), 10) << num(double(a(k, j))) << '\n';
  }
  os << "RHS\n";
  for (Eigen::Index k = 0; k < lp.num_rows(); ++k)
    if (lp.row(k).rhs != 0)
      os << "    " << field("RHS", 10) << field(row_id(k), 10) << num(double(lp.row(k).rhs)) << '\n';

  os << "BOUNDS\n";
  const auto lo = lp.lower();
  const auto up = lp.upper();
  for (Eigen::Index j = 0; j < lp.num_variables(); ++j) {
    const auto bound = [&](const char* t, double v) {
      os << ' ' << field(t, 3) << field("BND", 10) << field(col_id(j), 10) << num(v) << '\n';
    };
    const bool lo_inf = !std::isfinite(double(lo(j)));
    const bool up_inf = !std::isfinite(double(up(j)));
    if (!lo_inf && !up_inf && lo(j) == up(j)) {
      bound("FX", double(lo(j)));
    } else if (lo_inf && up_inf) {
      os << " FR " << field("BND", 10) << col_id(j) << '\n';
    } else {
      if (lo_inf) os << " MI " << field("BND", 10) << col_id(j) << '\n';
      else if (lo(j) != 0) bound("LO", double(lo(j)));
      if (!up_inf) bound("UP", double(up(j)));
    }
  }
  os << "ENDATA\n";
}

}  // namespace p2p::lp
