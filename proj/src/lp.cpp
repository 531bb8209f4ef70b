#include "fendi/lp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>

#include <Eigen/Dense>

#include "fendi/error.hpp"
#include "fendi/kernels.hpp"

namespace fendi::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
  }
  return "?";
}

VarId Problem::add_variable(std::string label, double lower, double upper, double objective) {
  if (!std::isfinite(lower)) throw InvalidArgument("lp: variable lower bound must be finite");
  if (std::isnan(upper) || upper < lower) throw InvalidArgument("lp: upper bound below lower bound");
  if (!std::isfinite(objective)) throw InvalidArgument("lp: objective coefficient must be finite");
  variables_.push_back(Variable{std::move(label), lower, upper, objective});
  return VarId{num_variables() - 1};
}

void Problem::set_objective(VarId v, double coef) {
  if (!std::isfinite(coef)) throw InvalidArgument("lp: objective coefficient must be finite");
  variables_.at(v.index).objective = coef;
}

int Problem::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string label) {
  if (!std::isfinite(rhs)) throw InvalidArgument("lp: constraint rhs must be finite");
  for (const auto& t : terms) {
    if (t.var.index < 0 || t.var.index >= num_variables()) {
      throw InvalidArgument("lp: constraint references an undeclared variable");
    }
    if (!std::isfinite(t.coef)) throw InvalidArgument("lp: constraint coefficient must be finite");
  }
  constraints_.push_back(Constraint{std::move(terms), sense, rhs, std::move(label)});
  return num_constraints() - 1;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kHarrisTol = 1e-9;
constexpr double kDrop = 1e-14;
constexpr int kDegenerateStreakForBland = 50;
constexpr int kReinvertEvery = 50;

struct StdRow {
  std::vector<std::pair<int, double>> coefs;
  Sense sense;
  double rhs;
  int origin;  // constraint index, or -1 for an upper-bound row
  bool flipped = false;
};

// Revised primal simplex on min c.x, Ax = b, x >= 0, b >= 0. The basis inverse
// is kept dense alongside x_B and the entering column in one row-major block
// [B^-1 | x_B | alpha] so a pivot is a single column elimination.
class Simplex {
 public:
  Simplex(int rows, std::vector<int> col_start, std::vector<int> row_index,
          std::vector<double> values, std::vector<double> b, int first_art)
      : m_(rows), cols_(static_cast<int>(col_start.size()) - 1), stride_(rows + 2),
        first_art_(first_art), col_start_(std::move(col_start)), row_index_(std::move(row_index)),
        values_(std::move(values)), b_(std::move(b)),
        block_(static_cast<std::size_t>(rows) * (rows + 2), 0.0), basis_(rows, -1),
        pos_(cols_, -1), y_(rows, 0.0), d_(cols_, 0.0) {}

  void set_basis(const std::vector<int>& basis) {
    basis_ = basis;
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int r = 0; r < m_; ++r) pos_[basis_[r]] = r;
    reinvert();
  }

  const std::vector<int>& basis() const { return basis_; }
  double x(int r) const { return block_[idx(r, m_)]; }
  const std::vector<double>& y() const { return y_; }
  bool is_artificial(int j) const { return j >= first_art_; }

  enum class Outcome { kOptimal, kUnbounded };

  Outcome run(const std::vector<double>& cost, const std::vector<char>& eligible, double opt_tol,
              long& iterations, long max_iterations) {
    int degenerate_streak = 0;
    bool fresh = false;
    while (true) {
      if (iterations >= max_iterations) throw NumericalError("lp: simplex iteration limit reached");
      if (since_reinvert_ >= kReinvertEvery) reinvert();
      fresh = since_reinvert_ == 0;
      compute_duals(cost);
      kernels::reduced_costs(col_start_, row_index_, values_, cost, y_, d_, kernels::Exec::kParallel);
      const bool bland = degenerate_streak >= kDegenerateStreakForBland;
      int enter = -1;
      double best = -opt_tol;
      for (int j = 0; j < cols_; ++j) {
        if (!eligible[j] || pos_[j] >= 0) continue;
        if (d_[j] < best) {
          enter = j;
          if (bland) break;
          best = d_[j];
        }
      }
      if (enter < 0) {
        if (!fresh) {
          reinvert();
          continue;
        }
        return Outcome::kOptimal;
      }
      load_column(enter);
      const int leave = ratio_test(bland);
      if (leave < 0) {
        if (!fresh) {
          reinvert();
          continue;
        }
        return Outcome::kUnbounded;
      }
      const double theta = std::max(0.0, x(leave)) / std::abs(block_[idx(leave, m_ + 1)]);
      degenerate_streak = theta * std::abs(d_[enter]) <= 1e-12 ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
      ++iterations;
    }
  }

  // Row r of B^-1 A evaluated at column j.
  double tableau_entry(int r, int j) const {
    double v = 0.0;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) v += block_[idx(r, row_index_[p])] * values_[p];
    return v;
  }

  void load_column(int j) {
    for (int r = 0; r < m_; ++r) block_[idx(r, m_ + 1)] = 0.0;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      const int k = row_index_[p];
      const double a = values_[p];
      for (int r = 0; r < m_; ++r) block_[idx(r, m_ + 1)] += block_[idx(r, k)] * a;
    }
  }

  void pivot(int r, int enter) {
    double* prow = &block_[idx(r, 0)];
    const double inv = 1.0 / prow[m_ + 1];
    nz_.clear();
    for (int c = 0; c <= m_; ++c) {
      if (prow[c] == 0.0) continue;
      prow[c] *= inv;
      nz_.push_back(c);
    }
    prow[m_ + 1] = 1.0;
    kernels::eliminate_column(block_, m_, stride_, r, m_ + 1, nz_, kDrop, kernels::Exec::kParallel);
    pos_[basis_[r]] = -1;
    basis_[r] = enter;
    pos_[enter] = r;
    ++since_reinvert_;
  }

  void reinvert() {
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[r];
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) basis_matrix(row_index_[p], r) = values_[p];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) throw NumericalError("lp: singular basis");
    for (int r = 0; r < m_; ++r) {
      double xr = 0.0;
      for (int c = 0; c < m_; ++c) {
        block_[idx(r, c)] = inv(r, c);
        xr += inv(r, c) * b_[c];
      }
      block_[idx(r, m_)] = xr;
      block_[idx(r, m_ + 1)] = 0.0;
    }
    since_reinvert_ = 0;
  }

 private:
  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * stride_ + c; }

  void compute_duals(const std::vector<double>& cost) {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &block_[idx(r, 0)];
      for (int c = 0; c < m_; ++c) y_[c] += cb * row[c];
    }
  }

  // Harris two-pass ratio test. Basic artificials are held at zero: any
  // nonzero entry in their row forces them out at step zero.
  int ratio_test(bool bland) const {
    double alpha_max = 0.0;
    for (int r = 0; r < m_; ++r) alpha_max = std::max(alpha_max, std::abs(block_[idx(r, m_ + 1)]));
    const double piv = kPivotTol * std::max(1.0, alpha_max);
    auto candidate = [&](int r, double& a) {
      a = block_[idx(r, m_ + 1)];
      if (a > piv) return true;
      if (is_artificial(basis_[r]) && first_art_barred_ && a < -piv) return true;
      return false;
    };
    double theta_max = kInfinity;
    for (int r = 0; r < m_; ++r) {
      double a;
      if (!candidate(r, a)) continue;
      const double xr = a > 0 ? std::max(0.0, x(r)) : 0.0;
      const double slack = bland ? 0.0 : kHarrisTol;
      theta_max = std::min(theta_max, (xr + slack) / std::abs(a));
    }
    if (!std::isfinite(theta_max)) return -1;
    int leave = -1;
    double best_pivot = 0.0;
    double best_ratio = kInfinity;
    for (int r = 0; r < m_; ++r) {
      double a;
      if (!candidate(r, a)) continue;
      const double xr = a > 0 ? std::max(0.0, x(r)) : 0.0;
      const double ratio = xr / std::abs(a);
      if (ratio > theta_max * (1.0 + 1e-12)) continue;
      bool better;
      if (bland) {
        better = leave < 0 || ratio < best_ratio - 1e-15 ||
                 (ratio <= best_ratio + 1e-15 && basis_[r] < basis_[leave]);
      } else {
        better = std::abs(a) > best_pivot;
      }
      if (better) {
        leave = r;
        best_pivot = std::abs(a);
        best_ratio = ratio;
      }
    }
    return leave;
  }

 public:
  bool first_art_barred_ = false;

 private:
  int m_;
  int cols_;
  int stride_;
  int first_art_;
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> values_;
  std::vector<double> b_;
  std::vector<double> block_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<double> y_;
  std::vector<double> d_;
  std::vector<int> nz_;
  int since_reinvert_ = 0;
};

}  // namespace

double max_relative_violation(const Problem& problem, const std::vector<double>& values) {
  double worst = 0.0;
  for (int j = 0; j < problem.num_variables(); ++j) {
    const auto& v = problem.variables()[j];
    const double scale = std::max(1.0, std::abs(values[j]));
    worst = std::max(worst, (v.lower - values[j]) / scale);
    if (std::isfinite(v.upper)) worst = std::max(worst, (values[j] - v.upper) / scale);
  }
  for (const auto& c : problem.constraints()) {
    double lhs = 0.0;
    double mag = 0.0;
    for (const auto& t : c.terms) {
      lhs += t.coef * values[t.var.index];
      mag += std::abs(t.coef * values[t.var.index]);
    }
    const double scale = std::max({1.0, std::abs(c.rhs), mag});
    double viol = 0.0;
    switch (c.sense) {
      case Sense::kLessEqual:
        viol = lhs - c.rhs;
        break;
      case Sense::kGreaterEqual:
        viol = c.rhs - lhs;
        break;
      case Sense::kEqual:
        viol = std::abs(lhs - c.rhs);
        break;
    }
    worst = std::max(worst, viol / scale);
  }
  return worst;
}

Solution solve(const Problem& problem, const Tolerances& tol) {
  const int n = problem.num_variables();
  const auto& vars = problem.variables();

  std::vector<StdRow> rows;
  rows.reserve(problem.num_constraints() + n);
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const auto& c = problem.constraints()[i];
    std::map<int, double> merged;
    double rhs = c.rhs;
    for (const auto& t : c.terms) {
      merged[t.var.index] += t.coef;
      rhs -= t.coef * vars[t.var.index].lower;
    }
    StdRow row{{}, c.sense, rhs, i};
    for (auto [j, a] : merged) {
      if (a != 0.0) row.coefs.emplace_back(j, a);
    }
    rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(vars[j].upper)) {
      rows.push_back(StdRow{{{j, 1.0}}, Sense::kLessEqual, vars[j].upper - vars[j].lower, -1});
    }
  }
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      row.rhs = -row.rhs;
      for (auto& [_, a] : row.coefs) a = -a;
      row.flipped = true;
      if (row.sense == Sense::kLessEqual) {
        row.sense = Sense::kGreaterEqual;
      } else if (row.sense == Sense::kGreaterEqual) {
        row.sense = Sense::kLessEqual;
      }
    }
  }

  const int m = static_cast<int>(rows.size());
  std::vector<int> slack_col(m, -1);
  std::vector<int> art_col(m, -1);
  int cols = n;
  for (int r = 0; r < m; ++r) {
    if (rows[r].sense != Sense::kEqual) slack_col[r] = cols++;
  }
  const int first_art = cols;
  for (int r = 0; r < m; ++r) {
    if (rows[r].sense != Sense::kLessEqual) art_col[r] = cols++;
  }

  std::vector<std::vector<std::pair<int, double>>> by_col(cols);
  std::vector<double> b(m);
  std::vector<int> start_basis(m);
  for (int r = 0; r < m; ++r) {
    for (auto [j, a] : rows[r].coefs) by_col[j].emplace_back(r, a);
    if (slack_col[r] >= 0) {
      by_col[slack_col[r]].emplace_back(r, rows[r].sense == Sense::kLessEqual ? 1.0 : -1.0);
    }
    if (art_col[r] >= 0) by_col[art_col[r]].emplace_back(r, 1.0);
    b[r] = rows[r].rhs;
    start_basis[r] = art_col[r] >= 0 ? art_col[r] : slack_col[r];
  }
  std::vector<int> col_start(cols + 1, 0);
  std::vector<int> row_index;
  std::vector<double> values;
  for (int j = 0; j < cols; ++j) {
    for (auto [r, a] : by_col[j]) {
      row_index.push_back(r);
      values.push_back(a);
    }
    col_start[j + 1] = static_cast<int>(row_index.size());
  }

  Simplex spx(m, std::move(col_start), std::move(row_index), std::move(values), b, first_art);
  spx.set_basis(start_basis);

  const long max_iter =
      tol.max_iterations > 0 ? tol.max_iterations : 50L * (m + cols) + 10000L;
  long iterations = 0;
  std::vector<char> eligible(cols, 1);

  Solution sol;
  if (first_art < cols) {
    std::vector<double> phase1(cols, 0.0);
    for (int j = first_art; j < cols; ++j) phase1[j] = 1.0;
    spx.run(phase1, eligible, tol.optimality, iterations, max_iter);
    double infeasibility = 0.0;
    double rhs_scale = 1.0;
    for (int r = 0; r < m; ++r) {
      rhs_scale = std::max(rhs_scale, rows[r].rhs);
      if (spx.is_artificial(spx.basis()[r])) infeasibility += std::max(0.0, spx.x(r));
    }
    if (infeasibility > tol.feasibility * rhs_scale) {
      sol.status = Status::kInfeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Drive zero-level artificials out of the basis where a structural or
    // slack column can replace them; rows without one are redundant.
    for (int r = 0; r < m; ++r) {
      if (!spx.is_artificial(spx.basis()[r])) continue;
      int best = -1;
      double mag = 1e-7;
      for (int j = 0; j < first_art; ++j) {
        if (std::find(spx.basis().begin(), spx.basis().end(), j) != spx.basis().end()) continue;
        const double v = std::abs(spx.tableau_entry(r, j));
        if (v > mag) {
          mag = v;
          best = j;
        }
      }
      if (best >= 0) {
        spx.load_column(best);
        spx.pivot(r, best);
        ++iterations;
      }
    }
    spx.reinvert();
    for (int j = first_art; j < cols; ++j) eligible[j] = 0;
    spx.first_art_barred_ = true;
  }

  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = -vars[j].objective;
  if (spx.run(phase2, eligible, tol.optimality, iterations, max_iter) == Simplex::Outcome::kUnbounded) {
    sol.status = Status::kUnbounded;
    sol.iterations = iterations;
    return sol;
  }

  sol.status = Status::kOptimal;
  sol.iterations = iterations;
  sol.values.assign(n, 0.0);
  for (int r = 0; r < m; ++r) {
    const int bj = spx.basis()[r];
    if (bj < n) sol.values[bj] = std::max(0.0, spx.x(r));
  }
  for (int j = 0; j < n; ++j) {
    sol.values[j] += vars[j].lower;
    if (std::isfinite(vars[j].upper)) sol.values[j] = std::min(sol.values[j], vars[j].upper);
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += vars[j].objective * sol.values[j];

  sol.duals.assign(problem.num_constraints(), 0.0);
  for (int r = 0; r < m; ++r) {
    if (rows[r].origin < 0) continue;
    const double sigma = rows[r].flipped ? -1.0 : 1.0;
    sol.duals[rows[r].origin] = -sigma * spx.y()[r];
  }

  if (max_relative_violation(problem, sol.values) > tol.feasibility) {
    throw NumericalError("lp: optimal basis violates constraints beyond tolerance");
  }
  return sol;
}

namespace {

std::string sanitize(const std::string& label, const char* prefix, int index) {
  std::string out;
  for (char ch : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = std::string(prefix) + std::to_string(index) + (out.empty() ? "" : "_" + out);
  }
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& [coef, name] = terms[i];
    out << (coef < 0 ? " - " : (i == 0 ? " " : " + ")) << std::abs(coef) << " " << name;
  }
}

}  // namespace

void write_lp(const Problem& problem, std::ostream& out) {
  std::vector<std::string> names;
  for (int j = 0; j < problem.num_variables(); ++j) {
    names.push_back(sanitize(problem.variables()[j].label, "x", j));
  }
  out << "\\ generated by fendi\nMaximize\n obj:";
  std::vector<std::pair<double, std::string>> obj;
  for (int j = 0; j < problem.num_variables(); ++j) {
    if (problem.variables()[j].objective != 0.0) obj.emplace_back(problem.variables()[j].objective, names[j]);
  }
  write_terms(out, obj);
  out << "\nSubject To\n";
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const auto& c = problem.constraints()[i];
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& t : c.terms) terms.emplace_back(t.coef, names[t.var.index]);
    out << " " << sanitize(c.label, "c", i) << ":";
    write_terms(out, terms);
    out << (c.sense == Sense::kLessEqual ? " <= " : c.sense == Sense::kGreaterEqual ? " >= " : " = ")
        << c.rhs << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < problem.num_variables(); ++j) {
    const auto& v = problem.variables()[j];
    out << " " << v.lower << " <= " << names[j];
    if (std::isfinite(v.upper)) out << " <= " << v.upper;
    out << "\n";
  }
  out << "End\n";
}

}  // namespace fendi::lp
