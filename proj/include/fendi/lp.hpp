#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace fendi::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VarId {
  int index = -1;
  friend bool operator==(VarId, VarId) = default;
};

struct Term {
  VarId var;
  double coef;
};

enum class Sense { kLessEqual, kGreaterEqual, kEqual };
enum class Status { kOptimal, kInfeasible, kUnbounded };

const char* to_string(Status s);

struct Tolerances {
  double feasibility = 1e-6;  // relative, applied when checking a returned solution
  double optimality = 1e-8;   // reduced-cost threshold
  long max_iterations = 0;    // 0 selects a size-dependent limit
};

// Maximisation LP over box-bounded reals (finite lower bound, default 0).
class Problem {
 public:
  VarId add_variable(std::string label, double lower = 0.0, double upper = kInfinity,
                     double objective = 0.0);
  void set_objective(VarId v, double coef);
  int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string label = {});

  struct Variable {
    std::string label;
    double lower;
    double upper;
    double objective;
  };
  struct Constraint {
    std::vector<Term> terms;
    Sense sense;
    double rhs;
    std::string label;
  };

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
};

struct Solution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // one per variable; empty unless optimal
  std::vector<double> duals;   // d objective / d rhs, one per constraint
  long iterations = 0;

  double value(VarId v) const { return values.at(v.index); }
};

// Two-phase revised primal simplex with a dense basis inverse. Throws lp::NumericalError on
// breakdown or when an "optimal" point fails the feasibility re-check.
Solution solve(const Problem& problem, const Tolerances& tol = {});

// Largest constraint or bound violation of `values`, scaled by
// max(1, |rhs|, sum |a_i x_i|).
double max_relative_violation(const Problem& problem, const std::vector<double>& values);

// CPLEX-style LP text dump for external debugging.
void write_lp(const Problem& problem, std::ostream& out);

}  // namespace fendi::lp
