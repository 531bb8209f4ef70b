#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fendi/error.hpp"
#include "fendi/kernels.hpp"
#include "fendi/lp.hpp"

namespace fendi::lp {
namespace {

TEST(Lp, Trivial) {
  Problem p;
  auto x = p.add_variable("x", 0, kInfinity, 1.0);
  p.add_constraint({{x, 1.0}}, Sense::kLessEqual, 3);
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-12);

  Problem q;
  auto y = q.add_variable("y", 0, kInfinity, 1.0);
  q.add_constraint({{y, 1.0}}, Sense::kLessEqual, -1);
  EXPECT_EQ(solve(q).status, Status::kInfeasible);

  Problem u;
  auto z = u.add_variable("z", 0, kInfinity, 1.0);
  u.add_constraint({{z, 1.0}}, Sense::kGreaterEqual, 1);
  EXPECT_EQ(solve(u).status, Status::kUnbounded);
}

TEST(Lp, BoundsEqualitiesAndDuals) {
  Problem p;
  auto x = p.add_variable("x", 0, 1, 1.0);
  auto y = p.add_variable("y", 0, kInfinity, 1.0);
  int c0 = p.add_constraint({{y, 1.0}}, Sense::kLessEqual, 2);
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-12);
  EXPECT_NEAR(s.value(x), 1.0, 1e-12);
  EXPECT_NEAR(s.duals[c0], 1.0, 1e-12);

  // max x + 2y s.t. x + y = 4, x - y >= -2, lower bound x >= 0.5.
  Problem e;
  auto a = e.add_variable("a", 0.5, kInfinity, 1.0);
  auto b = e.add_variable("b", 0, kInfinity, 2.0);
  int eq = e.add_constraint({{a, 1.0}, {b, 1.0}}, Sense::kEqual, 4);
  int ge = e.add_constraint({{a, 1.0}, {b, -1.0}}, Sense::kGreaterEqual, -2);
  auto t = solve(e);
  ASSERT_EQ(t.status, Status::kOptimal);
  EXPECT_NEAR(t.value(a), 1.0, 1e-12);
  EXPECT_NEAR(t.value(b), 3.0, 1e-12);
  EXPECT_NEAR(t.objective, 7.0, 1e-12);
  // Dual check by finite perturbation of the rhs.
  for (int row : {eq, ge}) {
    Problem pert;
    auto a2 = pert.add_variable("a", 0.5, kInfinity, 1.0);
    auto b2 = pert.add_variable("b", 0, kInfinity, 2.0);
    pert.add_constraint({{a2, 1.0}, {b2, 1.0}}, Sense::kEqual, 4 + (row == eq ? 1e-3 : 0));
    pert.add_constraint({{a2, 1.0}, {b2, -1.0}}, Sense::kGreaterEqual, -2 + (row == ge ? 1e-3 : 0));
    EXPECT_NEAR((solve(pert).objective - t.objective) / 1e-3, t.duals[row], 1e-6);
  }
}

TEST(Lp, ChainOred) {
  // Chain A-B-C with c=1, q_l=1, q_B=0.5: variables gAB, gBC, x.
  Problem p;
  auto gab = p.add_variable("gAB", 0, 1);
  auto gbc = p.add_variable("gBC", 0, 1);
  auto x = p.add_variable("x", 0, kInfinity, 0.5);
  p.add_constraint({{gab, 1.0}, {x, -1.0}}, Sense::kEqual, 0);
  p.add_constraint({{gbc, 1.0}, {x, -1.0}}, Sense::kEqual, 0);
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 0.5, 1e-12);
}

TEST(Lp, DegenerateAndRedundant) {
  Problem p;
  auto x = p.add_variable("x", 0, kInfinity, 1.0);
  auto y = p.add_variable("y", 0, kInfinity, 1.0);
  p.add_constraint({{x, 1.0}, {y, 1.0}}, Sense::kEqual, 1);
  p.add_constraint({{x, 2.0}, {y, 2.0}}, Sense::kEqual, 2);
  p.add_constraint({{x, 1.0}}, Sense::kLessEqual, 0);
  p.add_constraint({{x, 1.0}, {y, -1.0}}, Sense::kLessEqual, 0);
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

// Random LPs solved against brute-force vertex enumeration in 2D.
TEST(Lp, RandomTwoVariableAgainstVertexEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Problem p;
    const double c0 = coef(rng);
    const double c1 = coef(rng);
    auto x = p.add_variable("x", 0, 4, c0);
    auto y = p.add_variable("y", 0, 4, c1);
    std::vector<std::array<double, 3>> rows{{-1, 0, 0}, {0, -1, 0}, {1, 0, 4}, {0, 1, 4}};
    for (int r = 0; r < 4; ++r) {
      const double a = coef(rng), b = coef(rng), rhs = 0.5 + std::abs(coef(rng));
      p.add_constraint({{x, a}, {y, b}}, Sense::kLessEqual, rhs);
      rows.push_back({a, b, rhs});
    }
    double best = -1e300;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        const double det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
        if (std::abs(det) < 1e-12) continue;
        const double vx = (rows[i][2] * rows[j][1] - rows[i][1] * rows[j][2]) / det;
        const double vy = (rows[i][0] * rows[j][2] - rows[i][2] * rows[j][0]) / det;
        bool ok = true;
        for (const auto& r : rows) ok = ok && r[0] * vx + r[1] * vy <= r[2] + 1e-9;
        if (ok) best = std::max(best, c0 * vx + c1 * vy);
      }
    }
    auto s = solve(p);
    ASSERT_EQ(s.status, Status::kOptimal) << trial;
    EXPECT_NEAR(s.objective, best, 1e-8) << trial;
    EXPECT_LE(max_relative_violation(p, s.values), 1e-9);
  }
}

TEST(Lp, Deterministic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Problem p;
  std::vector<VarId> v;
  for (int j = 0; j < 30; ++j) v.push_back(p.add_variable("v" + std::to_string(j), 0, kInfinity, u(rng)));
  for (int i = 0; i < 20; ++i) {
    std::vector<Term> t;
    for (int j = 0; j < 30; ++j) if (u(rng) < 0.3) t.push_back({v[j], u(rng)});
    t.push_back({v[i], 1.0});
    p.add_constraint(t, Sense::kLessEqual, 1 + u(rng));
  }
  auto a = solve(p);
  auto b = solve(p);
  ASSERT_EQ(a.status, Status::kOptimal);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(Lp, RejectsMalformed) {
  Problem p;
  EXPECT_THROW(p.add_variable("x", -kInfinity), InvalidArgument);
  EXPECT_THROW(p.add_variable("x", 2, 1), InvalidArgument);
  EXPECT_THROW(p.add_constraint({{VarId{3}, 1.0}}, Sense::kEqual, 0), InvalidArgument);
  auto x = p.add_variable("x");
  EXPECT_THROW(p.add_constraint({{x, NAN}}, Sense::kEqual, 0), InvalidArgument);
}

TEST(Lp, WriteLp) {
  Problem p;
  auto x = p.add_variable("g|A|B", 0, 1, 2.0);
  p.add_constraint({{x, 1.0}}, Sense::kLessEqual, 3, "cap");
  std::ostringstream out;
  write_lp(p, out);
  EXPECT_NE(out.str().find("Maximize"), std::string::npos);
  EXPECT_NE(out.str().find("g_A_B"), std::string::npos);
  EXPECT_NE(out.str().find("cap:"), std::string::npos);
}

TEST(Kernels, ParallelMatchesReference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int rows = 300, stride = 400;
  std::vector<double> t(static_cast<std::size_t>(rows) * stride);
  for (auto& v : t) v = u(rng) < -0.5 ? 0.0 : u(rng);
  const int pr = 17, pc = 5;
  t[pr * stride + pc] = 2.0;
  for (int c = 0; c < stride; ++c) t[pr * stride + c] /= 2.0;
  std::vector<int> nz;
  for (int c = 0; c < stride; ++c) if (c != pc && t[pr * stride + c] != 0.0) nz.push_back(c);
  auto a = t, b = t;
  kernels::eliminate_column(a, rows, stride, pr, pc, nz, 1e-13, kernels::Exec::kParallel);
  kernels::eliminate_column_reference(b, rows, stride, pr, pc, 1e-13);
  EXPECT_EQ(a, b);
}

TEST(Kernels, ReducedCostsMatchDirectSum) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int rows = 50, cols = 20000;
  std::vector<int> start{0}, index;
  std::vector<double> values;
  for (int j = 0; j < cols; ++j) {
    for (int r = j % 7; r < rows; r += 11) {
      index.push_back(r);
      values.push_back(u(rng));
    }
    start.push_back(static_cast<int>(index.size()));
  }
  ASSERT_GE(static_cast<long>(values.size()), kernels::kParallelMinWork);
  std::vector<double> cost(cols), y(rows), par(cols), ser(cols);
  for (auto& v : cost) v = u(rng);
  for (auto& v : y) v = u(rng);
  kernels::reduced_costs(start, index, values, cost, y, par, kernels::Exec::kParallel);
  kernels::reduced_costs(start, index, values, cost, y, ser, kernels::Exec::kSerial);
  EXPECT_EQ(par, ser);
  for (int j = 0; j < cols; j += 997) {
    double d = cost[j];
    for (int p = start[j]; p < start[j + 1]; ++p) d -= y[index[p]] * values[p];
    EXPECT_DOUBLE_EQ(par[j], d);
  }
}

}  // namespace
}  // namespace fendi::lp
