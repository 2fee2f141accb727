// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The qoebf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Barrier interior-point method for ConeProgram.
//
// Each Newton system has the form
//   (D + A^T G A) dx = r
// where D is the log-det Hessian of the PSD blocks (inverse in closed form:
// V -> W V W), A maps variables to the arguments of the small cones and G is
// their barrier Hessian. Eliminating the block part leaves a dense symmetric
// system in the small-cone multipliers, the equality multipliers and the
// scalar step, whose size does not grow with the block dimensions.

#include <algorithm>
#include <cmath>
#include <limits>

#include "qoebf/conic.hpp"

namespace qoebf::conic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergence = 1e12;
// Phase one boxes every variable so that free directions cannot drive its
// barrier to minus infinity. This is the widest box tried.
constexpr double kPhaseOneBox = 1e10;
// Half squared decrements below this count as centered once Newton stops
// making progress on them.
constexpr double kDecrementFloor = 1e-3;
// Per-centering step cap in phase two, where a stalled centering can fall
// back to the previous one.
constexpr int kMaxCenteringSteps = 40;
// A stalled centering is retried from the previous centered point with the
// square root of the growth factor until the factor drops below this.
constexpr double kMinBarrierGrowth = 1.5;
constexpr int kRefinementPasses = 5;
// Range for the starting barrier parameter of phase two.
constexpr double kMinStartT = 1e-8;
constexpr double kMaxStartT = 1e4;

struct Row {
  double constant = 0.0;
  std::vector<std::pair<Eigen::Index, double>> scalars;  // compiled scalar index
};

struct Cone {
  ConeKind kind = ConeKind::kNonnegative;
  Eigen::Index first = 0;
  Eigen::Index dim = 0;
  bool touches_blocks = false;  // some argument depends on a PSD block
};

struct BlockFactors {
  Eigen::Index dim = 0;
  Eigen::MatrixXcd v;           // n x F
  Eigen::VectorXd weight;       // F
  std::vector<Eigen::Index> row;  // F
};

// Program restricted to the variables that appear in constraints. Rows
// [0, num_cone_rows) belong to cones, the rest are equality rows.
struct Compiled {
  Eigen::Index num_scalars = 0;
  Eigen::Index num_cone_rows = 0;
  std::vector<Row> rows;
  std::vector<Cone> cones;
  std::vector<bool> row_eliminated;  // per cone row: its cone touches blocks
  std::vector<BlockFactors> blocks;
  Eigen::VectorXd objective;
  double barrier_degree = 0.0;

  Eigen::Index num_rows() const { return static_cast<Eigen::Index>(rows.size()); }
  Eigen::Index num_eq() const { return num_rows() - num_cone_rows; }
};

struct Point {
  Eigen::VectorXd y;
  std::vector<Eigen::MatrixXcd> w;
};

Eigen::VectorXd row_values(const Compiled& c, const Point& x) {
  Eigen::VectorXd vals(c.num_rows());
  for (Eigen::Index r = 0; r < c.num_rows(); ++r) {
    double v = c.rows[r].constant;
    for (const auto& [i, a] : c.rows[r].scalars) v += a * x.y(i);
    vals(r) = v;
  }
  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    const auto& bf = c.blocks[b];
    if (bf.v.cols() == 0) continue;
    const Eigen::MatrixXcd wv = x.w[b] * bf.v;
    for (Eigen::Index f = 0; f < bf.v.cols(); ++f) {
      vals(bf.row[f]) += bf.weight(f) * bf.v.col(f).dot(wv.col(f)).real();
    }
  }
  return vals;
}

// Directional change of the row values along (dy, dw).
Eigen::VectorXd row_directions(const Compiled& c, const Eigen::VectorXd& dy,
                               const std::vector<Eigen::MatrixXcd>& dw) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(c.num_rows());
  for (Eigen::Index r = 0; r < c.num_rows(); ++r) {
    for (const auto& [i, a] : c.rows[r].scalars) d(r) += a * dy(i);
  }
  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    const auto& bf = c.blocks[b];
    if (bf.v.cols() == 0) continue;
    const Eigen::MatrixXcd dv = dw[b] * bf.v;
    for (Eigen::Index f = 0; f < bf.v.cols(); ++f) {
      d(bf.row[f]) += bf.weight(f) * bf.v.col(f).dot(dv.col(f)).real();
    }
  }
  return d;
}

// Barrier value; +inf outside the interior.
double cone_barrier(ConeKind kind, const Eigen::Ref<const Eigen::VectorXd>& a) {
  switch (kind) {
    case ConeKind::kNonnegative:
      return a(0) > 0.0 ? -std::log(a(0)) : kInf;
    case ConeKind::kSecondOrder: {
      const double t = a(0);
      if (t <= 0.0) return kInf;
      const double u = a.tail(a.size() - 1).norm();
      if (u >= t) return kInf;
      return -std::log((t - u) * (t + u));
    }
    case ConeKind::kRotatedSecondOrder: {
      if (a(0) <= 0.0 || a(1) <= 0.0) return kInf;
      const double f = 2.0 * a(0) * a(1) - a.tail(a.size() - 2).squaredNorm();
      return f > 0.0 ? -std::log(f) : kInf;
    }
    case ConeKind::kExponential: {
      const double x = a(0), y = a(1), z = a(2);
      if (y <= 0.0 || z <= 0.0) return kInf;
      const double psi = y * std::log(z / y) - x;
      if (!(psi > 0.0)) return kInf;
      return -std::log(psi) - std::log(y) - std::log(z);
    }
    case ConeKind::kZero:
      return 0.0;
  }
  return kInf;
}

void cone_derivatives(ConeKind kind, const Eigen::Ref<const Eigen::VectorXd>& a,
                      Eigen::Ref<Eigen::VectorXd> grad, Eigen::Ref<Eigen::MatrixXd> hess) {
  switch (kind) {
    case ConeKind::kNonnegative:
      grad(0) = -1.0 / a(0);
      hess(0, 0) = 1.0 / (a(0) * a(0));
      return;
    case ConeKind::kSecondOrder: {
      const Eigen::Index d = a.size();
      const double f = a(0) * a(0) - a.tail(d - 1).squaredNorm();
      Eigen::VectorXd df(d);
      df(0) = 2.0 * a(0);
      df.tail(d - 1) = -2.0 * a.tail(d - 1);
      grad = -df / f;
      hess = df * df.transpose() / (f * f);
      hess(0, 0) -= 2.0 / f;
      for (Eigen::Index i = 1; i < d; ++i) hess(i, i) += 2.0 / f;
      return;
    }
    case ConeKind::kRotatedSecondOrder: {
      const Eigen::Index d = a.size();
      const double f = 2.0 * a(0) * a(1) - a.tail(d - 2).squaredNorm();
      Eigen::VectorXd df(d);
      df(0) = 2.0 * a(1);
      df(1) = 2.0 * a(0);
      df.tail(d - 2) = -2.0 * a.tail(d - 2);
      grad = -df / f;
      hess = df * df.transpose() / (f * f);
      hess(0, 1) -= 2.0 / f;
      hess(1, 0) -= 2.0 / f;
      for (Eigen::Index i = 2; i < d; ++i) hess(i, i) += 2.0 / f;
      return;
    }
    case ConeKind::kExponential: {
      const double y = a(1), z = a(2);
      const double lzy = std::log(z / y);
      const double psi = y * lzy - a(0);
      Eigen::Vector3d dpsi(-1.0, lzy - 1.0, y / z);
      Eigen::Matrix3d d2psi = Eigen::Matrix3d::Zero();
      d2psi(1, 1) = -1.0 / y;
      d2psi(1, 2) = d2psi(2, 1) = 1.0 / z;
      d2psi(2, 2) = -y / (z * z);
      grad = -dpsi / psi;
      grad(1) -= 1.0 / y;
      grad(2) -= 1.0 / z;
      hess = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
      hess(1, 1) += 1.0 / (y * y);
      hess(2, 2) += 1.0 / (z * z);
      return;
    }
    case ConeKind::kZero:
      return;
  }
}

// sum F(args) - sum log det W; +inf outside. The linear part -t c^T y of the
// centering objective is tracked through differences only, since its
// magnitude can swamp the barrier change in floating point.
double barrier(const Compiled& c, const Point& x, const Eigen::VectorXd& vals) {
  double phi = 0.0;
  for (const auto& cone : c.cones) {
    const double f = cone_barrier(cone.kind, vals.segment(cone.first, cone.dim));
    if (!std::isfinite(f)) return kInf;
    phi += f;
  }
  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    Eigen::LLT<Eigen::MatrixXcd> llt(x.w[b]);
    if (llt.info() != Eigen::Success) return kInf;
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal().real();
    if ((diag.array() <= 0.0).any()) return kInf;
    phi -= 2.0 * diag.array().log().sum();
  }
  return phi;
}

struct Direction {
  Eigen::VectorXd dy;
  std::vector<Eigen::MatrixXcd> dw;
  Eigen::VectorXd dvals;
  Eigen::VectorXd nu;  // equality multipliers

  void axpy(double a, const Direction& o) {
    dy += a * o.dy;
    for (std::size_t b = 0; b < dw.size(); ++b) dw[b] += a * o.dw[b];
    dvals += a * o.dvals;
    nu += a * o.nu;
  }
};

// Inverse barrier Hessian. For the quadratic cones, with F = -log(a^T J a),
// it is a a^T - (a^T J a / 2) J in closed form, which stays accurate next
// to the boundary where factoring the Hessian does not.
Eigen::MatrixXd cone_inverse_hessian(ConeKind kind, const Eigen::Ref<const Eigen::VectorXd>& a,
                                     const Eigen::MatrixXd& hess) {
  const Eigen::Index d = a.size();
  switch (kind) {
    case ConeKind::kNonnegative:
      return Eigen::MatrixXd::Constant(1, 1, a(0) * a(0));
    case ConeKind::kSecondOrder: {
      const double f = a(0) * a(0) - a.tail(d - 1).squaredNorm();
      Eigen::MatrixXd inv = a * a.transpose();
      inv(0, 0) -= 0.5 * f;
      for (Eigen::Index i = 1; i < d; ++i) inv(i, i) += 0.5 * f;
      return inv;
    }
    case ConeKind::kRotatedSecondOrder: {
      const double f = 2.0 * a(0) * a(1) - a.tail(d - 2).squaredNorm();
      Eigen::MatrixXd inv = a * a.transpose();
      inv(0, 1) -= 0.5 * f;
      inv(1, 0) -= 0.5 * f;
      for (Eigen::Index i = 2; i < d; ++i) inv(i, i) += 0.5 * f;
      return inv;
    }
    case ConeKind::kExponential:
    case ConeKind::kZero:
      break;
  }
  return hess.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
}

enum class CenterOutcome { kCentered, kEarlyStop, kDiverged, kStalled, kBudget };

struct Centering {
  const Compiled& c;
  const SolverOptions& options;
  int* steps;
  // Returns true when the iterate should be handed back immediately.
  bool (*early_stop)(const Compiled&, const Point&, const Eigen::VectorXd&) = nullptr;
  // Newton steps one run may take before it counts as stalled.
  int max_local_steps = std::numeric_limits<int>::max();

  // With choose_t set, the first step replaces t by the value that best
  // centers x and reports it there.
  CenterOutcome run(Point& x, double t, double* choose_t = nullptr) const {
    const Eigen::Index m = c.num_cone_rows;
    const Eigen::Index e = c.num_eq();
    const Eigen::Index p = c.num_scalars;
    const Eigen::Index nk = m + e + p;

    Eigen::VectorXd vals = row_values(c, x);
    double phi = barrier(c, x, vals);
    if (!std::isfinite(phi)) return CenterOutcome::kStalled;
    // Steps since the decrement last halved; at large t the KKT solve is
    // only accurate to a floor well above newton_tol.
    double best_decrement = kInf;
    int flat_steps = 0;

    for (int local = 0;; ++local) {
      if (*steps >= options.max_iterations) return CenterOutcome::kBudget;
      if (local >= max_local_steps) return CenterOutcome::kStalled;
      ++*steps;

      // Cone gradients and inverse Hessians.
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
      Eigen::MatrixXd ginv = Eigen::MatrixXd::Zero(m, m);
      std::vector<Eigen::MatrixXd> hessians(c.cones.size());
      for (std::size_t k = 0; k < c.cones.size(); ++k) {
        const Cone& cone = c.cones[k];
        Eigen::MatrixXd h(cone.dim, cone.dim);
        cone_derivatives(cone.kind, vals.segment(cone.first, cone.dim),
                         grad.segment(cone.first, cone.dim), h);
        if (cone.touches_blocks) {
          ginv.block(cone.first, cone.first, cone.dim, cone.dim) =
              cone_inverse_hessian(cone.kind, vals.segment(cone.first, cone.dim), h);
        }
        hessians[k] = std::move(h);
      }

      // Block elimination. Only the coupling q of the small-cone and
      // equality rows through the blocks enters the reduced matrix.
      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m + e, m + e);
      std::vector<Eigen::MatrixXcd> winv(c.blocks.size());
      std::vector<Eigen::MatrixXcd> neg_grad(c.blocks.size());  // W^-1 - S
      for (std::size_t b = 0; b < c.blocks.size(); ++b) {
        const auto& bf = c.blocks[b];
        const Eigen::MatrixXcd& w = x.w[b];
        Eigen::LLT<Eigen::MatrixXcd> llt(w);
        winv[b] = llt.solve(Eigen::MatrixXcd::Identity(bf.dim, bf.dim));
        Eigen::VectorXcd gw(bf.v.cols());
        for (Eigen::Index f = 0; f < bf.v.cols(); ++f) {
          gw(f) = bf.row[f] < m ? bf.weight(f) * grad(bf.row[f]) : 0.0;
        }
        neg_grad[b] = winv[b] - bf.v * gw.asDiagonal() * bf.v.adjoint();
        if (bf.v.cols() == 0) continue;
        const Eigen::MatrixXcd u = bf.v.adjoint() * w * bf.v;
        for (Eigen::Index f = 0; f < bf.v.cols(); ++f) {
          for (Eigen::Index g = 0; g < bf.v.cols(); ++g) {
            q(bf.row[f], bf.row[g]) += bf.weight(f) * bf.weight(g) * std::norm(u(f, g));
          }
        }
      }

      Eigen::VectorXd ry = t * c.objective;
      for (Eigen::Index r = 0; r < m; ++r) {
        for (const auto& [i, a] : c.rows[r].scalars) ry(i) -= a * grad(r);
      }
      const Eigen::VectorXd req = -vals.tail(e);

      // Cones touching a block are eliminated through their inverse Hessian;
      // the others add A^T G A to the scalar block directly. Rows of the
      // latter keep a unit diagonal so indices stay aligned.
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nk, nk);
      kkt.topLeftCorner(m + e, m + e) = -q;
      for (std::size_t k = 0; k < c.cones.size(); ++k) {
        const Cone& cone = c.cones[k];
        if (cone.touches_blocks) {
          kkt.block(cone.first, cone.first, cone.dim, cone.dim) -=
              ginv.block(cone.first, cone.first, cone.dim, cone.dim);
          continue;
        }
        kkt.block(cone.first, cone.first, cone.dim, cone.dim) =
            -Eigen::MatrixXd::Identity(cone.dim, cone.dim);
        Eigen::MatrixXd ay = Eigen::MatrixXd::Zero(cone.dim, p);
        for (Eigen::Index i = 0; i < cone.dim; ++i) {
          for (const auto& [j, a] : c.rows[cone.first + i].scalars) ay(i, j) += a;
        }
        kkt.bottomRightCorner(p, p) += ay.transpose() * hessians[k] * ay;
      }
      for (Eigen::Index r = 0; r < m + e; ++r) {
        if (r < m && !c.row_eliminated[r]) continue;
        for (const auto& [i, a] : c.rows[r].scalars) {
          kkt(r, m + e + i) += a;
          kkt(m + e + i, r) += a;
        }
      }

      // Symmetric equilibration.
      Eigen::VectorXd scale(nk);
      for (Eigen::Index i = 0; i < nk; ++i) {
        const double mx = kkt.row(i).cwiseAbs().maxCoeff();
        scale(i) = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
      }
      const Eigen::MatrixXd scaled = scale.asDiagonal() * kkt * scale.asDiagonal();
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);

      // Solves H d + A^T mult = (rw, ry), A_eq d = req, with the cone part of
      // mult equal to G A d, through the reduced system.
      const auto reduced = [&](const std::vector<Eigen::MatrixXcd>& rw, const Eigen::VectorXd& r_y,
                               const Eigen::VectorXd& r_eq) {
        std::vector<Eigen::MatrixXcd> xr(c.blocks.size());
        Eigen::VectorXd s0 = Eigen::VectorXd::Zero(m + e);
        for (std::size_t b = 0; b < c.blocks.size(); ++b) {
          const auto& bf = c.blocks[b];
          xr[b] = x.w[b] * rw[b] * x.w[b];
          const Eigen::MatrixXcd xv = xr[b] * bf.v;
          for (Eigen::Index f = 0; f < bf.v.cols(); ++f) {
            s0(bf.row[f]) += bf.weight(f) * bf.v.col(f).dot(xv.col(f)).real();
          }
        }
        Eigen::VectorXd rhs(nk);
        rhs.head(m) = -s0.head(m);
        rhs.segment(m, e) = r_eq - s0.tail(e);
        rhs.tail(p) = r_y;
        const Eigen::VectorXd sr = scale.cwiseProduct(rhs);
        Eigen::VectorXd z = lu.solve(sr);
        if (!z.allFinite() || (scaled * z - sr).norm() > 1e-8 * std::max(1.0, sr.norm())) {
          z = scaled.fullPivLu().solve(sr);
        }
        z = scale.cwiseProduct(z);

        Direction d;
        d.nu = z.segment(m, e);
        d.dy = z.tail(p);
        d.dw.resize(c.blocks.size());
        for (std::size_t b = 0; b < c.blocks.size(); ++b) {
          const auto& bf = c.blocks[b];
          Eigen::VectorXcd cw(bf.v.cols());
          for (Eigen::Index f = 0; f < bf.v.cols(); ++f) cw(f) = bf.weight(f) * z(bf.row[f]);
          const Eigen::MatrixXcd mb = bf.v * cw.asDiagonal() * bf.v.adjoint();
          const Eigen::MatrixXcd w = xr[b] - x.w[b] * mb * x.w[b];
          d.dw[b] = 0.5 * (w + w.adjoint());
        }
        d.dvals = row_directions(c, d.dy, d.dw);
        return d;
      };
      // Hessian inner product of two directions.
      const auto hess_dot = [&](const Direction& a, const Direction& b) {
        double v = 0.0;
        for (std::size_t k = 0; k < c.blocks.size(); ++k) {
          v += (winv[k] * a.dw[k] * winv[k] * b.dw[k]).trace().real();
        }
        for (std::size_t k = 0; k < c.cones.size(); ++k) {
          const Cone& cone = c.cones[k];
          v += a.dvals.segment(cone.first, cone.dim)
                   .dot(hessians[k] * b.dvals.segment(cone.first, cone.dim));
        }
        return v;
      };
      // Iterative refinement against the unreduced equations, which the
      // reduced system only meets to a precision that degrades as the blocks
      // approach low rank.
      const auto refine = [&](Direction& d) {
        double previous = kInf;
        Direction last_fix;
        for (int pass = 0;; ++pass) {
          Eigen::VectorXd mult(m + e);
          for (std::size_t k = 0; k < c.cones.size(); ++k) {
            const Cone& cone = c.cones[k];
            mult.segment(cone.first, cone.dim) = hessians[k] * d.dvals.segment(cone.first, cone.dim);
          }
          mult.tail(e) = d.nu;
          std::vector<Eigen::MatrixXcd> rw(c.blocks.size());
          double norm = 0.0;
          for (std::size_t b = 0; b < c.blocks.size(); ++b) {
            const auto& bf = c.blocks[b];
            Eigen::VectorXcd cw(bf.v.cols());
            for (Eigen::Index f = 0; f < bf.v.cols(); ++f) cw(f) = bf.weight(f) * mult(bf.row[f]);
            rw[b] = neg_grad[b] - winv[b] * d.dw[b] * winv[b] -
                    bf.v * cw.asDiagonal() * bf.v.adjoint();
            norm += (x.w[b] * rw[b] * x.w[b]).squaredNorm();
          }
          Eigen::VectorXd r_y = ry;
          for (Eigen::Index r = 0; r < m + e; ++r) {
            for (const auto& [i, a] : c.rows[r].scalars) r_y(i) -= a * mult(r);
          }
          const Eigen::VectorXd r_eq = req - d.dvals.tail(e);
          norm = std::sqrt(norm + r_y.squaredNorm() + r_eq.squaredNorm());
          if (!(norm < previous)) {
            d.axpy(-1.0, last_fix);  // the previous correction made things worse
            return;
          }
          if (pass == kRefinementPasses) return;
          previous = norm;
          last_fix = reduced(rw, r_y, r_eq);
          if (!last_fix.dy.allFinite()) return;
          d.axpy(1.0, last_fix);
        }
      };
      Direction dir;
      if (choose_t != nullptr && *steps == 1) {
        // The direction is affine in t; pick the t whose decrement is least.
        const std::vector<Eigen::MatrixXcd> zero_w = [&] {
          std::vector<Eigen::MatrixXcd> z;
          for (const auto& bf : c.blocks) z.push_back(Eigen::MatrixXcd::Zero(bf.dim, bf.dim));
          return z;
        }();
        dir = reduced(neg_grad, ry - t * c.objective, req);
        const Direction dc = reduced(zero_w, c.objective, Eigen::VectorXd::Zero(e));
        const double cc = hess_dot(dc, dc);
        const double t_in = t;
        if (cc > 0.0) t = std::clamp(-hess_dot(dir, dc) / cc, kMinStartT, kMaxStartT);
        *choose_t = t;
        ry += (t - t_in) * c.objective;
        dir.axpy(t, dc);
      } else {
        dir = reduced(neg_grad, ry, req);
      }
      if (!dir.dy.allFinite()) return CenterOutcome::kStalled;
      refine(dir);
      const Eigen::VectorXd& dy = dir.dy;
      const std::vector<Eigen::MatrixXcd>& dw = dir.dw;
      const Eigen::VectorXd& dvals = dir.dvals;

      // Newton decrement from the Hessian quadratic form; slope from the gradient.
      const double decrement = hess_dot(dir, dir);
      double slope = -ry.dot(dy);
      for (std::size_t b = 0; b < c.blocks.size(); ++b) {
        slope -= neg_grad[b].cwiseProduct(dw[b].conjugate()).sum().real();
      }
      const double eq_residual = e > 0 ? vals.tail(e).cwiseAbs().maxCoeff() : 0.0;
      const bool eq_ok = eq_residual <= options.feasibility_tol;
      if (eq_ok && 0.5 * decrement <= options.newton_tol) return CenterOutcome::kCentered;
      if (decrement < 0.5 * best_decrement) {
        best_decrement = decrement;
        flat_steps = 0;
      } else if (eq_ok && 0.5 * decrement <= kDecrementFloor && ++flat_steps >= 5) {
        return CenterOutcome::kCentered;
      }

      // Backtracking line search.
      double alpha = 1.0;
      Point trial;
      Eigen::VectorXd trial_vals;
      double trial_phi = kInf;
      while (alpha > 1e-14) {
        trial.y = x.y + alpha * dy;
        trial.w.resize(c.blocks.size());
        for (std::size_t b = 0; b < c.blocks.size(); ++b) trial.w[b] = x.w[b] + alpha * dw[b];
        trial_vals = vals + alpha * dvals;
        // Equality rows are linear, so the exact update keeps them in sync.
        trial_phi = barrier(c, trial, trial_vals);
        const double change = trial_phi - phi - t * alpha * c.objective.dot(dy);
        const bool armijo = !eq_ok || change <= 0.01 * alpha * std::min(slope, 0.0);
        if (std::isfinite(trial_phi) && armijo) break;
        alpha *= 0.5;
      }
      if (alpha <= 1e-14) {
        // Accept the centering if the decrement is merely at round-off level.
        return eq_ok && 0.5 * decrement <= 1e3 * options.newton_tol ? CenterOutcome::kCentered
                                                                    : CenterOutcome::kStalled;
      }
      x = std::move(trial);
      vals = row_values(c, x);  // refresh to avoid drift
      phi = barrier(c, x, vals);
      if (!std::isfinite(phi)) return CenterOutcome::kStalled;

      if (x.y.size() > 0 && x.y.cwiseAbs().maxCoeff() > kDivergence) return CenterOutcome::kDiverged;
      for (const auto& w : x.w) {
        if (w.diagonal().real().maxCoeff() > kDivergence) return CenterOutcome::kDiverged;
      }
      if (early_stop != nullptr && early_stop(c, x, vals)) return CenterOutcome::kEarlyStop;
    }
  }
};

// Maps program variables to compiled ones; variables that appear in no
// constraint are dropped (fixed at zero).
struct VariableMap {
  std::vector<Eigen::Index> scalar;  // -1 when dropped
  std::vector<Eigen::Index> block;
  Eigen::Index num_scalars = 0;
  std::vector<Eigen::Index> block_dims;
};

VariableMap map_variables(const ConeProgram& program) {
  VariableMap map;
  map.scalar.assign(program.num_scalars(), -1);
  map.block.assign(program.num_blocks(), -1);
  std::vector<bool> scalar_used(program.num_scalars(), false);
  std::vector<bool> block_used(program.num_blocks(), false);
  for (const auto& con : program.constraints()) {
    for (const auto& arg : con.args) {
      for (const auto& [i, a] : arg.scalar_terms()) scalar_used[i] = true;
      for (const auto& term : arg.block_terms()) block_used[term.block] = true;
    }
  }
  for (std::size_t i = 0; i < program.num_scalars(); ++i) {
    if (scalar_used[i]) map.scalar[i] = map.num_scalars++;
  }
  for (std::size_t b = 0; b < program.num_blocks(); ++b) {
    if (block_used[b]) {
      map.block[b] = static_cast<Eigen::Index>(map.block_dims.size());
      map.block_dims.push_back(program.blocks()[b].dim);
    }
  }
  return map;
}

// A positive phase_one_box appends a relaxation scalar s, shifts every cone
// argument by s * e with e interior to the cone, and boxes every variable.
Compiled compile(const ConeProgram& program, const VariableMap& map, double phase_one_box) {
  const bool phase_one = phase_one_box > 0.0;
  Compiled c;
  c.num_scalars = map.num_scalars + (phase_one ? 1 : 0);
  const Eigen::Index sigma = map.num_scalars;
  c.blocks.resize(map.block_dims.size());
  for (std::size_t b = 0; b < map.block_dims.size(); ++b) {
    c.blocks[b].dim = map.block_dims[b];
    c.barrier_degree += static_cast<double>(map.block_dims[b]);
  }

  std::vector<std::vector<std::tuple<Eigen::Index, Eigen::VectorXcd, double>>> factors(
      c.blocks.size());
  auto add_row = [&](const AffineExpr& expr, double shift) {
    Row row;
    row.constant = expr.constant();
    for (const auto& [i, a] : expr.scalar_terms()) row.scalars.emplace_back(map.scalar[i], a);
    if (phase_one && shift != 0.0) row.scalars.emplace_back(sigma, shift);
    const Eigen::Index r = static_cast<Eigen::Index>(c.rows.size());
    for (const auto& term : expr.block_terms()) {
      const Eigen::Index b = map.block[term.block];
      for (Eigen::Index f = 0; f < term.factors.cols(); ++f) {
        factors[b].emplace_back(r, term.factors.col(f), term.weights(f));
      }
    }
    c.rows.push_back(std::move(row));
  };

  for (const auto& con : program.constraints()) {
    if (con.kind == ConeKind::kZero) continue;
    Cone cone{con.kind, static_cast<Eigen::Index>(c.rows.size()),
              static_cast<Eigen::Index>(con.args.size())};
    for (std::size_t a = 0; a < con.args.size(); ++a) {
      double shift = 0.0;
      switch (con.kind) {
        case ConeKind::kNonnegative: shift = 1.0; break;
        case ConeKind::kSecondOrder: shift = a == 0 ? 1.0 : 0.0; break;
        case ConeKind::kRotatedSecondOrder: shift = a < 2 ? 1.0 : 0.0; break;
        case ConeKind::kExponential: shift = a == 0 ? -1.0 : 1.0; break;
        case ConeKind::kZero: break;
      }
      add_row(con.args[a], shift);
    }
    c.barrier_degree += con.kind == ConeKind::kNonnegative   ? 1.0
                        : con.kind == ConeKind::kSecondOrder ||
                                  con.kind == ConeKind::kRotatedSecondOrder
                            ? 2.0
                                                             : 3.0;
    c.cones.push_back(cone);
  }
  if (phase_one) {
    auto add_box_row = [&](Row row) {
      c.cones.push_back({ConeKind::kNonnegative, static_cast<Eigen::Index>(c.rows.size()), 1});
      c.rows.push_back(std::move(row));
      c.barrier_degree += 1.0;
    };
    for (Eigen::Index i = 0; i < map.num_scalars; ++i) {
      add_box_row({phase_one_box, {{i, -1.0}}});
      add_box_row({phase_one_box, {{i, 1.0}}});
    }
    for (std::size_t b = 0; b < c.blocks.size(); ++b) {
      const auto r = static_cast<Eigen::Index>(c.rows.size());
      for (Eigen::Index q = 0; q < c.blocks[b].dim; ++q) {
        factors[b].emplace_back(r, Eigen::VectorXcd::Unit(c.blocks[b].dim, q), -1.0);
      }
      add_box_row({phase_one_box, {}});
    }
  }
  c.num_cone_rows = static_cast<Eigen::Index>(c.rows.size());
  for (const auto& con : program.constraints()) {
    if (con.kind == ConeKind::kZero) add_row(con.args[0], 0.0);
  }

  std::vector<bool> row_has_block(c.rows.size(), false);
  for (const auto& fs : factors) {
    for (const auto& f : fs) row_has_block[std::get<0>(f)] = true;
  }
  c.row_eliminated.assign(c.num_cone_rows, false);
  for (auto& cone : c.cones) {
    for (Eigen::Index r = cone.first; r < cone.first + cone.dim; ++r) {
      if (row_has_block[r]) cone.touches_blocks = true;
    }
    for (Eigen::Index r = cone.first; r < cone.first + cone.dim; ++r) {
      c.row_eliminated[r] = cone.touches_blocks;
    }
  }

  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    auto& bf = c.blocks[b];
    const auto n_f = static_cast<Eigen::Index>(factors[b].size());
    bf.v.resize(bf.dim, n_f);
    bf.weight.resize(n_f);
    bf.row.resize(n_f);
    for (Eigen::Index f = 0; f < n_f; ++f) {
      const auto& [r, v, w] = factors[b][f];
      bf.row[f] = r;
      bf.v.col(f) = v;
      bf.weight(f) = w;
    }
  }

  c.objective = Eigen::VectorXd::Zero(c.num_scalars);
  if (phase_one) {
    c.objective(sigma) = -1.0;
  } else {
    for (const auto& [i, a] : program.objective().scalar_terms()) {
      if (map.scalar[i] >= 0) c.objective(map.scalar[i]) += a;
    }
  }
  return c;
}

bool interior(const Compiled& c, const Eigen::VectorXd& vals) {
  for (const auto& cone : c.cones) {
    if (!std::isfinite(cone_barrier(cone.kind, vals.segment(cone.first, cone.dim)))) return false;
  }
  return true;
}

bool relaxation_negative(const Compiled& c, const Point& x, const Eigen::VectorXd& vals) {
  const Eigen::Index e = c.num_eq();
  const double eq = e > 0 ? vals.tail(e).cwiseAbs().maxCoeff() : 0.0;
  return x.y(c.num_scalars - 1) < 0.0 && eq <= 1e-9 * std::max(1.0, vals.head(c.num_cone_rows).cwiseAbs().maxCoeff());
}

ConicSolution finish(const ConeProgram& program, const VariableMap& map, const Point& x,
                     SolveStatus status, SolverDiagnostics diag) {
  ConicSolution out;
  out.status = status;
  out.diagnostics = diag;
  out.scalars.assign(program.num_scalars(), 0.0);
  for (std::size_t i = 0; i < program.num_scalars(); ++i) {
    if (map.scalar[i] >= 0 && map.scalar[i] < x.y.size()) out.scalars[i] = x.y(map.scalar[i]);
  }
  for (std::size_t b = 0; b < program.num_blocks(); ++b) {
    const Eigen::Index n = program.blocks()[b].dim;
    if (map.block[b] >= 0 && static_cast<std::size_t>(map.block[b]) < x.w.size()) {
      out.blocks.push_back(HermitianMatrix::FromUpper(x.w[map.block[b]]));
    } else {
      out.blocks.push_back(HermitianMatrix::Zero(n));
    }
  }
  out.objective = program.objective().constant();
  for (const auto& [i, a] : program.objective().scalar_terms()) out.objective += a * out.scalars[i];
  return out;
}

enum class PhaseOneOutcome { kFound, kInfeasible, kBudget, kFailure };

// Minimizes the relaxation scalar until it turns negative. On success x holds
// a strictly feasible point of the original cones.
PhaseOneOutcome phase_one(const ConeProgram& program, const VariableMap& map,
                          const Compiled& phase2, double box, const SolverOptions& options,
                          Point& x, SolverDiagnostics& diag) {
  const Compiled phase1 = compile(program, map, box);
  const Eigen::VectorXd vals = row_values(phase2, x);
  Point z;
  z.y = Eigen::VectorXd::Zero(phase1.num_scalars);
  z.w = x.w;
  double sigma = 1.0;
  for (const auto& cone : phase2.cones) {
    const auto a = vals.segment(cone.first, cone.dim);
    switch (cone.kind) {
      case ConeKind::kNonnegative: sigma = std::max(sigma, 1.0 - a(0)); break;
      case ConeKind::kSecondOrder:
        sigma = std::max(sigma, 1.0 + a.tail(a.size() - 1).norm() - a(0));
        break;
      case ConeKind::kRotatedSecondOrder:
      case ConeKind::kExponential:
        sigma = std::max(sigma, 1.0 + a.cwiseAbs().maxCoeff());
        break;
      case ConeKind::kZero: break;
    }
  }
  const Eigen::Index s_index = phase1.num_scalars - 1;
  z.y(s_index) = sigma;
  for (int guard = 0; guard < 200 && !interior(phase1, row_values(phase1, z)); ++guard) {
    sigma *= 2.0;
    z.y(s_index) = sigma;
  }

  int steps = 0;
  const int base = diag.phase1_iterations;
  Centering centering{phase1, options, &steps, &relaxation_negative};
  double t = 1.0 / std::max(1.0, sigma);
  while (true) {
    const CenterOutcome outcome = centering.run(z, t);
    diag.phase1_iterations = base + steps;
    switch (outcome) {
      case CenterOutcome::kEarlyStop:
        x.y = z.y.head(phase2.num_scalars);
        x.w = z.w;
        return PhaseOneOutcome::kFound;
      case CenterOutcome::kBudget: return PhaseOneOutcome::kBudget;
      case CenterOutcome::kDiverged: return PhaseOneOutcome::kFailure;
      case CenterOutcome::kStalled:
        return z.y(s_index) > options.feasibility_tol ? PhaseOneOutcome::kInfeasible
                                                      : PhaseOneOutcome::kFailure;
      case CenterOutcome::kCentered: break;
    }
    const double s = z.y(s_index);
    const double gap = phase1.barrier_degree / t;
    if (s - gap > 0.0 || (gap < options.feasibility_tol && s >= 0.0)) {
      return PhaseOneOutcome::kInfeasible;
    }
    t *= options.barrier_growth;
  }
}

}  // namespace

namespace {

ConicSolution solve_from(const ConeProgram& program, const SolverOptions& options,
                         const ConicSolution& start) {
  const VariableMap map = map_variables(program);
  SolverDiagnostics diag;

  // Objective terms on unconstrained scalars make the program unbounded.
  for (const auto& [i, a] : program.objective().scalar_terms()) {
    if (map.scalar[i] < 0 && a != 0.0) {
      return finish(program, map, Point{}, SolveStatus::kUnbounded, diag);
    }
  }

  Compiled phase2 = compile(program, map, 0.0);
  diag.barrier_degree = phase2.barrier_degree;
  Point x;
  x.y = Eigen::VectorXd::Zero(phase2.num_scalars);
  for (const auto& bf : phase2.blocks) x.w.push_back(Eigen::MatrixXcd::Identity(bf.dim, bf.dim));

  if (phase2.num_rows() == 0) {
    for (auto& w : x.w) w.setZero();
    return finish(program, map, x, SolveStatus::kOptimal, diag);
  }

  if (start.scalars.size() == program.num_scalars() && start.blocks.size() == program.num_blocks()) {
    Point hint;
    hint.y = Eigen::VectorXd::Zero(phase2.num_scalars);
    for (std::size_t i = 0; i < program.num_scalars(); ++i) {
      if (map.scalar[i] >= 0) hint.y(map.scalar[i]) = start.scalars[i];
    }
    for (std::size_t b = 0; b < program.num_blocks(); ++b) {
      if (map.block[b] >= 0) hint.w.push_back(start.blocks[b].dense());
    }
    const Eigen::VectorXd hint_vals = row_values(phase2, hint);
    if (hint.y.allFinite() && std::isfinite(barrier(phase2, hint, hint_vals))) x = std::move(hint);
  }

  // Phase one inside growing boxes. A small box keeps scalars that are
  // bounded on one side only from settling far out at minus half the box.
  Eigen::VectorXd vals = row_values(phase2, x);
  const bool needs_phase_one =
      !interior(phase2, vals) ||
      (phase2.num_eq() > 0 && vals.tail(phase2.num_eq()).cwiseAbs().maxCoeff() > 0.0);
  if (needs_phase_one) {
    PhaseOneOutcome outcome = PhaseOneOutcome::kFailure;
    for (const double box : {1e2, 1e5, kPhaseOneBox}) {
      outcome = phase_one(program, map, phase2, box, options, x, diag);
      if (outcome == PhaseOneOutcome::kFound || outcome == PhaseOneOutcome::kBudget) break;
    }
    switch (outcome) {
      case PhaseOneOutcome::kFound: break;
      case PhaseOneOutcome::kInfeasible:
        return finish(program, map, x, SolveStatus::kInfeasible, diag);
      case PhaseOneOutcome::kBudget:
        return finish(program, map, x, SolveStatus::kMaxIterations, diag);
      case PhaseOneOutcome::kFailure:
        return finish(program, map, x, SolveStatus::kNumericalFailure, diag);
    }
  }

  // Phase two. A centering that stalls after the first is retried with a
  // smaller growth factor, then falls back to the last centered point when
  // its gap bound is within 1e2 * gap_tol.
  int steps = 0;
  Centering centering{phase2, options, &steps, nullptr, kMaxCenteringSteps};
  double t = 1.0;
  double growth = options.barrier_growth;
  Point centered;
  double centered_gap = kInf;
  double centered_t = 0.0;
  while (true) {
    const CenterOutcome outcome = centering.run(x, t, steps == 0 ? &t : nullptr);
    diag.iterations = steps;
    if (outcome == CenterOutcome::kDiverged) {
      return finish(program, map, x, SolveStatus::kUnbounded, diag);
    }
    if (outcome == CenterOutcome::kStalled && std::isfinite(centered_gap) &&
        std::sqrt(growth) >= kMinBarrierGrowth) {
      growth = std::sqrt(growth);
      x = centered;
      t = centered_t * growth;
      continue;
    }
    if (outcome == CenterOutcome::kBudget || outcome == CenterOutcome::kStalled) {
      if (std::isfinite(centered_gap)) {
        const double objective = phase2.objective.dot(centered.y) + program.objective().constant();
        if (centered_gap <= 1e2 * options.gap_tol * std::max(1.0, std::abs(objective))) {
          diag.gap_bound = centered_gap;
          return finish(program, map, centered, SolveStatus::kOptimal, diag);
        }
      }
      return finish(program, map, x,
                    outcome == CenterOutcome::kBudget ? SolveStatus::kMaxIterations
                                                      : SolveStatus::kNumericalFailure,
                    diag);
    }
    diag.gap_bound = phase2.barrier_degree / t;
    vals = row_values(phase2, x);
    diag.equality_residual =
        phase2.num_eq() > 0 ? vals.tail(phase2.num_eq()).cwiseAbs().maxCoeff() : 0.0;
    const double objective = phase2.objective.dot(x.y) + program.objective().constant();
    if (diag.gap_bound <= options.gap_tol * std::max(1.0, std::abs(objective))) {
      return finish(program, map, x, SolveStatus::kOptimal, diag);
    }
    centered = x;
    centered_gap = diag.gap_bound;
    centered_t = t;
    t *= growth;
  }
}

}  // namespace

ConicSolution solve(const ConeProgram& program, const SolverOptions& options) {
  return solve_from(program, options, ConicSolution{});
}

ConicSolution solve(const ConeProgram& program, const SolverOptions& options,
                    const ConicSolution& start) {
  ConicSolution out = solve_from(program, options, start);
  if (!out.optimal() && !start.scalars.empty()) {
    // A start near the boundary can stall the first centering.
    return solve_from(program, options, ConicSolution{});
  }
  return out;
}

}  // namespace qoebf::conic
