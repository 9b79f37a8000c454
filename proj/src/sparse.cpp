#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "femdd/discretization.hpp"
#include "femdd/error.hpp"

namespace femdd {

std::shared_ptr<const SparsePattern> SparsePattern::from_edges(std::size_t n,
                                                               std::span<const std::array<Index, 2>> edges) {
  std::vector<std::vector<Index>> adj(n);
  for (std::size_t i = 0; i < n; ++i) adj[i].push_back(static_cast<Index>(i));
  for (const auto& e : edges) {
    if (e[0] < 0 || e[1] < 0 || static_cast<std::size_t>(e[0]) >= n || static_cast<std::size_t>(e[1]) >= n)
      throw InvalidArgument("edge endpoint outside the pattern");
    if (e[0] == e[1]) continue;
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  auto p = std::make_shared<SparsePattern>();
  p->row_ptr_.reserve(n + 1);
  p->row_ptr_.push_back(0);
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    p->cols_.insert(p->cols_.end(), row.begin(), row.end());
    p->row_ptr_.push_back(static_cast<Index>(p->cols_.size()));
  }
  return p;
}

Index SparsePattern::find(Index row, Index col) const {
  auto b = cols_.begin() + row_ptr_[row], e = cols_.begin() + row_ptr_[row + 1];
  auto it = std::lower_bound(b, e, col);
  if (it == e || *it != col)
    throw InvalidArgument("entry (" + std::to_string(row) + ", " + std::to_string(col) + ") not in sparsity pattern");
  return static_cast<Index>(it - cols_.begin());
}

// ---------------------------------------------------------------------------

SparseSystem::SparseSystem(std::shared_ptr<const SparsePattern> p)
    : pattern(std::move(p)),
      values(pattern->nonzeros(), 0.0),
      rhs(pattern->rows(), 0.0),
      dirichlet(pattern->rows(), 0),
      dirichlet_value(pattern->rows(), 0.0) {}

double SparseSystem::at(Index row, Index col) const {
  const auto& rp = pattern->row_ptr();
  const auto& c = pattern->cols();
  auto b = c.begin() + rp[row], e = c.begin() + rp[row + 1];
  auto it = std::lower_bound(b, e, col);
  if (it == e || *it != col) return 0.0;
  return values[it - c.begin()];
}

void SparseSystem::set_dirichlet(Index row, double value) {
  dirichlet[row] = 1;
  dirichlet_value[row] = value;
}

void SparseSystem::apply_dirichlet() {
  const auto& rp = pattern->row_ptr();
  const auto& c = pattern->cols();
  const auto n = static_cast<Index>(size());
  for (Index i = 0; i < n; ++i) {
    if (dirichlet[i]) {
      for (Index k = rp[i]; k < rp[i + 1]; ++k) values[k] = c[k] == i ? 1.0 : 0.0;
      rhs[i] = dirichlet_value[i];
      continue;
    }
    for (Index k = rp[i]; k < rp[i + 1]; ++k) {
      if (dirichlet[c[k]]) {
        rhs[i] -= values[k] * dirichlet_value[c[k]];
        values[k] = 0.0;
      }
    }
  }
}

std::vector<double> SparseSystem::multiply(std::span<const double> x) const {
  if (x.size() != size()) throw InvalidArgument("vector size does not match the system");
  const auto& rp = pattern->row_ptr();
  const auto& c = pattern->cols();
  std::vector<double> y(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (Index k = rp[i]; k < rp[i + 1]; ++k) s += values[k] * x[c[k]];
    y[i] = s;
  }
  return y;
}

std::vector<double> SparseSystem::residual(std::span<const double> x) const {
  auto r = multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  return r;
}

// ---------------------------------------------------------------------------

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

SpMat to_eigen(const SparseSystem& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, Index>> m(
      n, n, static_cast<Eigen::Index>(s.values.size()), s.pattern->row_ptr().data(), s.pattern->cols().data(),
      s.values.data());
  SpMat a = m;
  a.makeCompressed();
  return a;
}

template <class Factor>
bool factor_solve(const SpMat& a, const Vec& b, Vec& x, int refinements, std::string& message) {
  Factor f;
  f.compute(a);
  if (f.info() != Eigen::Success) {
    message = "factorization failed (singular or zero pivot)";
    return false;
  }
  x = f.solve(b);
  if (f.info() != Eigen::Success) {
    message = "triangular solve failed";
    return false;
  }
  for (int k = 0; k < refinements; ++k) {
    Vec r = b - a * x;
    x += f.solve(r);
  }
  return true;
}

}  // namespace

LinearSolveResult solve(const SparseSystem& system, const LinearSolveOptions& options) {
  LinearSolveResult out;
  auto& rep = out.report;
  const auto n = static_cast<Eigen::Index>(system.size());
  Eigen::Map<const Vec> b(system.rhs.data(), n);
  const double bnorm = b.norm();
  if (!std::isfinite(bnorm)) {
    rep.message = "non-finite right-hand side";
    rep.residual_norm = bnorm;
    return out;
  }
  if (bnorm == 0.0) {
    out.x.assign(system.size(), 0.0);
    rep.converged = true;
    rep.method = "trivial";
    return out;
  }

  const SpMat a = to_eigen(system);
  Vec x = Vec::Zero(n);
  bool ok = false;
  const bool use_direct = options.method == LinearMethod::direct ||
                          (options.method == LinearMethod::automatic && !system.symmetric);

  if (!use_direct) {
    if (system.symmetric) {
      Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
      cg.setTolerance(options.tol);
      cg.setMaxIterations(options.max_iter);
      cg.compute(a);
      if (cg.info() == Eigen::Success) {
        x = cg.solve(b);
        rep.iterations = static_cast<int>(cg.iterations());
        ok = cg.info() == Eigen::Success;
      }
      rep.method = "cg+ic";
    } else {
      Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> bicg;
      bicg.setTolerance(options.tol);
      bicg.setMaxIterations(options.max_iter);
      bicg.compute(a);
      if (bicg.info() == Eigen::Success) {
        x = bicg.solve(b);
        rep.iterations = static_cast<int>(bicg.iterations());
        ok = bicg.info() == Eigen::Success;
      }
      rep.method = "bicgstab+ilut";
    }
    if (!ok) rep.message = "Krylov iteration did not reach the tolerance";
  }

  const bool fallback = !use_direct && !ok && options.method == LinearMethod::automatic;
  if (use_direct || fallback) {
    std::string msg;
    if (system.symmetric) {
      ok = factor_solve<Eigen::SimplicialLDLT<SpMat>>(a, b, x, 1, msg);
      rep.method = fallback ? rep.method + "->ldlt" : "ldlt";
    } else {
      ok = factor_solve<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>(a, b, x, 0, msg);
      rep.method = fallback ? rep.method + "->lu" : "lu";
    }
    rep.iterations += 1;
    if (!ok) rep.message = msg;
  }

  const Vec r = a * x - b;
  rep.residual_norm = r.norm();
  rep.converged = ok && x.allFinite() && rep.residual_norm <= options.tol * bnorm;
  if (ok && !rep.converged && rep.message.empty()) rep.message = "residual above tolerance";
  out.x.assign(x.data(), x.data() + n);
  return out;
}

}  // namespace femdd
