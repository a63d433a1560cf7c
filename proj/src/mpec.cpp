#include "grcv/mpec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "grcv/simplex.hpp"

namespace grcv {

MpecPoint MpecPoint::from_parts(const MpecDims& d, double C, const Vector& loss,
                                const Vector& loss_dual, const Vector& alpha,
                                const Vector& slack) {
  MpecPoint pt(d);
  pt.v[0] = C;
  pt.loss() = loss;
  pt.loss_dual() = loss_dual;
  pt.alpha() = alpha;
  pt.slack() = slack;
  return pt;
}

MpecPoint MpecPoint::default_start(const MpecDims& d) {
  MpecPoint pt(d);
  pt.v[0] = 1.0;
  return pt;
}

MpecProblem::MpecProblem(MpecDims dims, std::vector<Matrix> gram_AB, std::vector<Matrix> gram_BB)
    : dims_(dims), gram_AB_(std::move(gram_AB)), gram_BB_(std::move(gram_BB)) {
  if (static_cast<int>(gram_AB_.size()) != dims_.T ||
      static_cast<int>(gram_BB_.size()) != dims_.T)
    throw std::invalid_argument("gram block count does not match fold count");
  for (int t = 0; t < dims_.T; ++t) {
    if (gram_AB_[t].rows() != dims_.m1 || gram_AB_[t].cols() != dims_.m2 ||
        gram_BB_[t].rows() != dims_.m2 || gram_BB_[t].cols() != dims_.m2)
      throw std::invalid_argument("gram block shape mismatch");
  }
  grad_f_ = Vector::Zero(dims_.nv());
  grad_f_.segment(1, dims_.qu()).setConstant(1.0 / static_cast<double>(dims_.qu()));
}

MpecProblem assemble_mpec(const FoldMatrices& fm) {
  MpecDims dims{fm.T, fm.m1, fm.m2, fm.n};
  std::vector<Matrix> gab(fm.T), gbb(fm.T);
  for (int t = 0; t < fm.T; ++t) {
    gab[t].noalias() = fm.A[t] * fm.B[t].transpose();
    gbb[t].noalias() = fm.B[t] * fm.B[t].transpose();
  }
  return MpecProblem(dims, std::move(gab), std::move(gbb));
}

Index MpecProblem::part_offset(int part) const {
  switch (part) {
    case 0: return 0;
    case 1: return dims_.qu();
    case 2: return 2 * dims_.qu();
    case 3: return 2 * dims_.qu() + dims_.ql();
    default: throw std::out_of_range("part");
  }
}

double MpecProblem::eval_F(const Vector& v) const { return grad_f_.dot(v); }

Vector MpecProblem::eval_G(const Vector& v) const {
  Vector g(dims_.mbar());
  const double C = v[0];
  for (int t = 0; t < dims_.T; ++t) {
    auto loss = v.segment(1 + t * dims_.m1, dims_.m1);
    auto loss_dual = v.segment(1 + dims_.qu() + t * dims_.m1, dims_.m1);
    auto alpha = v.segment(1 + 2 * dims_.qu() + t * dims_.m2, dims_.m2);
    auto slack = v.segment(1 + 2 * dims_.qu() + dims_.ql() + t * dims_.m2, dims_.m2);

    g.segment(part_offset(0) + t * dims_.m1, dims_.m1).noalias() = gram_AB_[t] * alpha;
    g.segment(part_offset(0) + t * dims_.m1, dims_.m1) += loss_dual;
    g.segment(part_offset(1) + t * dims_.m1, dims_.m1) = Vector::Ones(dims_.m1) - loss;
    g.segment(part_offset(2) + t * dims_.m2, dims_.m2).noalias() = gram_BB_[t] * alpha;
    g.segment(part_offset(2) + t * dims_.m2, dims_.m2) += slack - Vector::Ones(dims_.m2);
    g.segment(part_offset(3) + t * dims_.m2, dims_.m2) = Vector::Constant(dims_.m2, C) - alpha;
  }
  return g;
}

Vector MpecProblem::apply_P(const Vector& x) const {
  Vector y(dims_.mbar());
  const double xc = x[0];
  for (int t = 0; t < dims_.T; ++t) {
    auto loss = x.segment(1 + t * dims_.m1, dims_.m1);
    auto loss_dual = x.segment(1 + dims_.qu() + t * dims_.m1, dims_.m1);
    auto alpha = x.segment(1 + 2 * dims_.qu() + t * dims_.m2, dims_.m2);
    auto slack = x.segment(1 + 2 * dims_.qu() + dims_.ql() + t * dims_.m2, dims_.m2);

    y.segment(part_offset(0) + t * dims_.m1, dims_.m1).noalias() = gram_AB_[t] * alpha;
    y.segment(part_offset(0) + t * dims_.m1, dims_.m1) += loss_dual;
    y.segment(part_offset(1) + t * dims_.m1, dims_.m1) = -loss;
    y.segment(part_offset(2) + t * dims_.m2, dims_.m2).noalias() = gram_BB_[t] * alpha;
    y.segment(part_offset(2) + t * dims_.m2, dims_.m2) += slack;
    y.segment(part_offset(3) + t * dims_.m2, dims_.m2) = Vector::Constant(dims_.m2, xc) - alpha;
  }
  return y;
}

Vector MpecProblem::apply_PT(const Vector& y) const {
  Vector x = Vector::Zero(dims_.nv());
  for (int t = 0; t < dims_.T; ++t) {
    auto y1 = y.segment(part_offset(0) + t * dims_.m1, dims_.m1);
    auto y2 = y.segment(part_offset(1) + t * dims_.m1, dims_.m1);
    auto y3 = y.segment(part_offset(2) + t * dims_.m2, dims_.m2);
    auto y4 = y.segment(part_offset(3) + t * dims_.m2, dims_.m2);

    x[0] += y4.sum();
    x.segment(1 + t * dims_.m1, dims_.m1) = -y2;
    x.segment(1 + dims_.qu() + t * dims_.m1, dims_.m1) = y1;
    auto xa = x.segment(1 + 2 * dims_.qu() + t * dims_.m2, dims_.m2);
    xa.noalias() = gram_AB_[t].transpose() * y1;
    xa.noalias() += gram_BB_[t] * y3;
    xa -= y4;
    x.segment(1 + 2 * dims_.qu() + dims_.ql() + t * dims_.m2, dims_.m2) = y3;
  }
  return x;
}

Vector MpecProblem::p_row(Index row) const {
  Vector r = Vector::Zero(dims_.nv());
  if (row < part_offset(1)) {
    const int t = static_cast<int>(row / dims_.m1);
    const Index i = row % dims_.m1;
    r[1 + dims_.qu() + t * dims_.m1 + i] = 1.0;  // loss_dual
    r.segment(1 + 2 * dims_.qu() + t * dims_.m2, dims_.m2) = gram_AB_[t].row(i).transpose();
  } else if (row < part_offset(2)) {
    const Index local = row - part_offset(1);
    r[1 + local] = -1.0;  // loss
  } else if (row < part_offset(3)) {
    const Index local = row - part_offset(2);
    const int t = static_cast<int>(local / dims_.m2);
    const Index i = local % dims_.m2;
    r.segment(1 + 2 * dims_.qu() + t * dims_.m2, dims_.m2) = gram_BB_[t].row(i).transpose();
    r[1 + 2 * dims_.qu() + dims_.ql() + t * dims_.m2 + i] = 1.0;  // slack
  } else {
    const Index local = row - part_offset(3);
    r[0] = 1.0;
    r[1 + 2 * dims_.qu() + local] = -1.0;  // alpha
  }
  return r;
}

double MpecProblem::vio(const Vector& v) const {
  Vector g = eval_G(v);
  Vector h = eval_H(v);
  return g.cwiseMin(h).cwiseAbs().maxCoeff();
}

std::pair<double, double> MpecProblem::vio_components(const Vector& v) const {
  Vector g = eval_G(v);
  Vector h = eval_H(v);
  double infeas = std::max(0.0, std::max(-g.minCoeff(), -h.minCoeff()));
  double comp = std::max(0.0, g.cwiseMin(h).maxCoeff());
  return {infeas, comp};
}

Vector zero_one_loss_lp(const Eigen::Ref<const Vector>& r) {
  Vector loss(r.size());
  for (Index i = 0; i < r.size(); ++i) loss[i] = r[i] > 0.0 ? 1.0 : 0.0;
  return loss;
}

MpecPoint feasible_point_from_duals(const MpecProblem& p, double C,
                                    const std::vector<Vector>& fold_alpha) {
  const MpecDims& d = p.dims();
  if (static_cast<int>(fold_alpha.size()) != d.T)
    throw std::invalid_argument("need one alpha vector per fold");
  MpecPoint pt(d);
  pt.hyper_c() = C;
  for (int t = 0; t < d.T; ++t) {
    const Vector& a = fold_alpha[static_cast<std::size_t>(t)];
    if (a.size() != d.m2) throw std::invalid_argument("alpha size mismatch");
    pt.v.segment(1 + 2 * d.qu() + t * d.m2, d.m2) = a;

    // Same Gram arithmetic as eval_G so the complementary residuals vanish.
    Vector u = p.gram_AB(t) * a;           // validation margins y_i w'x_i
    Vector bb = p.gram_BB(t) * a;
    pt.v.segment(1 + t * d.m1, d.m1) = zero_one_loss_lp(-u);
    pt.v.segment(1 + d.qu() + t * d.m1, d.m1) = (-u).cwiseMax(0.0);
    pt.v.segment(1 + 2 * d.qu() + d.ql() + t * d.m2, d.m2) =
        (Vector::Ones(d.m2) - bb).cwiseMax(0.0);
  }
  return pt;
}

IndexList ValidationPartition::on_hyperplane() const {
  IndexList out = on_hyperplane_zero;
  out.insert(out.end(), on_hyperplane_frac.begin(), on_hyperplane_frac.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Sign patterns of (loss, lp_residual, dual) for validation points.
int exact_validation_pattern(double zeta, double g1, double z, double eps) {
  auto zq = [eps](double u) { return std::abs(u) <= eps; };
  auto pq = [eps](double u) { return u > eps; };
  if (zq(zeta) && zq(g1) && zq(z)) return 0;                          // on hyperplane, loss 0
  if (zq(zeta) && pq(g1) && zq(z)) return 2;                          // correct
  if (pq(zeta) && zeta < 1.0 - eps && zq(g1) && zq(z)) return 1;      // on hyperplane, frac
  if (zq(zeta - 1.0) && zq(g1) && pq(z)) return 3;                    // misclassified
  return -1;
}

double validation_pattern_distance(int pattern, double zeta, double g1, double z) {
  auto zero = [](double u) { return std::abs(u); };
  auto pos = [](double u) { return std::max(0.0, -u); };
  switch (pattern) {
    case 0: return std::max({zero(zeta), zero(g1), zero(z)});
    case 1: return std::max({pos(zeta), pos(1.0 - zeta), zero(g1), zero(z)});
    case 2: return std::max({zero(zeta), pos(g1), zero(z)});
    case 3: return std::max({zero(zeta - 1.0), zero(g1), pos(z)});
    default: return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

ValidationPartition classify_validation_points(const MpecProblem& p, const MpecPoint& pt,
                                               double eps) {
  const MpecDims& d = p.dims();
  Vector g = p.eval_G(pt.v);
  ValidationPartition part;
  part.eps = eps;
  IndexList* buckets[4] = {&part.on_hyperplane_zero, &part.on_hyperplane_frac, &part.correct,
                           &part.misclassified};
  auto zeta = pt.loss();
  auto z = pt.loss_dual();
  for (Index i = 0; i < d.qu(); ++i) {
    const double g1 = g[p.part_offset(0) + i];
    int best = exact_validation_pattern(zeta[i], g1, z[i], eps);
    if (best < 0) {
      part.ambiguous.push_back(i);
      double best_d = std::numeric_limits<double>::infinity();
      for (int q = 0; q < 4; ++q) {
        double dd = validation_pattern_distance(q, zeta[i], g1, z[i]);
        if (dd < best_d) {
          best_d = dd;
          best = q;
        }
      }
    }
    buckets[best]->push_back(i);
  }
  return part;
}

TrainingPartition classify_training_points(const MpecProblem& p, const MpecPoint& pt,
                                           double eps) {
  const MpecDims& d = p.dims();
  Vector g = p.eval_G(pt.v);
  Vector comp = g.segment(p.part_offset(2), d.ql());
  return classify_training_pattern(pt.alpha(), comp, pt.slack(), pt.hyper_c(), eps);
}

namespace {

IndexList sorted_union(std::initializer_list<const IndexList*> lists) {
  IndexList out;
  for (const IndexList* l : lists) out.insert(out.end(), l->begin(), l->end());
  std::sort(out.begin(), out.end());
  return out;
}

IndexList sorted_copy(IndexList l) {
  std::sort(l.begin(), l.end());
  return l;
}

void check_identity(std::vector<std::string>& failures, const char* name, const IndexList& lhs,
                    const IndexList& rhs) {
  if (sorted_copy(lhs) != sorted_copy(rhs)) failures.emplace_back(name);
}

}  // namespace

ActiveSets active_sets(const MpecProblem& p, const MpecPoint& pt, double eps) {
  const MpecDims& d = p.dims();
  Vector g = p.eval_G(pt.v);
  Vector h = p.eval_H(pt.v);

  ActiveSets sets;
  sets.eps = eps;
  for (int part = 0; part < 4; ++part) {
    const Index off = p.part_offset(part);
    const Index count = (part < 2 ? d.qu() : d.ql());
    for (Index i = 0; i < count; ++i) {
      const double gi = g[off + i];
      const double hi = h[off + i];
      const bool g0 = std::abs(gi) <= eps;
      const bool h0 = std::abs(hi) <= eps;
      if (g0 && h0)
        sets.biactive[part].push_back(i);
      else if (h0)
        sets.h_active[part].push_back(i);
      else if (g0)
        sets.g_active[part].push_back(i);
      else {
        sets.unclassified.push_back(off + i);
        if (std::abs(hi) <= std::abs(gi))
          sets.h_active[part].push_back(i);
        else
          sets.g_active[part].push_back(i);
      }
    }
  }

  // Cross-check against the geometric partitions of the same point.
  ValidationPartition vp = classify_validation_points(p, pt, eps);
  TrainingPartition tp = classify_training_points(p, pt, eps);
  auto& f = sets.cross_check_failures;
  check_identity(f, "part1 h_active == validation correct", sets.h_active[0], vp.correct);
  check_identity(f, "part1 g_active == on_hyperplane_frac + misclassified", sets.g_active[0],
                 sorted_union({&vp.on_hyperplane_frac, &vp.misclassified}));
  check_identity(f, "part1 biactive == on_hyperplane_zero", sets.biactive[0],
                 vp.on_hyperplane_zero);
  check_identity(f, "part2 h_active == on_hyperplane + correct", sets.h_active[1],
                 sorted_union({&vp.on_hyperplane_zero, &vp.on_hyperplane_frac, &vp.correct}));
  check_identity(f, "part2 g_active == misclassified", sets.g_active[1], vp.misclassified);
  check_identity(f, "part2 biactive == empty", sets.biactive[1], {});
  check_identity(f, "part3 h_active == outside_margin", sets.h_active[2], tp.outside_margin);
  check_identity(f, "part3 g_active == margin svs + bound svs", sets.g_active[2],
                 sorted_union({&tp.on_margin_sv_interior, &tp.on_margin_sv_bound,
                               &tp.inside_margin, &tp.on_hyperplane, &tp.misclassified}));
  check_identity(f, "part3 biactive == on_margin_free", sets.biactive[2], tp.on_margin_free);
  check_identity(f, "part4 h_active == margin-inactive + interior svs", sets.h_active[3],
                 sorted_union({&tp.on_margin_free, &tp.outside_margin,
                               &tp.on_margin_sv_interior}));
  check_identity(f, "part4 g_active == bound svs", sets.g_active[3],
                 sorted_union({&tp.inside_margin, &tp.on_hyperplane, &tp.misclassified}));
  check_identity(f, "part4 biactive == margin svs at bound", sets.biactive[3],
                 tp.on_margin_sv_bound);
  return sets;
}

MfcqResult mfcq_diagnostic(const MpecProblem& p, const MpecPoint& pt, double eps) {
  ActiveSets sets = active_sets(p, pt, eps);
  MfcqResult res;
  for (int part = 0; part < 4; ++part) {
    const Index off = p.part_offset(part);
    for (Index i : sets.g_active[part]) {
      res.rows.push_back(off + i);
      res.is_h_side.push_back(false);
    }
    for (Index i : sets.biactive[part]) {
      res.rows.push_back(off + i);
      res.is_h_side.push_back(false);
      res.rows.push_back(off + i);
      res.is_h_side.push_back(true);
    }
    for (Index i : sets.h_active[part]) {
      res.rows.push_back(off + i);
      res.is_h_side.push_back(true);
    }
  }

  const Index r = static_cast<Index>(res.rows.size());
  // Columns of A are the active gradients; a convex combination summing to
  // zero exists iff they are positive-linearly dependent.
  Matrix A = Matrix::Zero(p.dims().nv() + 1, r);
  for (Index k = 0; k < r; ++k) {
    if (res.is_h_side[static_cast<std::size_t>(k)])
      A(1 + res.rows[static_cast<std::size_t>(k)], k) = 1.0;  // grad H = e_{1+row}
    else
      A.col(k).head(p.dims().nv()) = p.p_row(res.rows[static_cast<std::size_t>(k)]);
  }
  A.row(p.dims().nv()).setOnes();
  Vector b = Vector::Zero(p.dims().nv() + 1);
  b[p.dims().nv()] = 1.0;

  auto cert = feasible_nonneg_point(A, b);
  if (cert) {
    res.independent = false;
    res.certificate = *cert;
  } else {
    res.independent = true;
  }
  return res;
}

CStationarity c_stationarity_residual(const MpecProblem& p, const MpecPoint& pt, double eps) {
  ActiveSets sets = active_sets(p, pt, eps);
  const Index mbar = p.dims().mbar();
  const Index nv = p.dims().nv();

  std::vector<Index> g_rows, h_rows;
  for (int part = 0; part < 4; ++part) {
    const Index off = p.part_offset(part);
    for (Index i : sets.g_active[part]) g_rows.push_back(off + i);
    for (Index i : sets.biactive[part]) {
      g_rows.push_back(off + i);
      h_rows.push_back(off + i);
    }
    for (Index i : sets.h_active[part]) h_rows.push_back(off + i);
  }

  const Index cols = static_cast<Index>(g_rows.size() + h_rows.size());
  Matrix A = Matrix::Zero(nv, cols);
  for (std::size_t k = 0; k < g_rows.size(); ++k) A.col(static_cast<Index>(k)) = p.p_row(g_rows[k]);
  for (std::size_t k = 0; k < h_rows.size(); ++k)
    A(1 + h_rows[k], static_cast<Index>(g_rows.size() + k)) = 1.0;

  Vector x = A.colPivHouseholderQr().solve(p.grad_F());

  CStationarity out;
  out.gamma = Vector::Zero(mbar);
  out.nu = Vector::Zero(mbar);
  for (std::size_t k = 0; k < g_rows.size(); ++k) out.gamma[g_rows[k]] = x[static_cast<Index>(k)];
  for (std::size_t k = 0; k < h_rows.size(); ++k)
    out.nu[h_rows[k]] = x[static_cast<Index>(g_rows.size() + k)];

  out.stationarity = (p.grad_F() - A * x).cwiseAbs().maxCoeff();
  for (int part = 0; part < 4; ++part) {
    const Index off = p.part_offset(part);
    for (Index i : sets.biactive[part])
      out.pairing_violation += std::max(0.0, -out.gamma[off + i] * out.nu[off + i]);
  }
  out.residual = out.stationarity + out.pairing_violation;
  return out;
}

std::string diagnostics_json(const MpecProblem& p, const MpecPoint& pt, double eps) {
  nlohmann::json j;
  auto [infeas, comp] = p.vio_components(pt.v);
  j["vio"] = p.vio(pt.v);
  j["vio_infeasibility"] = infeas;
  j["vio_complementarity"] = comp;
  j["objective"] = p.eval_F(pt.v);

  ActiveSets sets = active_sets(p, pt, eps);
  for (int part = 0; part < 4; ++part) {
    j["active_sets"][part] = {{"h_active", sets.h_active[part].size()},
                              {"g_active", sets.g_active[part].size()},
                              {"biactive", sets.biactive[part].size()}};
  }
  j["cross_check_failures"] = sets.cross_check_failures;
  j["unclassified"] = sets.unclassified.size();

  CStationarity cs = c_stationarity_residual(p, pt, eps);
  j["c_stationarity_residual"] = cs.residual;
  j["stationarity"] = cs.stationarity;
  j["pairing_violation"] = cs.pairing_violation;

  MfcqResult mf = mfcq_diagnostic(p, pt, eps);
  j["mfcq"] = mf.independent ? "independent" : "dependent";
  return j.dump(2);
}

}  // namespace grcv
