#include "grcv/condensed.hpp"

namespace grcv {

ConstraintEval eval_relaxed_constraints(const MpecProblem& p, double t, const Vector& v) {
  ConstraintEval ce;
  ce.G = p.eval_G(v);
  ce.H = p.eval_H(v);
  const Index mbar = ce.G.size();
  ce.g.resize(3 * mbar);
  ce.g.head(mbar) = ce.G;
  ce.g.segment(mbar, mbar) = ce.H;
  ce.g.tail(mbar) = Vector::Constant(mbar, t) - ce.G.cwiseProduct(ce.H);
  return ce;
}

Vector relaxed_jacobian_apply(const MpecProblem& p, const ConstraintEval& ce, const Vector& x) {
  const Index mbar = ce.G.size();
  Vector px = p.apply_P(x);
  Vector qx = x.tail(mbar);
  Vector out(3 * mbar);
  out.head(mbar) = px;
  out.segment(mbar, mbar) = qx;
  out.tail(mbar) = -(ce.H.cwiseProduct(px) + ce.G.cwiseProduct(qx));
  return out;
}

Vector relaxed_jacobian_apply_T(const MpecProblem& p, const ConstraintEval& ce, const Vector& y) {
  const Index mbar = ce.G.size();
  Vector y1 = y.head(mbar) - ce.H.cwiseProduct(y.tail(mbar));
  Vector y2 = y.segment(mbar, mbar) - ce.G.cwiseProduct(y.tail(mbar));
  Vector out = p.apply_PT(y1);
  out.tail(mbar) += y2;
  return out;
}

CondensedKkt::CondensedKkt(const MpecProblem& p) : p_(p) {
  const MpecDims& d = p.dims();
  folds_.resize(static_cast<std::size_t>(d.T));
  const Index q = 2 * d.m1 + 2 * d.m2;
  for (auto& f : folds_) {
    f.K.resize(q, q);
    f.c_col.resize(q);
  }
}

bool CondensedKkt::factor(const ConstraintEval& ce, const Vector& sigma,
                          const Vector& cap_lambda, double reg, const Vector& extra_diag) {
  const MpecDims& d = p_.dims();
  const Index mbar = d.mbar();
  const bool boxed = extra_diag.size() == d.nv();
  Vector e1 = sigma.head(mbar) + ce.H.cwiseAbs2().cwiseProduct(sigma.tail(mbar));
  Vector e2 = sigma.segment(mbar, mbar) + ce.G.cwiseAbs2().cwiseProduct(sigma.tail(mbar));
  Vector e3 = cap_lambda + ce.G.cwiseProduct(ce.H).cwiseProduct(sigma.tail(mbar));

  kcc_ = reg + (boxed ? extra_diag[0] : 0.0);
  for (int t = 0; t < d.T; ++t) {
    auto e1p1 = e1.segment(p_.part_offset(0) + t * d.m1, d.m1);
    auto e1p2 = e1.segment(p_.part_offset(1) + t * d.m1, d.m1);
    auto e1p3 = e1.segment(p_.part_offset(2) + t * d.m2, d.m2);
    auto e1p4 = e1.segment(p_.part_offset(3) + t * d.m2, d.m2);
    auto e2p1 = e2.segment(p_.part_offset(0) + t * d.m1, d.m1);
    auto e2p2 = e2.segment(p_.part_offset(1) + t * d.m1, d.m1);
    auto e2p3 = e2.segment(p_.part_offset(2) + t * d.m2, d.m2);
    auto e2p4 = e2.segment(p_.part_offset(3) + t * d.m2, d.m2);
    auto e3p1 = e3.segment(p_.part_offset(0) + t * d.m1, d.m1);
    auto e3p2 = e3.segment(p_.part_offset(1) + t * d.m1, d.m1);
    auto e3p3 = e3.segment(p_.part_offset(2) + t * d.m2, d.m2);
    auto e3p4 = e3.segment(p_.part_offset(3) + t * d.m2, d.m2);

    const Matrix& gab = p_.gram_AB(t);
    const Matrix& gbb = p_.gram_BB(t);
    FoldSystem& f = folds_[static_cast<std::size_t>(t)];
    const Index m1 = d.m1, m2 = d.m2;
    const Index oz = m1, oa = 2 * m1, ox = 2 * m1 + m2;

    f.K.setZero();
    f.K.block(0, 0, m1, m1).diagonal() = e1p2 + e2p1;
    f.K.block(0, oz, m1, m1).diagonal() = e3p1 - e3p2;
    f.K.block(0, oa, m1, m2) = e3p1.asDiagonal() * gab;
    f.K.block(oz, oz, m1, m1).diagonal() = e1p1 + e2p2;
    f.K.block(oz, oa, m1, m2) = e1p1.asDiagonal() * gab;
    f.K.block(oa, oa, m2, m2).noalias() = gab.transpose() * e1p1.asDiagonal() * gab;
    f.K.block(oa, oa, m2, m2).noalias() += gbb * e1p3.asDiagonal() * gbb;
    f.K.block(oa, oa, m2, m2).noalias() += gbb * e3p3.asDiagonal();
    f.K.block(oa, oa, m2, m2).noalias() += e3p3.asDiagonal() * gbb;
    f.K.block(oa, oa, m2, m2).diagonal() += e1p4 + e2p3;
    f.K.block(oa, ox, m2, m2) = gbb * e1p3.asDiagonal();
    f.K.block(oa, ox, m2, m2).diagonal() += e3p3 - e3p4;
    f.K.block(ox, ox, m2, m2).diagonal() = e1p3 + e2p4;
    if (boxed) {
      f.K.block(0, 0, m1, m1).diagonal() += extra_diag.segment(1 + t * d.m1, m1);
      f.K.block(oz, oz, m1, m1).diagonal() += extra_diag.segment(1 + d.qu() + t * d.m1, m1);
      f.K.block(oa, oa, m2, m2).diagonal() +=
          extra_diag.segment(1 + 2 * d.qu() + t * d.m2, m2);
      f.K.block(ox, ox, m2, m2).diagonal() +=
          extra_diag.segment(1 + 2 * d.qu() + d.ql() + t * d.m2, m2);
    }
    f.K.diagonal().array() += reg;
    f.K = f.K.selfadjointView<Eigen::Upper>();

    f.c_col.setZero();
    f.c_col.segment(oa, m2) = -e1p4;
    f.c_col.segment(ox, m2) = e3p4;
    kcc_ += e1p4.sum();

    f.llt.compute(f.K);
    if (f.llt.info() != Eigen::Success) return false;
  }

  schur_ = kcc_;
  for (auto& f : folds_) schur_ -= f.c_col.dot(f.llt.solve(f.c_col));
  return schur_ > 0;
}

Vector CondensedKkt::solve(const Vector& rhs) const {
  const MpecDims& d = p_.dims();
  Vector dv(d.nv());
  double rc = rhs[0];
  std::vector<Vector> u(folds_.size()), w(folds_.size());
  for (int t = 0; t < d.T; ++t) {
    const FoldSystem& f = folds_[static_cast<std::size_t>(t)];
    u[t] = f.llt.solve(gather(rhs, t));
    w[t] = f.llt.solve(f.c_col);
    rc -= f.c_col.dot(u[t]);
  }
  const double dc = rc / schur_;
  dv[0] = dc;
  for (int t = 0; t < d.T; ++t) scatter(u[t] - dc * w[t], t, dv);
  return dv;
}

Vector CondensedKkt::gather(const Vector& x, int t) const {
  const MpecDims& d = p_.dims();
  Vector out(2 * d.m1 + 2 * d.m2);
  out.segment(0, d.m1) = x.segment(1 + t * d.m1, d.m1);
  out.segment(d.m1, d.m1) = x.segment(1 + d.qu() + t * d.m1, d.m1);
  out.segment(2 * d.m1, d.m2) = x.segment(1 + 2 * d.qu() + t * d.m2, d.m2);
  out.segment(2 * d.m1 + d.m2, d.m2) = x.segment(1 + 2 * d.qu() + d.ql() + t * d.m2, d.m2);
  return out;
}

void CondensedKkt::scatter(const Vector& f, int t, Vector& x) const {
  const MpecDims& d = p_.dims();
  x.segment(1 + t * d.m1, d.m1) = f.segment(0, d.m1);
  x.segment(1 + d.qu() + t * d.m1, d.m1) = f.segment(d.m1, d.m1);
  x.segment(1 + 2 * d.qu() + t * d.m2, d.m2) = f.segment(2 * d.m1, d.m2);
  x.segment(1 + 2 * d.qu() + d.ql() + t * d.m2, d.m2) = f.segment(2 * d.m1 + d.m2, d.m2);
}

}  // namespace grcv
