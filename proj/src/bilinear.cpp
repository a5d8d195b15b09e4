#include "pidual/bilinear.hpp"

#include <cmath>

namespace pidual {

std::optional<NormedSpace> coordinatewise_fill(const NormedSpace& E, const NormedSpace& F) {
  if (E.dim() != F.dim()) return std::nullopt;
  if (!E.lp_form().has_value() || !F.lp_form().has_value()) return std::nullopt;
  const LpForm& fe = *E.lp_form();
  const LpForm& ff = *F.lp_form();
  const Index n = E.dim();

  auto nearly_equal = [](const Vector& a, const Vector& b) {
    return (a - b).lpNorm<Eigen::Infinity>() <=
           1e-14 * std::max(1.0, a.lpNorm<Eigen::Infinity>());
  };

  if (fe.p.is_infinite() && ff.p.is_infinite()) {
    // |x| <= 1/w_E, |y| <= 1/w_F: the products fill the box with weights w_E w_F.
    return NormedSpace::weighted_lp(Exponent::infinity(),
                                    (fe.weights.array() * ff.weights.array()).matrix());
  }
  if (fe.p.is_infinite() || ff.p.is_infinite()) {
    const LpForm& sup = fe.p.is_infinite() ? fe : ff;
    const LpForm& fin = fe.p.is_infinite() ? ff : fe;
    double qv = fin.p.value();
    Vector weights = (fin.weights.array() * sup.weights.array().pow(qv)).matrix();
    return NormedSpace::weighted_lp(fin.p, weights);
  }
  if (!nearly_equal(fe.weights, ff.weights)) return std::nullopt;
  ProductExponent t = product_exponent(fe.p, ff.p);
  if (t.sub_one) {
    // Convex hull of the sub-one quasi-ball: vertices +/- e_i w_i^{-1/t}.
    Vector weights = fe.weights.array().pow(1.0 / t.t_value).matrix();
    return NormedSpace::weighted_lp(Exponent::one(), weights);
  }
  (void)n;
  return NormedSpace::weighted_lp(t.clamped, fe.weights);
}

BilinearMap::BilinearMap(Kind kind, NormedSpace E, NormedSpace F, NormedSpace G,
                         std::vector<Matrix> coeff)
    : kind_(kind),
      E_(std::move(E)),
      F_(std::move(F)),
      G_(std::move(G)),
      coeff_(std::make_shared<const std::vector<Matrix>>(std::move(coeff))) {}

BilinearMap BilinearMap::pointwise(NormedSpace E, NormedSpace F, NormedSpace G) {
  require(E.dim() == F.dim() && E.dim() == G.dim(), ErrorKind::Dimension,
          "pointwise: E, F, G must share a coordinate system");
  return BilinearMap(Kind::PointwiseProduct, std::move(E), std::move(F), std::move(G), {});
}

BilinearMap BilinearMap::hadamard(NormedSpace E, NormedSpace F, NormedSpace G) {
  require(E.dim() == F.dim() && E.dim() == G.dim(), ErrorKind::Dimension,
          "hadamard: truncation degrees must match");
  return BilinearMap(Kind::Hadamard, std::move(E), std::move(F), std::move(G), {});
}

BilinearMap BilinearMap::scalar_pairing(NormedSpace E, NormedSpace F, NormedSpace G) {
  require(E.dim() == F.dim(), ErrorKind::Dimension, "scalar_pairing: dim(E) != dim(F)");
  require(G.dim() == 1, ErrorKind::Dimension, "scalar_pairing: G must be one-dimensional");
  return BilinearMap(Kind::ScalarPairing, std::move(E), std::move(F), std::move(G), {});
}

BilinearMap BilinearMap::tensor(NormedSpace E, NormedSpace F, NormedSpace G) {
  require(G.dim() == E.dim() * F.dim(), ErrorKind::Dimension,
          "tensor: dim(G) must equal dim(E) * dim(F)");
  return BilinearMap(Kind::TensorCoordinates, std::move(E), std::move(F), std::move(G), {});
}

BilinearMap BilinearMap::custom(NormedSpace E, NormedSpace F, NormedSpace G,
                                std::vector<Matrix> coeff) {
  require(static_cast<Index>(coeff.size()) == G.dim(), ErrorKind::Dimension,
          "custom: need one coefficient matrix per output coordinate");
  for (const Matrix& A : coeff) {
    require(A.rows() == E.dim() && A.cols() == F.dim(), ErrorKind::Dimension,
            "custom: coefficient matrix has wrong shape");
  }
  return BilinearMap(Kind::Custom, std::move(E), std::move(F), std::move(G), std::move(coeff));
}

Vector BilinearMap::evaluate(const Vector& x, const Vector& y) const {
  require(x.size() == E_.dim() && y.size() == F_.dim(), ErrorKind::Dimension,
          "evaluate: argument dimensions do not match the map");
  require(x.allFinite() && y.allFinite(), ErrorKind::Invariant,
          "evaluate: non-finite coordinates");
  switch (kind_) {
    case Kind::PointwiseProduct:
    case Kind::Hadamard:
      return (x.array() * y.array()).matrix();
    case Kind::ScalarPairing: {
      Vector g(1);
      g[0] = x.dot(y);
      return g;
    }
    case Kind::TensorCoordinates: {
      Vector g(G_.dim());
      const Index nf = F_.dim();
      for (Index i = 0; i < E_.dim(); ++i)
        for (Index j = 0; j < nf; ++j) g[i * nf + j] = x[i] * y[j];
      return g;
    }
    case Kind::Custom: {
      Vector g(G_.dim());
      for (Index k = 0; k < G_.dim(); ++k) g[k] = x.dot((*coeff_)[k] * y);
      return g;
    }
  }
  return Vector();
}

Matrix BilinearMap::left_linearization(const Vector& x) const {
  require(x.size() == E_.dim(), ErrorKind::Dimension, "left_linearization: bad x");
  const Index ng = G_.dim(), nf = F_.dim();
  Matrix L = Matrix::Zero(ng, nf);
  switch (kind_) {
    case Kind::PointwiseProduct:
    case Kind::Hadamard:
      L.diagonal() = x;
      break;
    case Kind::ScalarPairing:
      L.row(0) = x.transpose();
      break;
    case Kind::TensorCoordinates:
      for (Index i = 0; i < E_.dim(); ++i)
        for (Index j = 0; j < nf; ++j) L(i * nf + j, j) = x[i];
      break;
    case Kind::Custom:
      for (Index k = 0; k < ng; ++k) L.row(k) = ((*coeff_)[k].transpose() * x).transpose();
      break;
  }
  return L;
}

Matrix BilinearMap::right_linearization(const Vector& y) const {
  require(y.size() == F_.dim(), ErrorKind::Dimension, "right_linearization: bad y");
  const Index ng = G_.dim(), ne = E_.dim(), nf = F_.dim();
  Matrix R = Matrix::Zero(ng, ne);
  switch (kind_) {
    case Kind::PointwiseProduct:
    case Kind::Hadamard:
      R.diagonal() = y;
      break;
    case Kind::ScalarPairing:
      R.row(0) = y.transpose();
      break;
    case Kind::TensorCoordinates:
      for (Index i = 0; i < ne; ++i)
        for (Index j = 0; j < nf; ++j) R(i * nf + j, i) = y[j];
      break;
    case Kind::Custom:
      for (Index k = 0; k < ng; ++k) R.row(k) = ((*coeff_)[k] * y).transpose();
      break;
  }
  return R;
}

Matrix BilinearMap::form_matrix(const Vector& lambda) const {
  require(lambda.size() == G_.dim(), ErrorKind::Dimension, "form_matrix: bad functional");
  const Index ne = E_.dim(), nf = F_.dim();
  switch (kind_) {
    case Kind::PointwiseProduct:
    case Kind::Hadamard: {
      Matrix M = Matrix::Zero(ne, nf);
      M.diagonal() = lambda;
      return M;
    }
    case Kind::ScalarPairing:
      return lambda[0] * Matrix::Identity(ne, nf);
    case Kind::TensorCoordinates: {
      Matrix M(ne, nf);
      for (Index i = 0; i < ne; ++i)
        for (Index j = 0; j < nf; ++j) M(i, j) = lambda[i * nf + j];
      return M;
    }
    case Kind::Custom: {
      Matrix M = Matrix::Zero(ne, nf);
      for (Index k = 0; k < G_.dim(); ++k) M += lambda[k] * (*coeff_)[k];
      return M;
    }
  }
  return Matrix();
}

Matrix BilinearMap::range_span() const {
  const Index ne = E_.dim(), nf = F_.dim(), ng = G_.dim();
  Matrix S(ng, ne * nf);
  Vector ei = Vector::Zero(ne), ej = Vector::Zero(nf);
  for (Index i = 0; i < ne; ++i) {
    ei[i] = 1.0;
    for (Index j = 0; j < nf; ++j) {
      ej[j] = 1.0;
      S.col(i * nf + j) = evaluate(ei, ej);
      ej[j] = 0.0;
    }
    ei[i] = 0.0;
  }
  return S;
}

Vector BilinearMap::absolute_bound(const Vector& bx, const Vector& by) const {
  const Index ng = G_.dim();
  switch (kind_) {
    case Kind::PointwiseProduct:
    case Kind::Hadamard:
      return (bx.array() * by.array()).matrix();
    case Kind::ScalarPairing: {
      Vector g(1);
      g[0] = bx.dot(by);
      return g;
    }
    case Kind::TensorCoordinates: {
      Vector g(ng);
      const Index nf = F_.dim();
      for (Index i = 0; i < E_.dim(); ++i)
        for (Index j = 0; j < nf; ++j) g[i * nf + j] = bx[i] * by[j];
      return g;
    }
    case Kind::Custom: {
      Vector g(ng);
      for (Index k = 0; k < ng; ++k) g[k] = bx.dot((*coeff_)[k].cwiseAbs() * by);
      return g;
    }
  }
  return Vector();
}

std::optional<NormedSpace> BilinearMap::product_fill_space() const {
  if (!coordinatewise()) return std::nullopt;
  return coordinatewise_fill(E_, F_);
}

}  // namespace pidual
