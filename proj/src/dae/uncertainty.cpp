#include "daecert/dae/uncertainty.hpp"

#include <cmath>
#include <random>

namespace daecert::dae {

int param_basis_size(ParamKind kind, int dim) {
  switch (kind) {
    case ParamKind::kSymmetric:
    case ParamKind::kPsd:
      return dim * (dim + 1) / 2;
    case ParamKind::kDiagonalPsd:
      return dim;
    case ParamKind::kSkew:
      return dim * (dim - 1) / 2;
    case ParamKind::kNonnegative:
      return 1;
  }
  return 0;
}

Matrix param_basis(ParamKind kind, int dim, int k) {
  if (k < 0 || k >= param_basis_size(kind, dim)) throw InputError("parameter basis index out of range");
  Matrix e = Matrix::Zero(dim, dim);
  switch (kind) {
    case ParamKind::kNonnegative:
      e(0, 0) = 1.0;
      return e;
    case ParamKind::kDiagonalPsd:
      e(k, k) = 1.0;
      return e;
    case ParamKind::kSymmetric:
    case ParamKind::kPsd: {
      int idx = 0;
      for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j, ++idx) {
          if (idx == k) {
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            return e;
          }
        }
      }
      break;
    }
    case ParamKind::kSkew: {
      int idx = 0;
      for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j, ++idx) {
          if (idx == k) {
            e(i, j) = 1.0;
            e(j, i) = -1.0;
            return e;
          }
        }
      }
      break;
    }
  }
  return e;
}

MultiplierParam make_param(std::string name, ParamKind kind, int dim, double margin,
                           const std::function<Matrix(const Matrix&)>& map) {
  if (kind == ParamKind::kNonnegative) dim = 1;
  MultiplierParam p{std::move(name), kind, dim, margin, {}};
  const int nb = param_basis_size(kind, dim);
  Eigen::Index r = -1;
  for (int k = 0; k < nb; ++k) {
    Matrix c = map(param_basis(kind, dim, k));
    if (r < 0) r = c.rows();
    if (c.rows() != r || c.cols() != r) throw InputError("multiplier map returns inconsistent sizes");
    if (max_abs(c - c.transpose()) > 1e-12 * (1.0 + max_abs(c))) {
      throw InputError("multiplier map of '" + p.name + "' is not symmetric");
    }
    p.coeffs.push_back(std::move(c));
  }
  // Linearity probe on a fixed pseudo-random combination.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix value = Matrix::Zero(dim, dim);
  Matrix expected = nb > 0 ? Matrix::Zero(p.coeffs[0].rows(), p.coeffs[0].cols()) : Matrix();
  for (int k = 0; k < nb; ++k) {
    const double a = u(rng);
    value += a * param_basis(kind, dim, k);
    expected += a * p.coeffs[k];
  }
  if (nb > 0) {
    const Matrix got = map(value);
    if (got.rows() != expected.rows() ||
        max_abs(got - expected) > 1e-9 * (1.0 + max_abs(expected))) {
      throw InputError("multiplier family '" + p.name + "' is not linear in its parameter");
    }
  }
  return p;
}

UncertaintySpec UncertaintySpec::none() { return {}; }

UncertaintySpec UncertaintySpec::pointwise(const Matrix& m, const Matrix& d) {
  UncertaintySpec u;
  u.kind = UncertaintyKind::kPointwise;
  u.filter.a = Matrix(0, 0);
  u.filter.b = Matrix(0, d.cols());
  u.filter.c = Matrix(d.rows(), 0);
  u.filter.d = d;
  u.m = m;
  return u;
}

UncertaintySpec UncertaintySpec::hard_iqc(const Filter& filter, const Matrix& m) {
  UncertaintySpec u;
  u.kind = UncertaintyKind::kHardIqc;
  u.filter = filter;
  u.m = m;
  return u;
}

UncertaintySpec UncertaintySpec::sector(int n, int m, int l, double margin) {
  if (m != l) throw InputError("sector constraint pairs each v with one ξ (m = ℓ)");
  Matrix d = Matrix::Zero(m + l, n + m + l);
  d.rightCols(m + l).setIdentity();
  UncertaintySpec u = pointwise(Matrix::Zero(m + l, m + l), d);
  u.params.push_back(make_param("Lambda", ParamKind::kDiagonalPsd, m, margin,
                                [m, l](const Matrix& lam) {
                                  Matrix out = Matrix::Zero(m + l, m + l);
                                  out.block(0, m, m, l) = -0.5 * lam;
                                  out.block(m, 0, l, m) = -0.5 * lam;
                                  out.block(m, m, l, l) = lam;
                                  return out;
                                }));
  return u;
}

Matrix UncertaintySpec::multiplier(const std::vector<Matrix>& values) const {
  if (values.size() != params.size()) throw InputError("one value per multiplier parameter");
  Matrix out = m;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    const Matrix& v = values[i];
    if (v.rows() != p.dim || v.cols() != p.dim) throw InputError("parameter value has wrong size");
    int idx = 0;
    switch (p.kind) {
      case ParamKind::kNonnegative:
        out += v(0, 0) * p.coeffs[0];
        break;
      case ParamKind::kDiagonalPsd:
        for (int k = 0; k < p.dim; ++k) out += v(k, k) * p.coeffs[k];
        break;
      case ParamKind::kSymmetric:
      case ParamKind::kPsd:
        for (int i2 = 0; i2 < p.dim; ++i2) {
          for (int j = i2; j < p.dim; ++j, ++idx) out += v(i2, j) * p.coeffs[idx];
        }
        break;
      case ParamKind::kSkew:
        for (int i2 = 0; i2 < p.dim; ++i2) {
          for (int j = i2 + 1; j < p.dim; ++j, ++idx) out += v(i2, j) * p.coeffs[idx];
        }
        break;
    }
  }
  return out;
}

void UncertaintySpec::check(int nx, int nv, int nl) const {
  if (kind == UncertaintyKind::kNone) return;
  const int in = nx + nv + nl;
  const int ns = filter.states();
  const int r = filter.outputs();
  if (filter.a.cols() != ns || filter.b.rows() != ns || filter.b.cols() != in ||
      filter.c.rows() != r || filter.c.cols() != ns || filter.d.cols() != in) {
    throw InputError("filter dimensions do not match [x; v; xi] of size " + std::to_string(in));
  }
  if (kind == UncertaintyKind::kPointwise && ns != 0) {
    throw InputError("pointwise constraints use a static filter");
  }
  if (m.rows() != r || m.cols() != r) throw InputError("M must be square with filter output size");
  if (max_abs(m - m.transpose()) > 1e-12 * (1.0 + max_abs(m))) {
    throw InputError("M is not symmetric");
  }
  for (const auto& p : params) {
    if (static_cast<int>(p.coeffs.size()) != param_basis_size(p.kind, p.dim)) {
      throw InputError("parameter '" + p.name + "' has wrong coefficient count");
    }
    for (const auto& c : p.coeffs) {
      if (c.rows() != r || c.cols() != r) throw InputError("parameter '" + p.name + "' has mis-sized coefficients");
    }
  }
  if (ns > 0 && spectral_abscissa(filter.a) >= 0.0) {
    throw InputError("filter A_psi is not Hurwitz");
  }
}

}  // namespace daecert::dae
