#include <algorithm>

#include "daecert/sos/polynomial.hpp"

namespace daecert::sos {

namespace {

void fill(int vars, int deg, int pos, Exponent& cur, std::vector<Exponent>& out) {
  if (pos == vars - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int k = deg; k >= 0; --k) {
    cur[pos] = k;
    fill(vars, deg - k, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<Exponent> monomial_basis(int vars, int min_deg, int max_deg) {
  if (vars < 0 || max_deg < 0) throw InputError("monomial_basis: negative argument");
  std::vector<Exponent> out;
  if (vars == 0) {
    if (min_deg <= 0) out.emplace_back();
    return out;
  }
  for (int d = std::max(0, min_deg); d <= max_deg; ++d) {
    Exponent cur(vars, 0);
    fill(vars, d, 0, cur, out);
  }
  return out;
}

std::vector<Exponent> monomial_basis(int vars, int max_deg) {
  return monomial_basis(vars, 0, max_deg);
}

}  // namespace daecert::sos
