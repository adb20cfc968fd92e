#include "ctrace/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace ctrace {

namespace {

// x^n with x^0 = 1 even for x = 0, negative n treated as zero contribution.
double ipow(double x, int n) {
  if (n < 0) return 0.0;
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

}  // namespace

Polynomial& Polynomial::add(double coefficient, const std::vector<int>& q_pow, const std::vector<int>& p_pow) {
  if (static_cast<int>(q_pow.size()) != dof_ || static_cast<int>(p_pow.size()) != dof_)
    throw DomainError("polynomial term exponent length does not match dof");
  std::vector<int> e(q_pow);
  e.insert(e.end(), p_pow.begin(), p_pow.end());
  add_monomial(coefficient, std::move(e));
  return *this;
}

Polynomial& Polynomial::add(double coefficient, int q_pow, int p_pow) {
  if (dof_ != 1) throw DomainError("scalar polynomial shorthand requires dof = 1");
  add_monomial(coefficient, {q_pow, p_pow});
  return *this;
}

void Polynomial::add_monomial(double coefficient, std::vector<int> exponents) {
  if (!std::isfinite(coefficient)) throw DomainError("non-finite polynomial coefficient");
  if (std::any_of(exponents.begin(), exponents.end(), [](int k) { return k < 0; }))
    throw DomainError("negative polynomial exponent");
  if (coefficient == 0.0) return;
  for (auto& t : terms_) {
    if (t.exponents == exponents) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back({coefficient, std::move(exponents)});
}

double Polynomial::value(const State& x) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    double m = t.coefficient;
    for (int i = 0; i < 2 * dof_; ++i) m *= ipow(x[i], t.exponents[i]);
    v += m;
  }
  return v;
}

Eigen::VectorXd Polynomial::gradient(const State& x) const {
  const int n = 2 * dof_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (const auto& t : terms_) {
    for (int k = 0; k < n; ++k) {
      const int ek = t.exponents[k];
      if (ek == 0) continue;
      double m = t.coefficient * ek * ipow(x[k], ek - 1);
      for (int i = 0; i < n; ++i)
        if (i != k) m *= ipow(x[i], t.exponents[i]);
      g[k] += m;
    }
  }
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const State& x) const {
  const int n = 2 * dof_;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : terms_) {
    for (int k = 0; k < n; ++k) {
      const int ek = t.exponents[k];
      if (ek == 0) continue;
      for (int l = k; l < n; ++l) {
        const int el = t.exponents[l];
        double m = t.coefficient;
        if (l == k) {
          if (ek < 2) continue;
          m *= ek * (ek - 1) * ipow(x[k], ek - 2);
        } else {
          if (el == 0) continue;
          m *= ek * ipow(x[k], ek - 1) * el * ipow(x[l], el - 1);
        }
        for (int i = 0; i < n; ++i)
          if (i != k && i != l) m *= ipow(x[i], t.exponents[i]);
        h(k, l) += m;
        if (l != k) h(l, k) += m;
      }
    }
  }
  return h;
}

int Polynomial::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

bool Polynomial::is_separable() const {
  for (const auto& t : terms_)
    for (int i = 0; i < dof_; ++i)
      if (t.exponents[i] > 0 && t.exponents[dof_ + i] > 0) return false;
  return true;
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << t.coefficient;
    for (int i = 0; i < dof_; ++i) {
      if (t.exponents[i] > 0) os << "*q" << i + 1 << "^" << t.exponents[i];
      if (t.exponents[dof_ + i] > 0) os << "*p" << i + 1 << "^" << t.exponents[dof_ + i];
    }
  }
  if (first) os << "0";
  return os.str();
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (other.dof_ != dof_) throw DomainError("adding polynomials of different dof");
  Polynomial r = *this;
  for (const auto& t : other.terms_) r.add_monomial(t.coefficient, t.exponents);
  return r;
}

Polynomial Polynomial::scaled(double factor) const {
  Polynomial r(dof_);
  for (const auto& t : terms_) r.add_monomial(t.coefficient * factor, t.exponents);
  return r;
}

}  // namespace ctrace
