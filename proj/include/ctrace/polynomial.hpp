#pragma once

#include <string>
#include <vector>

#include "ctrace/core.hpp"

namespace ctrace {

/// One term c * prod_i q_i^a_i p_i^b_i. Exponents are stored in state order [a_1..a_N, b_1..b_N].
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;
};

/// Real polynomial on 2N-dimensional phase space with exact derivatives.
class Polynomial {
 public:
  explicit Polynomial(int dof = 1) : dof_(dof) {}

  int dof() const { return dof_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  /// Adds c * q^qpow * p^ppow; terms with equal exponents are merged.
  Polynomial& add(double coefficient, const std::vector<int>& q_pow, const std::vector<int>& p_pow);
  /// N = 1 shorthand.
  Polynomial& add(double coefficient, int q_pow, int p_pow);

  double value(const State& x) const;
  Eigen::VectorXd gradient(const State& x) const;
  Eigen::MatrixXd hessian(const State& x) const;

  int max_degree() const;
  /// True when no monomial mixes q and p of the same degree of freedom.
  bool is_separable() const;
  std::string to_string() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial scaled(double factor) const;

 private:
  void add_monomial(double coefficient, std::vector<int> exponents);

  int dof_;
  std::vector<Monomial> terms_;
};

}  // namespace ctrace
