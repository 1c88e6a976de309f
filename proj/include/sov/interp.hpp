// Interpolation polynomials in node-value form. A rational-kind polynomial of
// degree M over M nodes is Lagrange data plus one leading coefficient; the
// trig kind stores both e^{∓λN} asymptotic limits, which collapse to a single
// effective leading constant
//   C = 2^{N-1} (e^{+Σz} T_+  +  (-1)^N e^{-Σz} T_-),
// so that
//   t(λ) = C Π_m sinh(λ−z_m) + Σ_n cosh(λ−z_n) L_n(λ) v_n,
// with L_n the sinh-Lagrange basis. The node data and the asymptotic pair are
// consistent only when the sum rule
//   Σ_n v_n / Π_{b≠n} sinh(z_n−z_b)  =  2^{N-1}(e^{+Σz} T_+ − (-1)^N e^{-Σz} T_-)
// holds; sum_rule_residual exposes the mismatch. Without an asymptotic pair
// the trig kind is the plain sinh-Lagrange reconstruction of the opposite
// parity class (both e^{∓λN} limits zero), which is where the antidiagonal
// twist family lives.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "sov/linalg.hpp"
#include "sov/scalar.hpp"

namespace sov {

template <class T>
class InterpPoly {
 public:
  InterpPoly() = default;

  /// nodes: (point, value) pairs; asym: leading coefficient of λ^#nodes
  /// (absent for a plain degree #nodes-1 Lagrange polynomial).
  InterpPoly(std::vector<std::pair<T, T>> nodes, std::optional<T> asym)
      : nodes_(std::move(nodes)), asym_(std::move(asym)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (std::size_t j = i + 1; j < nodes_.size(); ++j)
        if (nodes_[i].first == nodes_[j].first)
          throw std::invalid_argument("InterpPoly: coincident nodes");
  }

  int degree() const {
    return static_cast<int>(nodes_.size()) - (asym_.has_value() ? 0 : 1);
  }

  T operator()(const T& x) const {
    T acc = T(0);
    if (asym_) {
      T lead = *asym_;
      for (const auto& [z, v] : nodes_) lead *= (x - z);
      acc += lead;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      T w = nodes_[i].second;
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (j == i) continue;
        w *= (x - nodes_[j].first) / (nodes_[i].first - nodes_[j].first);
      }
      acc += w;
    }
    return acc;
  }

  const std::vector<std::pair<T, T>>& nodes() const { return nodes_; }
  const std::optional<T>& asym() const { return asym_; }

 private:
  std::vector<std::pair<T, T>> nodes_;
  std::optional<T> asym_;
};

/// Trigonometric polynomial from N nodes, optionally carrying the ordered
/// asymptotic pair (T_+, T_-) = lim e^{∓λN} t(λ). Float-only: sinh of an
/// exact rational is transcendental.
class TrigInterp {
 public:
  TrigInterp() = default;

  TrigInterp(std::vector<std::pair<Cplx, Cplx>> nodes,
             std::optional<std::pair<Cplx, Cplx>> asym)
      : nodes_(std::move(nodes)), asym_(asym) {
    Cplx zsum = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      zsum += nodes_[i].first;
      for (std::size_t j = i + 1; j < nodes_.size(); ++j)
        if (std::abs(std::sinh(nodes_[i].first - nodes_[j].first)) < 1e-14)
          throw std::invalid_argument("TrigInterp: coincident nodes (mod i*pi)");
    }
    if (asym_) {
      const int n = static_cast<int>(nodes_.size());
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const double two_pow = std::ldexp(1.0, n - 1);  // 2^{N-1}
      lead_ = two_pow * (std::exp(zsum) * asym_->first + sign * std::exp(-zsum) * asym_->second);
      rule_rhs_ = two_pow * (std::exp(zsum) * asym_->first - sign * std::exp(-zsum) * asym_->second);
    }
  }

  Cplx operator()(const Cplx& x) const {
    Cplx acc = 0;
    if (asym_) {
      Cplx lead = lead_;
      for (const auto& [z, v] : nodes_) lead *= std::sinh(x - z);
      acc += lead;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Cplx w = nodes_[i].second;
      if (asym_) w *= std::cosh(x - nodes_[i].first);
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (j == i) continue;
        w *= std::sinh(x - nodes_[j].first) / std::sinh(nodes_[i].first - nodes_[j].first);
      }
      acc += w;
    }
    return acc;
  }

  /// Mismatch between node data and the asymptotic pair; zero for data coming
  /// from an actual trig polynomial of the stated class. Without the pair the
  /// rule right side is zero and this measures how far the data is from the
  /// vanishing-asymptotics class.
  double sum_rule_residual() const {
    Cplx s = 0;
    double term_scale = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Cplx w = nodes_[i].second;
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (j == i) continue;
        w /= std::sinh(nodes_[i].first - nodes_[j].first);
      }
      s += w;
      term_scale += std::abs(w);
    }
    double scale = std::max({term_scale, std::abs(rule_rhs_), 1e-300});
    return std::abs(s - rule_rhs_) / scale;
  }

  const std::vector<std::pair<Cplx, Cplx>>& nodes() const { return nodes_; }
  const std::optional<std::pair<Cplx, Cplx>>& asym() const { return asym_; }

 private:
  std::vector<std::pair<Cplx, Cplx>> nodes_;
  std::optional<std::pair<Cplx, Cplx>> asym_;
  Cplx lead_ = 0, rule_rhs_ = 0;
};

}  // namespace sov
