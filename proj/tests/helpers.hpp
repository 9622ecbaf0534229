#pragma once

#include <random>
#include <vector>

#include "nsp/sequence.hpp"
#include "oracles.hpp"

namespace testutil {

inline oracle::Seq to_map(const nsp::FinSeq<double>& c) {
  oracle::Seq m;
  for (nsp::Index i = 0; i < c.size(); ++i)
    if (c.coeffs()[i] != 0.0) m[long(c.offset() + i)] = c.coeffs()[i];
  return m;
}

inline double max_diff(const nsp::FinSeq<double>& c, const oracle::Seq& m) {
  double d = 0.0;
  for (const auto& [j, v] : m) d = std::max(d, std::abs(c[j] - v));
  for (nsp::Index i = 0; i < c.size(); ++i) {
    const auto it = m.find(long(c.offset() + i));
    d = std::max(d, std::abs(c.coeffs()[i] - (it == m.end() ? 0.0 : it->second)));
  }
  return d;
}

inline nsp::FinSeq<double> random_fin(std::mt19937_64& rng, nsp::Index len, nsp::Index offset,
                                      double scale = 1.0) {
  const auto v = oracle::random_vector(std::size_t(len), rng, scale);
  return nsp::FinSeq<double>(offset, Eigen::Map<const Eigen::VectorXd>(v.data(), len).eval());
}

inline nsp::PeriodicSeq<double> random_periodic(std::mt19937_64& rng, nsp::Index n, double scale = 1.0) {
  const auto v = oracle::random_vector(std::size_t(n), rng, scale);
  return nsp::PeriodicSeq<double>(Eigen::Map<const Eigen::VectorXd>(v.data(), n).eval());
}

}  // namespace testutil
