#pragma once

#include "chainsim/pauli.hpp"

#include <initializer_list>
#include <vector>

namespace testutil {

using namespace chainsim;

/// Nested commutator [S_{i1}, [S_{i2}, ... [S_{ik}, x]]].
inline OperatorSum nest(const std::vector<OperatorSum>& s, std::initializer_list<int> idx, const OperatorSum& x) {
  std::vector<int> order(idx);
  OperatorSum out = x;
  for (auto it = order.rbegin(); it != order.rend(); ++it) out = commutator(s[static_cast<std::size_t>(*it)], out);
  return out;
}

/// Right-hand sides of the order equations up to eps^5, written out term by
/// term. Index exchange in a nested term runs over every distinct ordering.
inline std::vector<OperatorSum> explicit_orders(const std::vector<OperatorSum>& s, const OperatorSum& h0,
                                                const OperatorSum& v) {
  const OperatorSum& h = h0;
  std::vector<OperatorSum> r(6);
  r[1] = nest(s, {1}, h) + v;
  r[2] = nest(s, {2}, h) + nest(s, {1}, v) + 0.5 * nest(s, {1, 1}, h);
  r[3] = nest(s, {3}, h) + nest(s, {2}, v) + 0.5 * (nest(s, {1, 2}, h) + nest(s, {2, 1}, h)) +
         0.5 * nest(s, {1, 1}, v) + (1.0 / 6) * nest(s, {1, 1, 1}, h);
  r[4] = nest(s, {4}, h) + nest(s, {3}, v) + 0.5 * (nest(s, {1, 3}, h) + nest(s, {3, 1}, h)) +
         0.5 * nest(s, {2, 2}, h) + 0.5 * (nest(s, {1, 2}, v) + nest(s, {2, 1}, v)) +
         (1.0 / 6) * (nest(s, {2, 1, 1}, h) + nest(s, {1, 2, 1}, h) + nest(s, {1, 1, 2}, h)) +
         (1.0 / 6) * nest(s, {1, 1, 1}, v) + (1.0 / 24) * nest(s, {1, 1, 1, 1}, h);
  r[5] = nest(s, {5}, h) + nest(s, {4}, v) + 0.5 * (nest(s, {1, 4}, h) + nest(s, {4, 1}, h)) +
         0.5 * (nest(s, {2, 3}, h) + nest(s, {3, 2}, h)) + 0.5 * (nest(s, {1, 3}, v) + nest(s, {3, 1}, v)) +
         0.5 * nest(s, {2, 2}, v) +
         (1.0 / 6) * (nest(s, {2, 2, 1}, h) + nest(s, {2, 1, 2}, h) + nest(s, {1, 2, 2}, h)) +
         (1.0 / 6) * (nest(s, {3, 1, 1}, h) + nest(s, {1, 3, 1}, h) + nest(s, {1, 1, 3}, h)) +
         (1.0 / 6) * (nest(s, {2, 1, 1}, v) + nest(s, {1, 2, 1}, v) + nest(s, {1, 1, 2}, v)) +
         (1.0 / 24) * (nest(s, {1, 1, 1, 2}, h) + nest(s, {1, 1, 2, 1}, h) + nest(s, {1, 2, 1, 1}, h) +
                       nest(s, {2, 1, 1, 1}, h)) +
         (1.0 / 24) * nest(s, {1, 1, 1, 1}, v) + (1.0 / 120) * nest(s, {1, 1, 1, 1, 1}, h);
  return r;
}

}  // namespace testutil
