/*
 * Copyright 2026 The skymin Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "skymin/allocation.hpp"

#include <algorithm>
#include <stdexcept>

namespace skymin {

DecodingOrder::DecodingOrder(int num_devices, int num_segments)
    : k_(num_devices),
      n_(num_segments),
      flags_(static_cast<std::size_t>(num_devices) * num_devices *
                 num_segments,
             0) {}

void DecodingOrder::set_after(int k, int m, int n, int value) {
  flags_[static_cast<std::size_t>(n) * k_ * k_ + k * k_ + m] =
      static_cast<unsigned char>(value != 0);
}

DecodingOrder DecodingOrder::from_sequences(
    const std::vector<std::vector<int>>& sequences) {
  const int n_segments = static_cast<int>(sequences.size());
  const int k = n_segments > 0 ? static_cast<int>(sequences[0].size()) : 0;
  DecodingOrder order(k, n_segments);
  for (int n = 0; n < n_segments; ++n) {
    const auto& seq = sequences[n];
    if (static_cast<int>(seq.size()) != k) {
      throw std::invalid_argument("from_sequences: ragged sequence list");
    }
    std::vector<int> position(k, -1);
    for (int i = 0; i < k; ++i) position[seq[i]] = i;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (a == b) continue;
        order.set_after(a, b, n, position[a] > position[b] ? 1 : 0);
      }
    }
  }
  return order;
}

std::vector<int> DecodingOrder::sequence(int n) const {
  // Device decoded after j others sits at position j; a total order makes
  // the "decoded-after" counts a permutation of 0..K-1.
  std::vector<int> seq(k_, -1);
  for (int k = 0; k < k_; ++k) {
    int later_than = 0;
    for (int m = 0; m < k_; ++m) {
      if (m != k) later_than += after(k, m, n);
    }
    if (seq[later_than] != -1) {
      throw std::logic_error("sequence: segment relation is not a total order");
    }
    seq[later_than] = k;
  }
  return seq;
}

bool DecodingOrder::pairing_valid() const {
  for (int n = 0; n < n_; ++n) {
    for (int k = 0; k < k_; ++k) {
      for (int m = k + 1; m < k_; ++m) {
        if (after(k, m, n) + after(m, k, n) != 1) return false;
      }
    }
  }
  return true;
}

bool DecodingOrder::total_order_valid() const {
  if (!pairing_valid()) return false;
  for (int n = 0; n < n_; ++n) {
    std::vector<int> counts(k_, 0);
    for (int k = 0; k < k_; ++k) {
      for (int m = 0; m < k_; ++m) {
        if (m != k) counts[k] += after(k, m, n);
      }
    }
    std::sort(counts.begin(), counts.end());
    for (int i = 0; i < k_; ++i) {
      if (counts[i] != i) return false;
    }
  }
  return true;
}

}  // namespace skymin
