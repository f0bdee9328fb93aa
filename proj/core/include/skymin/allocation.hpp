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

#ifndef SKYMIN_ALLOCATION_HPP
#define SKYMIN_ALLOCATION_HPP

#include <Eigen/Core>
#include <vector>

namespace skymin {

/// Orthogonal-access uplink resources: per-device time share and transmit
/// power on every segment. Matrices are K x N (device-major).
struct OmaAllocation {
  Eigen::MatrixXd time_share;  ///< tau_k[n] (s)
  Eigen::MatrixXd power;       ///< p_k[n] (W)

  int num_devices() const { return static_cast<int>(time_share.rows()); }
  int num_segments() const { return static_cast<int>(time_share.cols()); }
};

/// Per-segment successive-interference-cancellation order. after(k, m, n)
/// is 1 when device k is decoded after device m on segment n, so k's signal
/// interferes with m's. Every segment's relation must be a strict total
/// order over devices.
class DecodingOrder {
 public:
  DecodingOrder() = default;
  DecodingOrder(int num_devices, int num_segments);

  /// Build from per-segment decode sequences: sequence[n][i] is the device
  /// decoded i-th on segment n.
  static DecodingOrder from_sequences(
      const std::vector<std::vector<int>>& sequences);

  int num_devices() const { return k_; }
  int num_segments() const { return n_; }

  int after(int k, int m, int n) const {
    return flags_[static_cast<std::size_t>(n) * k_ * k_ + k * k_ + m];
  }
  void set_after(int k, int m, int n, int value);

  /// Decode sequence of segment n (devices in decode order). Requires the
  /// segment relation to be a total order.
  std::vector<int> sequence(int n) const;

  /// Pairing holds (after(k,m) + after(m,k) == 1 for k != m) on all segments.
  bool pairing_valid() const;
  /// Pairing holds and every segment's relation is acyclic.
  bool total_order_valid() const;

 private:
  int k_ = 0;
  int n_ = 0;
  std::vector<unsigned char> flags_;
};

/// Non-orthogonal-access uplink resources: a single shared communication
/// window per segment, per-device powers, and the decoding order.
struct NomaAllocation {
  Eigen::VectorXd comm_time;  ///< tau[n] (s)
  Eigen::MatrixXd power;      ///< p_k[n] (W), K x N
  DecodingOrder order;

  int num_devices() const { return static_cast<int>(power.rows()); }
  int num_segments() const { return static_cast<int>(power.cols()); }
};

}  // namespace skymin

#endif  // SKYMIN_ALLOCATION_HPP
