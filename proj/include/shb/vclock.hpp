/*
   Copyright 2026 The shbrace Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */

#ifndef SHB_VCLOCK_HPP
#define SHB_VCLOCK_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <variant>
#include <vector>

namespace shb {

using Counter = std::uint64_t;

// Thread-indexed counters. Components beyond size() read as 0, so the
// default-constructed value is bottom.
class VectorTime {
 public:
  VectorTime() = default;
  explicit VectorTime(std::size_t width) : c_(width, 0) {}
  VectorTime(std::initializer_list<Counter> components) : c_(components) {}

  static VectorTime bottom() { return {}; }

  Counter operator[](std::size_t t) const { return t < c_.size() ? c_[t] : 0; }
  std::size_t width() const { return c_.size(); }

  void set(std::size_t t, Counter n) {
    grow(t + 1);
    c_[t] = n;
  }
  void increment(std::size_t t) {
    grow(t + 1);
    ++c_[t];
  }

  // Pointwise order.
  bool leq(const VectorTime& other) const;
  // Pointwise max, in place.
  void join_with(const VectorTime& other);

  // Semantic equality: trailing zeros do not matter.
  bool operator==(const VectorTime& other) const;

 private:
  void grow(std::size_t width) {
    if (c_.size() < width) c_.resize(width, 0);
  }

  std::vector<Counter> c_;
};

std::ostream& operator<<(std::ostream& out, const VectorTime& v);

inline bool vt_leq(const VectorTime& a, const VectorTime& b) { return a.leq(b); }

inline VectorTime vt_join(VectorTime a, const VectorTime& b) {
  a.join_with(b);
  return a;
}

inline VectorTime vt_update(VectorTime v, Counter n, std::size_t u) {
  v.set(u, n);
  return v;
}

// c@u, standing for bottom[c/u].
struct Epoch {
  Counter clock = 0;
  std::size_t thread = 0;

  VectorTime as_vector() const { return vt_update({}, clock, thread); }
  bool operator==(const Epoch&) const = default;
};

inline bool epoch_leq(const Epoch& e, const VectorTime& v) { return e.clock <= v[e.thread]; }

// Either an epoch or a full vector time; the semantic value does not
// depend on which.
class AdaptiveTime {
 public:
  AdaptiveTime() : rep_(Epoch{}) {}
  AdaptiveTime(Epoch e) : rep_(e) {}
  AdaptiveTime(VectorTime v) : rep_(std::move(v)) {}

  bool is_epoch() const { return std::holds_alternative<Epoch>(rep_); }
  const Epoch& epoch() const { return std::get<Epoch>(rep_); }
  const VectorTime& vector() const { return std::get<VectorTime>(rep_); }
  VectorTime& vector() { return std::get<VectorTime>(rep_); }

  VectorTime as_vector() const { return is_epoch() ? epoch().as_vector() : vector(); }

  // Sets component t. On an epoch this only applies when the epoch already
  // belongs to t or is the 0@0 bottom; otherwise the caller must inflate.
  void set_component(std::size_t t, Counter n);

 private:
  std::variant<Epoch, VectorTime> rep_;
};

inline bool adaptive_leq(const AdaptiveTime& a, const VectorTime& v) {
  return a.is_epoch() ? epoch_leq(a.epoch(), v) : vt_leq(a.vector(), v);
}

}  // namespace shb

#endif  // SHB_VCLOCK_HPP
