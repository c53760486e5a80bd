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

#include "shb/vclock.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace shb {

bool VectorTime::leq(const VectorTime& other) const {
  const std::size_t common = std::min(c_.size(), other.c_.size());
  for (std::size_t t = 0; t < common; ++t) {
    if (c_[t] > other.c_[t]) return false;
  }
  for (std::size_t t = common; t < c_.size(); ++t) {
    if (c_[t] != 0) return false;
  }
  return true;
}

void VectorTime::join_with(const VectorTime& other) {
  grow(other.c_.size());
  for (std::size_t t = 0; t < other.c_.size(); ++t) c_[t] = std::max(c_[t], other.c_[t]);
}

bool VectorTime::operator==(const VectorTime& other) const { return leq(other) && other.leq(*this); }

std::ostream& operator<<(std::ostream& out, const VectorTime& v) {
  out << '[';
  for (std::size_t t = 0; t < v.width(); ++t) {
    if (t) out << ',';
    out << v[t];
  }
  return out << ']';
}

void AdaptiveTime::set_component(std::size_t t, Counter n) {
  if (auto* e = std::get_if<Epoch>(&rep_)) {
    if (e->thread != t && e->clock != 0) {
      throw std::logic_error("set_component on a foreign epoch requires inflation");
    }
    *e = Epoch{n, t};
    return;
  }
  std::get<VectorTime>(rep_).set(t, n);
}

}  // namespace shb
