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

#ifndef SHB_EPOCH_SHB_HPP
#define SHB_EPOCH_SHB_HPP

#include <cstddef>
#include <vector>

#include "shb/detectors.hpp"
#include "shb/trace.hpp"
#include "shb/vclock.hpp"

namespace shb {

// SHB detection with adaptive access histories. The write history is an
// epoch exactly when the last write dominates every earlier write to the
// variable; the read history starts as an epoch and, once inflated to a
// vector, stays one. Thread, lock and last-write clocks are full vectors.
class EpochDetectorState {
 public:
  EpochDetectorState(std::size_t threads, std::size_t locks, std::size_t vars);
  explicit EpochDetectorState(const Trace& trace)
      : EpochDetectorState(trace.thread_count(), trace.lock_count(), trace.var_count()) {}

  void step(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp = nullptr);

  void read(const Event& e, std::vector<RaceWarning>& out);
  void write(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp = nullptr);

  const VectorTime& thread_clock(ThreadId t) const { return clocks_[t.value]; }
  const VectorTime& last_write_clock(VarId x) const { return last_write_[x.value]; }
  const AdaptiveTime& read_history(VarId x) const { return reads_[x.value]; }
  const AdaptiveTime& write_history(VarId x) const { return writes_[x.value]; }

 private:
  std::vector<VectorTime> clocks_;
  std::vector<VectorTime> locks_;
  std::vector<VectorTime> last_write_;
  std::vector<Epoch> last_write_epoch_;
  std::vector<AdaptiveTime> reads_;
  std::vector<AdaptiveTime> writes_;
};

std::vector<RaceWarning> epoch_read(EpochDetectorState& state, const Event& e);
std::vector<RaceWarning> epoch_write(EpochDetectorState& state, const Event& e);

DetectorOutput run_epoch_detector(const Trace& trace, bool record_timestamps = false);

}  // namespace shb

#endif  // SHB_EPOCH_SHB_HPP
