// src/core/types.cc

// Copyright 2026  segaw authors

// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "segaw/core/types.h"

#include <sstream>

namespace segaw {

BoundarySet BoundarySet::from_ends(std::vector<int> ends, int num_frames) {
  if (num_frames < 1) throw InputError("BoundarySet: utterance has no frames");
  if (ends.empty() || ends.back() != num_frames)
    throw InputError("BoundarySet: last segment must end at frame T");
  int prev = 0;
  for (int e : ends) {
    if (e <= prev || e > num_frames) {
      std::ostringstream os;
      os << "BoundarySet: end frame " << e
         << " is not strictly increasing within [1, " << num_frames << "]";
      throw InputError(os.str());
    }
    prev = e;
  }
  BoundarySet b;
  b.ends_ = std::move(ends);
  b.num_frames_ = num_frames;
  return b;
}

BoundarySet BoundarySet::from_interior(const std::vector<int>& boundaries,
                                       int num_frames) {
  std::vector<int> ends = boundaries;
  if (ends.empty() || ends.back() != num_frames) ends.push_back(num_frames);
  return from_ends(std::move(ends), num_frames);
}

BoundarySet BoundarySet::from_lengths(const std::vector<int>& lengths) {
  std::vector<int> ends;
  int total = 0;
  for (int len : lengths) {
    if (len < 1) throw InputError("BoundarySet: segment length must be >= 1");
    total += len;
    ends.push_back(total);
  }
  return from_ends(std::move(ends), total);
}

std::vector<int> BoundarySet::interior() const {
  if (ends_.empty()) return {};
  return std::vector<int>(ends_.begin(), ends_.end() - 1);
}

Segment BoundarySet::segment(int n) const {
  if (n < 0 || n >= num_segments())
    throw InputError("BoundarySet: segment index out of range");
  return Segment{n == 0 ? 0 : ends_[n - 1], ends_[n]};
}

std::vector<Segment> BoundarySet::segments() const {
  std::vector<Segment> out;
  out.reserve(ends_.size());
  for (int n = 0; n < num_segments(); ++n) out.push_back(segment(n));
  return out;
}

}  // namespace segaw
