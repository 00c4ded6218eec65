// include/segaw/core/types.h

// Copyright 2026  segaw authors

// See ../../../COPYING for clarification regarding multiple authors
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

#pragma once

#include <string>
#include <vector>

#include "segaw/core/matrix.h"

namespace segaw {

// Acoustic features of one utterance, T frames x d dims.
struct FeatureMatrix {
  std::string id;
  RowMatrix frames;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int dim() const { return static_cast<int>(frames.cols()); }
};

// Frames [begin, end) in 0-based indexing, i.e. frames begin+1..end in the
// 1-based convention used by boundary lists.
struct Segment {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin; }
  bool operator==(const Segment&) const = default;
};

// Partition of an utterance into contiguous segments, stored as segment end
// frames in 1-based indexing.  An end frame equals the cumulative length of
// the segments up to and including it, so the last end is always T.
class BoundarySet {
 public:
  BoundarySet() = default;

  // ends must be strictly increasing, within [1, T], and finish at T.
  static BoundarySet from_ends(std::vector<int> ends, int num_frames);
  // Adds the utterance-final frame. Values must be strictly increasing in
  // [1, T]; a trailing T is accepted.
  static BoundarySet from_interior(const std::vector<int>& boundaries,
                                   int num_frames);
  static BoundarySet from_lengths(const std::vector<int>& lengths);
  static BoundarySet whole(int num_frames) { return from_ends({num_frames}, num_frames); }

  int num_frames() const { return num_frames_; }
  int num_segments() const { return static_cast<int>(ends_.size()); }
  const std::vector<int>& ends() const { return ends_; }
  // End frames excluding the utterance-final frame T.
  std::vector<int> interior() const;
  Segment segment(int n) const;
  std::vector<Segment> segments() const;

  bool operator==(const BoundarySet&) const = default;

 private:
  std::vector<int> ends_;
  int num_frames_ = 0;
};

}  // namespace segaw
