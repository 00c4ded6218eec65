// include/segaw/io/binary.h

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

#include <cstdint>
#include <string>
#include <vector>

namespace segaw {

// Little-endian encoder for the shared binary container.
class ByteWriter {
 public:
  void tag(const char (&magic)[5]);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void str(const std::string& s);
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Matching decoder.  Every read past the end throws FormatError naming the
// byte offset; what names the file in messages.
class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, std::string what);
  // Checks magic and version.
  void header(const char (&magic)[5], std::uint32_t version);
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::string str();
  // Throws unless n more bytes are available.
  void need(std::size_t n, const std::string& field);
  std::size_t offset() const { return at_; }
  bool done() const { return at_ == bytes_.size(); }
  // Throws on trailing bytes.
  void finish();

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string what_;
  std::size_t at_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);

// Writes to a temporary sibling and renames it over path.
void atomic_write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
void atomic_write_file(const std::string& path, const std::string& text);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes);

}  // namespace segaw
