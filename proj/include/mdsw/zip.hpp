// Copyright 2026 the mdsw authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mdsw {

// Minimal zip container support: methods 0 (stored) and 8 (deflate), files
// up to 4 GiB per member. Reading goes through the central directory, so
// archives written with streaming data descriptors work. No zip64.

struct ZipEntry {
  std::string name;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint32_t crc32 = 0;
  std::uint16_t method = 0;
  std::uint64_t local_header_offset = 0;
};

class ZipReader {
 public:
  /// Throws Error(ArchiveUnreadable) when the file is missing or not a
  /// readable zip.
  explicit ZipReader(const std::string& path);
  ~ZipReader();
  ZipReader(const ZipReader&) = delete;
  ZipReader& operator=(const ZipReader&) = delete;

  /// Entries sorted by name (the member concatenation order).
  const std::vector<ZipEntry>& entries() const { return entries_; }

  /// Streaming decompressor for one member. Only one stream per reader may
  /// be active at a time (they share the file handle).
  class MemberStream {
   public:
    ~MemberStream();
    MemberStream(MemberStream&&) noexcept;
    MemberStream& operator=(MemberStream&&) = delete;

    /// Returns decompressed bytes, 0 at end of member. Throws on CRC or
    /// stream corruption.
    std::size_t read(char* dst, std::size_t cap);

   private:
    friend class ZipReader;
    MemberStream(ZipReader* owner, const ZipEntry& entry);
    struct Impl;
    std::unique_ptr<Impl> impl_;
  };

  MemberStream open(const ZipEntry& entry);

 private:
  friend class MemberStream;
  std::FILE* file_ = nullptr;
  std::string path_;
  std::vector<ZipEntry> entries_;
};

class ZipWriter {
 public:
  /// Throws Error(IoError) when the file cannot be created.
  explicit ZipWriter(const std::string& path);
  ~ZipWriter();
  ZipWriter(const ZipWriter&) = delete;
  ZipWriter& operator=(const ZipWriter&) = delete;

  /// Starts a member. `deflate` selects method 8 at the given zlib level;
  /// otherwise the member is stored.
  void begin_member(const std::string& name, bool deflate = true, int level = 1);
  void write(std::string_view data);
  void end_member();

  /// Writes the central directory and closes the file. Must be called;
  /// the destructor only releases resources.
  void finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mdsw
