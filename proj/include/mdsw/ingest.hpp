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

#include <array>
#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdsw/csv.hpp"
#include "mdsw/record.hpp"
#include "mdsw/schema.hpp"
#include "mdsw/text.hpp"
#include "mdsw/zip.hpp"

namespace mdsw {

enum class EncodingPolicy : std::uint8_t { Utf8, Gbk, AutoDetect };

bool encoding_policy_from_name(std::string_view name, EncodingPolicy& out);
const char* encoding_policy_name(EncodingPolicy p);

struct IngestOptions {
  char delimiter = ',';
  EncodingPolicy encoding = EncodingPolicy::AutoDetect;
};

struct IngestStats {
  std::uint64_t rows_read = 0;
  std::uint64_t rows_emitted = 0;
  std::uint64_t rows_skipped_malformed = 0;
  std::map<std::string, std::uint64_t> per_error_counts;
  double elapsed_seconds = 0;

  void merge(const IngestStats& other);
  bool accounting_holds() const {
    return rows_read == rows_emitted + rows_skipped_malformed;
  }
};

/// Fields a SchemaMap can bind. The first five mirror TextField and are
/// stored normalized; record_id stays verbatim (it is an opaque key) and the
/// two structured identifiers are normalized so width-folded digits parse.
enum class BoundField : std::uint8_t {
  ProductName = 0,
  GenericName = 1,
  Description = 2,
  Manufacturer = 3,
  Region = 4,
  ClassificationCode = 5,
  RegistrationNumber = 6,
  RecordId = 7,
};
inline constexpr std::size_t kBoundFieldCount = 8;

const char* bound_field_name(BoundField f);

/// Column layout of one archive member, fixed by its header row.
struct MemberShape {
  std::string member_name;
  std::vector<std::string> headers;                    // raw header cells
  std::array<int, kBoundFieldCount> field_cols;        // -1 when unbound
  std::vector<int> extra_cols;
  std::size_t column_count = 0;
};

/// Resolves a header row against the schema. Throws Error(HeaderMismatch)
/// when a required binding has no matching column.
MemberShape bind_member_header(const std::vector<std::string_view>& header_fields,
                               const SchemaMap& schema, const std::string& member_name);

/// Turns raw CSV fields into a RecordView. Owns the normalization buffers,
/// so each concurrent consumer needs its own binder; views stay valid until
/// the next bind() call.
class RowBinder {
 public:
  explicit RowBinder(const MemberShape* shape = nullptr) : shape_(shape) {}
  void set_shape(const MemberShape* shape) { shape_ = shape; }

  /// Returns false when the field count does not match the member header
  /// (the row is malformed). `undecodable_fields` counts bound fields that
  /// contained invalid UTF-8 (kept verbatim).
  bool bind(const std::vector<std::string_view>& fields, std::uint64_t ordinal, RecordView& out,
            std::uint64_t& undecodable_fields);

 private:
  const MemberShape* shape_;
  std::array<std::string, kBoundFieldCount> norm_;
  std::vector<std::pair<std::string_view, std::string_view>> extra_;
  std::string row_key_buf_;
};

/// Decoded byte stream for one archive member under an encoding policy.
class MemberTextStream {
 public:
  MemberTextStream(ZipReader& zip, const ZipEntry& entry, EncodingPolicy policy);

  std::size_t read(char* dst, std::size_t cap);

  EncodingPolicy effective_encoding() const { return effective_; }
  std::uint64_t undecodable_bytes() const;

  /// Strips U+FEFF once at the very start of the stream.
  static constexpr std::string_view kBom = "\xEF\xBB\xBF";

 private:
  void probe(ZipReader& zip, const ZipEntry& entry, EncodingPolicy policy);

  std::optional<ZipReader::MemberStream> stream_;
  EncodingPolicy effective_ = EncodingPolicy::Utf8;
  std::optional<text::GbkDecoder> gbk_;
  std::string decoded_;
  std::size_t decoded_pos_ = 0;
  std::string rawbuf_;
  bool at_start_ = true;
  bool raw_eof_ = false;
};

/// Streams DeviceRecord values out of a registry dump archive: members in
/// name order, header row per member, malformed rows skipped and counted.
class DatasetReader {
 public:
  DatasetReader(const std::string& path, const SchemaMap& schema, IngestOptions options = {});
  ~DatasetReader();

  /// Views stay valid until the next call. Returns false at end of archive.
  bool next(RecordView& out);

  /// Convenience: owning copy.
  std::optional<DeviceRecord> next_record();

  const IngestStats& stats() const { return stats_; }

 private:
  bool advance_member();

  std::unique_ptr<ZipReader> zip_;
  IngestOptions options_;
  const SchemaMap* schema_;
  std::size_t member_index_ = 0;
  std::optional<MemberTextStream> text_stream_;
  std::optional<CsvReader> csv_;
  std::unique_ptr<MemberShape> shape_;
  RowBinder binder_;
  std::vector<std::string_view> fields_;
  std::uint64_t ordinal_ = 0;
  IngestStats stats_;
  std::chrono::steady_clock::time_point start_;
  bool finished_ = false;
};

}  // namespace mdsw
