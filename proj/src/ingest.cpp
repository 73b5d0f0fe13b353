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

#include "mdsw/ingest.hpp"

#include <algorithm>
#include <cstring>

namespace mdsw {

bool encoding_policy_from_name(std::string_view name, EncodingPolicy& out) {
  if (name == "utf8" || name == "utf-8") out = EncodingPolicy::Utf8;
  else if (name == "gbk") out = EncodingPolicy::Gbk;
  else if (name == "auto" || name == "autodetect") out = EncodingPolicy::AutoDetect;
  else return false;
  return true;
}

const char* encoding_policy_name(EncodingPolicy p) {
  switch (p) {
    case EncodingPolicy::Utf8: return "utf8";
    case EncodingPolicy::Gbk: return "gbk";
    case EncodingPolicy::AutoDetect: return "auto";
  }
  return "?";
}

void IngestStats::merge(const IngestStats& other) {
  rows_read += other.rows_read;
  rows_emitted += other.rows_emitted;
  rows_skipped_malformed += other.rows_skipped_malformed;
  for (const auto& [k, v] : other.per_error_counts) per_error_counts[k] += v;
  elapsed_seconds += other.elapsed_seconds;
}

const char* bound_field_name(BoundField f) {
  switch (f) {
    case BoundField::ProductName: return "product_name";
    case BoundField::GenericName: return "generic_name";
    case BoundField::Description: return "description";
    case BoundField::Manufacturer: return "manufacturer";
    case BoundField::Region: return "region";
    case BoundField::ClassificationCode: return "classification_code";
    case BoundField::RegistrationNumber: return "registration_number";
    case BoundField::RecordId: return "record_id";
  }
  return "?";
}

MemberShape bind_member_header(const std::vector<std::string_view>& header_fields,
                               const SchemaMap& schema, const std::string& member_name) {
  MemberShape shape;
  shape.member_name = member_name;
  shape.column_count = header_fields.size();
  shape.field_cols.fill(-1);

  std::vector<std::string> normalized_headers;
  normalized_headers.reserve(header_fields.size());
  for (std::size_t i = 0; i < header_fields.size(); ++i) {
    std::string_view cell = header_fields[i];
    if (i == 0 && cell.substr(0, MemberTextStream::kBom.size()) == MemberTextStream::kBom) {
      cell.remove_prefix(MemberTextStream::kBom.size());
    }
    cell = text::trim(cell);
    shape.headers.emplace_back(cell);
    normalized_headers.push_back(text::normalize(cell));
  }

  auto find_col = [&](std::string_view header) -> int {
    std::string want = text::normalize(text::trim(header));
    for (std::size_t i = 0; i < normalized_headers.size(); ++i) {
      if (normalized_headers[i] == want) return static_cast<int>(i);
    }
    return -1;
  };

  static const std::pair<BoundField, const char*> kFields[] = {
      {BoundField::ProductName, "product_name"},
      {BoundField::GenericName, "generic_name"},
      {BoundField::Description, "description"},
      {BoundField::Manufacturer, "manufacturer"},
      {BoundField::Region, "region"},
      {BoundField::ClassificationCode, "classification_code"},
      {BoundField::RegistrationNumber, "registration_number"},
      {BoundField::RecordId, "record_id"},
  };

  std::string missing;
  for (const auto& [field, name] : kFields) {
    std::string_view header = schema.header_for(name);
    if (header.empty()) continue;  // unbound in the schema
    int col = find_col(header);
    if (col >= 0) {
      shape.field_cols[static_cast<std::size_t>(field)] = col;
    } else if (schema.required().count(name) > 0) {
      if (!missing.empty()) missing += ", ";
      missing += name;
      missing += " (column '" + std::string(header) + "')";
    }
  }
  if (!missing.empty()) {
    fail(Errc::HeaderMismatch,
         "member '" + member_name + "': required columns missing: " + missing);
  }
  for (std::size_t i = 0; i < shape.column_count; ++i) {
    bool bound = false;
    for (int c : shape.field_cols) {
      if (c == static_cast<int>(i)) {
        bound = true;
        break;
      }
    }
    if (!bound) shape.extra_cols.push_back(static_cast<int>(i));
  }
  return shape;
}

bool RowBinder::bind(const std::vector<std::string_view>& fields, std::uint64_t ordinal,
                     RecordView& out, std::uint64_t& undecodable_fields) {
  const MemberShape& shape = *shape_;
  if (fields.size() != shape.column_count) return false;

  auto norm_field = [&](BoundField f) -> std::string_view {
    int col = shape.field_cols[static_cast<std::size_t>(f)];
    std::string& buf = norm_[static_cast<std::size_t>(f)];
    buf.clear();
    if (col < 0) return {};
    if (!text::normalize_append(fields[static_cast<std::size_t>(col)], buf)) {
      ++undecodable_fields;
    }
    return buf;
  };

  out.product_name = norm_field(BoundField::ProductName);
  out.generic_name = norm_field(BoundField::GenericName);
  out.description = norm_field(BoundField::Description);
  out.manufacturer = norm_field(BoundField::Manufacturer);
  out.region_raw = norm_field(BoundField::Region);
  out.classification_code_raw = norm_field(BoundField::ClassificationCode);
  out.registration_number_raw = norm_field(BoundField::RegistrationNumber);

  int id_col = shape.field_cols[static_cast<std::size_t>(BoundField::RecordId)];
  std::string_view id =
      id_col >= 0 ? text::trim(fields[static_cast<std::size_t>(id_col)]) : std::string_view{};
  if (id.empty()) {
    row_key_buf_ = "row";
    row_key_buf_ += std::to_string(ordinal);
    id = row_key_buf_;
  }
  out.record_id = id;

  extra_.clear();
  for (int c : shape.extra_cols) {
    extra_.emplace_back(shape.headers[static_cast<std::size_t>(c)],
                        fields[static_cast<std::size_t>(c)]);
  }
  out.extra = extra_;
  out.row_ordinal = ordinal;
  return true;
}

MemberTextStream::MemberTextStream(ZipReader& zip, const ZipEntry& entry, EncodingPolicy policy) {
  probe(zip, entry, policy);
}

void MemberTextStream::probe(ZipReader& zip, const ZipEntry& entry, EncodingPolicy policy) {
  if (policy == EncodingPolicy::AutoDetect) {
    auto probe_stream = zip.open(entry);
    std::string head(65536, '\0');
    std::size_t got = 0;
    while (got < head.size()) {
      std::size_t n = probe_stream.read(head.data() + got, head.size() - got);
      if (n == 0) break;
      got += n;
    }
    bool saw_invalid = false;
    text::utf8_valid_prefix(std::string_view(head.data(), got), &saw_invalid);
    effective_ = saw_invalid ? EncodingPolicy::Gbk : EncodingPolicy::Utf8;
  } else {
    effective_ = policy;
  }
  if (effective_ == EncodingPolicy::Gbk) gbk_.emplace();
  rawbuf_.resize(1 << 16);
  stream_.emplace(zip.open(entry));
}

std::uint64_t MemberTextStream::undecodable_bytes() const {
  return gbk_ ? gbk_->bad_bytes() : 0;
}

std::size_t MemberTextStream::read(char* dst, std::size_t cap) {
  if (effective_ == EncodingPolicy::Utf8) {
    std::size_t n = stream_->read(dst, cap);
    if (at_start_ && n >= kBom.size() && std::string_view(dst, kBom.size()) == kBom) {
      std::memmove(dst, dst + kBom.size(), n - kBom.size());
      n -= kBom.size();
    }
    if (n > 0) at_start_ = false;
    return n;
  }
  // GBK: refill the decode buffer, then serve from it
  while (decoded_pos_ == decoded_.size()) {
    if (raw_eof_) return 0;
    decoded_.clear();
    decoded_pos_ = 0;
    std::size_t n = stream_->read(rawbuf_.data(), rawbuf_.size());
    if (n == 0) {
      raw_eof_ = true;
      gbk_->convert({}, decoded_, /*flush=*/true);
    } else {
      gbk_->convert(std::string_view(rawbuf_.data(), n), decoded_);
    }
    if (at_start_ && decoded_.size() >= kBom.size() &&
        std::string_view(decoded_).substr(0, kBom.size()) == kBom) {
      decoded_.erase(0, kBom.size());
    }
    if (!decoded_.empty()) at_start_ = false;
  }
  std::size_t take = std::min(cap, decoded_.size() - decoded_pos_);
  std::memcpy(dst, decoded_.data() + decoded_pos_, take);
  decoded_pos_ += take;
  return take;
}

DatasetReader::DatasetReader(const std::string& path, const SchemaMap& schema,
                             IngestOptions options)
    : options_(options), schema_(&schema), start_(std::chrono::steady_clock::now()) {
  zip_ = std::make_unique<ZipReader>(path);
  if (zip_->entries().empty()) {
    fail(Errc::ArchiveUnreadable, "archive has no members: " + path);
  }
}

DatasetReader::~DatasetReader() = default;

bool DatasetReader::advance_member() {
  while (member_index_ < zip_->entries().size()) {
    const ZipEntry& entry = zip_->entries()[member_index_++];
    text_stream_.emplace(*zip_, entry, options_.encoding);
    MemberTextStream* ts = &*text_stream_;
    csv_.emplace([ts](char* dst, std::size_t cap) { return ts->read(dst, cap); },
                 options_.delimiter);
    if (!csv_->next_row(fields_)) continue;  // empty member
    // header row must decode cleanly
    for (std::string_view cell : fields_) {
      if (!text::utf8_valid(cell)) {
        fail(Errc::EncodingError,
             "member '" + entry.name + "': header row is not valid text under policy " +
                 encoding_policy_name(text_stream_->effective_encoding()));
      }
    }
    shape_ = std::make_unique<MemberShape>(bind_member_header(fields_, *schema_, entry.name));
    binder_.set_shape(shape_.get());
    return true;
  }
  return false;
}

bool DatasetReader::next(RecordView& out) {
  while (true) {
    if (!csv_) {
      if (finished_ || !advance_member()) {
        if (!finished_) {
          stats_.elapsed_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
          finished_ = true;
        }
        return false;
      }
    }
    if (!csv_->next_row(fields_)) {
      if (text_stream_ && text_stream_->undecodable_bytes() > 0) {
        stats_.per_error_counts["undecodable_bytes"] += text_stream_->undecodable_bytes();
      }
      csv_.reset();
      text_stream_.reset();
      continue;
    }
    ++stats_.rows_read;
    std::uint64_t undecodable = 0;
    if (!binder_.bind(fields_, ordinal_, out, undecodable)) {
      ++stats_.rows_skipped_malformed;
      ++stats_.per_error_counts["field_count"];
      ++ordinal_;
      continue;
    }
    if (undecodable > 0) stats_.per_error_counts["undecodable_fields"] += undecodable;
    ++stats_.rows_emitted;
    ++ordinal_;
    return true;
  }
}

std::optional<DeviceRecord> DatasetReader::next_record() {
  RecordView v;
  if (!next(v)) return std::nullopt;
  return DeviceRecord::copy_of(v);
}

}  // namespace mdsw
