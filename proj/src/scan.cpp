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

#include "mdsw/scan.hpp"

#include <sys/resource.h>

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mdsw/csv.hpp"
#include "mdsw/naive_eval.hpp"
#include "mdsw/text.hpp"

namespace mdsw {

namespace fs = std::filesystem;

const char* mdsw_version_string() { return "0.1.0"; }

std::uint64_t peak_rss_bytes() {
  struct rusage ru {};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<std::uint64_t>(ru.ru_maxrss) * 1024;  // ru_maxrss is KiB on Linux
}

namespace {

constexpr std::size_t kBlockBytes = 4u << 20;

struct LoadedInputs {
  SchemaMap schema;
  PipelineSpec spec;
  KeywordLexicon keywords;
  RulePipeline pipeline;
  LabelLexicon technique;
  LabelLexicon specialty;
  LabelLexicon function;
  ExclusionList exclusions;
  Sidecar sidecar;
  AnnotationContext ctx;
  std::map<std::string, std::string> asset_fingerprints;
};

LoadedInputs load_inputs(const ScanOptions& o) {
  LoadedInputs in{
      o.schema_path.empty() ? SchemaMap::builtin_default() : SchemaMap::load_file(o.schema_path),
      {},
      o.keyword_lexicon_path.empty() ? KeywordLexicon::builtin()
                                     : KeywordLexicon::load_file(o.keyword_lexicon_path),
      {},
      o.technique_lexicon_path.empty() ? LabelLexicon::builtin_technique()
                                       : LabelLexicon::load_file(o.technique_lexicon_path),
      o.specialty_lexicon_path.empty() ? LabelLexicon::builtin_specialty()
                                       : LabelLexicon::load_file(o.specialty_lexicon_path),
      o.function_lexicon_path.empty() ? LabelLexicon::builtin_function()
                                      : LabelLexicon::load_file(o.function_lexicon_path),
      o.exclusions_path.empty() ? ExclusionList::empty()
                                : ExclusionList::load_file(o.exclusions_path),
      o.sidecar_path.empty() ? Sidecar::empty() : Sidecar::load_file(o.sidecar_path),
      {},
      {}};
  if (!o.pipeline_json.empty()) {
    in.spec = PipelineSpec::from_json_text(o.pipeline_json, "inline pipeline");
  } else if (!o.pipeline_path.empty()) {
    in.spec = PipelineSpec::load_file(o.pipeline_path);
  } else {
    in.spec = PipelineSpec::builtin_paper();
  }
  in.pipeline = RulePipeline::compile(in.spec, in.keywords);
  in.ctx = AnnotationContext::for_pipeline(in.pipeline);
  in.ctx.technique = &in.technique;
  in.ctx.specialty = &in.specialty;
  in.ctx.function = &in.function;
  in.asset_fingerprints["keyword_lexicon"] = in.keywords.fingerprint();
  in.asset_fingerprints["technique_lexicon"] = in.technique.fingerprint();
  in.asset_fingerprints["specialty_lexicon"] = in.specialty.fingerprint();
  in.asset_fingerprints["function_lexicon"] = in.function.fingerprint();
  in.asset_fingerprints["exclusions"] = in.exclusions.fingerprint();
  in.asset_fingerprints["sidecar"] = in.sidecar.fingerprint();
  return in;
}

struct Block {
  std::uint64_t index = 0;
  std::string bytes;
  const MemberShape* shape = nullptr;
  std::uint64_t first_ordinal = 0;
  std::uint64_t row_count = 0;
};

struct BlockResult {
  std::uint64_t index = 0;
  IngestStats stats;
  std::vector<std::uint64_t> stage_counts;
  std::vector<AnnotatedDevice> members;
  std::vector<std::pair<std::size_t, std::string>> removals;  // exclusion idx, record id
};

// Bounded MPMC queue; close() releases all waiters.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t cap) : cap_(cap) {}

  bool push(T item) {
    std::unique_lock lock(mu_);
    cv_push_.wait(lock, [&] { return closed_ || q_.size() < cap_; });
    if (closed_) return false;
    q_.push_back(std::move(item));
    cv_pop_.notify_one();
    return true;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    cv_pop_.wait(lock, [&] { return closed_ || !q_.empty(); });
    if (q_.empty()) return std::nullopt;
    T item = std::move(q_.front());
    q_.pop_front();
    cv_push_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_push_.notify_all();
    cv_pop_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_push_, cv_pop_;
  std::deque<T> q_;
  std::size_t cap_;
  bool closed_ = false;
};

// Last unquoted-LF boundary and the number of rows ending at or before it.
struct BlockScan {
  std::size_t boundary = std::string::npos;
  std::uint64_t rows = 0;
};

// First unquoted LF; npos when none. Parity is updated up to the boundary
// (or over all of `data` when there is none).
std::size_t first_row_boundary(std::string_view data, bool& in_quotes) {
  bool q = in_quotes;
  std::size_t i = 0;
  while (i < data.size()) {
    if (q) {
      const char* p = static_cast<const char*>(std::memchr(data.data() + i, '"', data.size() - i));
      if (!p) {
        i = data.size();
        break;
      }
      i = static_cast<std::size_t>(p - data.data()) + 1;
      q = false;
    } else {
      const char* pq = static_cast<const char*>(std::memchr(data.data() + i, '"', data.size() - i));
      const char* pn = static_cast<const char*>(std::memchr(data.data() + i, '\n', data.size() - i));
      if (pn && (!pq || pn < pq)) {
        in_quotes = q;
        return static_cast<std::size_t>(pn - data.data());
      }
      if (!pq) {
        i = data.size();
        break;
      }
      i = static_cast<std::size_t>(pq - data.data()) + 1;
      q = true;
    }
  }
  in_quotes = q;
  return std::string_view::npos;
}

BlockScan scan_rows(std::string_view data, bool& in_quotes) {
  BlockScan out;
  bool q = in_quotes;
  std::size_t i = 0;
  std::uint64_t rows_at_boundary = 0;
  while (i < data.size()) {
    if (q) {
      const char* p = static_cast<const char*>(std::memchr(data.data() + i, '"', data.size() - i));
      if (!p) {
        i = data.size();
        break;
      }
      i = static_cast<std::size_t>(p - data.data()) + 1;
      q = false;
    } else {
      const char* pq = static_cast<const char*>(std::memchr(data.data() + i, '"', data.size() - i));
      const char* pn = static_cast<const char*>(std::memchr(data.data() + i, '\n', data.size() - i));
      if (!pq && !pn) {
        i = data.size();
        break;
      }
      if (pn && (!pq || pn < pq)) {
        ++rows_at_boundary;
        out.boundary = static_cast<std::size_t>(pn - data.data());
        i = out.boundary + 1;
      } else {
        i = static_cast<std::size_t>(pq - data.data()) + 1;
        q = true;
      }
    }
  }
  in_quotes = q;
  out.rows = rows_at_boundary;
  return out;
}

struct WorkerShared {
  const RulePipeline* pipeline;
  const AnnotationContext* ctx;
  const ExclusionList* exclusions;
  char delimiter;
  bool collect_provenance;
  int mdsw_stage;
};

BlockResult process_block(const Block& block, const WorkerShared& shared) {
  BlockResult result;
  result.index = block.index;
  result.stage_counts.assign(shared.pipeline->stage_count(), 0);

  std::size_t served = 0;
  CsvReader csv(
      [&](char* dst, std::size_t cap) {
        std::size_t left = block.bytes.size() - served;
        std::size_t take = std::min(cap, left);
        std::memcpy(dst, block.bytes.data() + served, take);
        served += take;
        return take;
      },
      shared.delimiter);

  RowBinder binder(block.shape);
  RulePipeline::EvalScratch scratch;
  std::vector<std::string_view> fields;
  std::vector<StageProvenance> prov;
  RecordView view;
  std::uint64_t ordinal = block.first_ordinal;

  while (csv.next_row(fields)) {
    ++result.stats.rows_read;
    std::uint64_t undecodable = 0;
    if (!binder.bind(fields, ordinal, view, undecodable)) {
      ++result.stats.rows_skipped_malformed;
      ++result.stats.per_error_counts["field_count"];
      ++ordinal;
      continue;
    }
    if (undecodable > 0) result.stats.per_error_counts["undecodable_fields"] += undecodable;
    ++result.stats.rows_emitted;

    prov.clear();
    std::uint32_t bits = shared.pipeline->evaluate(
        view, scratch, shared.collect_provenance ? &prov : nullptr);
    if (bits != 0) {
      for (std::size_t i = 0; i < result.stage_counts.size(); ++i) {
        if ((bits >> i) & 1) ++result.stage_counts[i];
      }
      bool excluded = false;
      if (shared.ctx->aimd_stage >= 0 && ((bits >> shared.ctx->aimd_stage) & 1)) {
        const ExclusionEntry* hit =
            shared.exclusions->lookup(view.registration_number_raw, view.record_id);
        if (hit) {
          excluded = true;
          std::size_t entry_idx =
              static_cast<std::size_t>(hit - shared.exclusions->entries().data());
          result.removals.emplace_back(entry_idx, std::string(view.record_id));
        }
      }
      AnnotatedDevice device = annotate_device(DeviceRecord::copy_of(view), bits,
                                               std::move(prov), excluded, *shared.ctx);
      prov = {};
      result.members.push_back(std::move(device));
    }
    ++ordinal;
  }
  return result;
}

std::string iso8601_now_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_members_csv(const fs::path& dir, const ScanResult& result,
                       const std::vector<std::string>& stage_names) {
  std::string csv;
  csv += "record_id,row_ordinal,stage,provenance\n";
  std::string line;
  for (const auto& d : result.devices) {
    for (const auto& sp : d.provenance) {
      line.clear();
      csv_append_field(line, d.record.record_id, ',');
      line.push_back(',');
      line += std::to_string(d.record.row_ordinal);
      line.push_back(',');
      csv_append_field(line, stage_names[sp.stage_index], ',');
      line.push_back(',');
      std::string items;
      for (std::size_t i = 0; i < sp.items.size(); ++i) {
        if (i) items += "; ";
        items += sp.items[i].to_string();
      }
      csv_append_field(line, items, ',');
      line.push_back('\n');
      csv += line;
    }
  }
  std::ofstream out(dir / "matches.csv", std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot create matches.csv");
  out << csv;
}

void write_annotated_csv(const fs::path& dir, const ScanResult& result) {
  std::string csv;
  csv +=
      "record_id,row_ordinal,software_kind,ai_candidate,ai_final,technique,specialty,"
      "function_category,subtype,pathway,origin,scope,device_class,year,category,"
      "classification_code,registration_number\n";
  std::string line;
  for (const auto& d : result.devices) {
    line.clear();
    csv_append_field(line, d.record.record_id, ',');
    line += "," + std::to_string(d.record.row_ordinal);
    line += ",";
    line += software_kind_name(d.software_kind);
    line += d.ai_candidate ? ",1" : ",0";
    line += d.ai_flag ? ",1" : ",0";
    line += ",";
    line += technique_name(d.technique);
    line += ",";
    csv_append_field(line, d.specialty, ',');
    line += ",";
    line += function_category_name(d.function_category);
    line += ",";
    line += d.subtype ? decision_subtype_name(*d.subtype) : "";
    line += ",";
    line += pathway_name(d.pathway);
    line += ",";
    line += d.origin.ok() ? origin_name(d.origin.value.origin) : "undetermined";
    line += ",";
    csv_append_field(line, d.origin.ok() ? d.origin.value.scope : "", ',');
    line += ",";
    line += d.regnum.ok() ? device_class_name(d.regnum.value.device_class) : "";
    line += ",";
    line += d.regnum.ok() ? std::to_string(d.regnum.value.year) : "";
    line += ",";
    line += d.regnum.ok() ? std::to_string(d.regnum.value.category) : "";
    line += ",";
    csv_append_field(line, d.record.classification_code_raw, ',');
    line += ",";
    csv_append_field(line, d.record.registration_number_raw, ',');
    line += "\n";
    csv += line;
  }
  std::ofstream out(dir / "annotated.csv", std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot create annotated.csv");
  out << csv;
}

}  // namespace

ScanResult run_scan(const ScanOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  LoadedInputs in = load_inputs(options);

  int workers = options.workers;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;

  ScanResult result;
  for (std::size_t i = 0; i < in.pipeline.stage_count(); ++i) {
    result.stage_names.push_back(in.pipeline.stage_name(i));
  }
  result.stage_counts.assign(in.pipeline.stage_count(), 0);

  BoundedQueue<Block> work(static_cast<std::size_t>(workers) * 2 + 2);

  std::mutex result_mu;
  std::condition_variable result_cv;
  std::map<std::uint64_t, BlockResult> pending;
  bool producers_done = false;
  bool aborted = false;
  std::exception_ptr error;
  std::mutex error_mu;

  auto record_error = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(error_mu);
      if (!error) error = e;
    }
    work.close();
    {
      std::lock_guard lock(result_mu);
      aborted = true;
    }
    result_cv.notify_all();
  };

  WorkerShared shared{&in.pipeline,
                      &in.ctx,
                      &in.exclusions,
                      options.delimiter,
                      options.collect_provenance,
                      in.pipeline.stage_index("mdsw")};

  // reader: decode members, cut blocks of whole rows, count rows for
  // deterministic ordinals
  IngestStats reader_stats;
  std::deque<std::unique_ptr<MemberShape>> shapes;
  std::mutex shapes_mu;

  std::thread reader([&] {
    try {
      ZipReader zip(options.dataset_path);
      if (zip.entries().empty()) {
        fail(Errc::ArchiveUnreadable, "archive has no members: " + options.dataset_path);
      }
      std::uint64_t ordinal = 0;
      std::uint64_t block_index = 0;
      for (const ZipEntry& entry : zip.entries()) {
        MemberTextStream ts(zip, entry, options.encoding);
        std::string buf;
        buf.reserve(kBlockBytes + 4096);
        bool member_eof = false;
        // header row first
        const MemberShape* shape = nullptr;
        {
          std::string header_buf;
          bool q = false;
          std::size_t header_end = std::string::npos;
          while (header_end == std::string::npos && !member_eof) {
            char chunk[65536];
            std::size_t n = ts.read(chunk, sizeof(chunk));
            if (n == 0) {
              member_eof = true;
              break;
            }
            std::size_t prev = header_buf.size();
            header_buf.append(chunk, n);
            std::size_t hit = first_row_boundary(std::string_view(header_buf).substr(prev), q);
            if (hit != std::string_view::npos) header_end = prev + hit;
            if (header_buf.size() > CsvReader::kMaxRowBytes) {
              fail(Errc::HeaderMismatch, "member '" + entry.name + "': header row too large");
            }
          }
          if (header_buf.empty()) continue;  // empty member
          std::string_view header_line;
          if (header_end == std::string::npos) {
            header_line = header_buf;  // header-only member without newline
          } else {
            header_line = std::string_view(header_buf).substr(0, header_end);
          }
          if (!header_line.empty() && header_line.back() == '\r') {
            header_line.remove_suffix(1);
          }
          std::vector<std::string_view> cells;
          std::string scratch;
          csv_split_row(header_line, options.delimiter, cells, scratch);
          for (std::string_view cell : cells) {
            if (!text::utf8_valid(cell)) {
              fail(Errc::EncodingError, "member '" + entry.name +
                                            "': header row is not valid text under policy " +
                                            encoding_policy_name(ts.effective_encoding()));
            }
          }
          auto owned = std::make_unique<MemberShape>(
              bind_member_header(cells, in.schema, entry.name));
          {
            std::lock_guard lock(shapes_mu);
            shapes.push_back(std::move(owned));
            shape = shapes.back().get();
          }
          if (header_end != std::string::npos) {
            buf.assign(header_buf, header_end + 1, std::string::npos);
          }
        }
        if (!shape) continue;

        bool carry_quote = false;
        while (true) {
          // top up the buffer
          while (buf.size() < kBlockBytes && !member_eof) {
            std::size_t old = buf.size();
            buf.resize(old + 65536);
            std::size_t n = ts.read(buf.data() + old, 65536);
            buf.resize(old + n);
            if (n == 0) member_eof = true;
          }
          if (buf.empty()) break;

          bool q = carry_quote;
          BlockScan s = scan_rows(buf, q);
          std::size_t cut;
          std::uint64_t rows;
          if (member_eof) {
            cut = buf.size();
            rows = s.rows;
            if (s.boundary == std::string::npos || s.boundary + 1 < buf.size()) {
              ++rows;  // final row without trailing newline
            }
            carry_quote = false;
          } else if (s.boundary == std::string::npos) {
            if (buf.size() > CsvReader::kMaxRowBytes) {
              fail(Errc::ParseError, "CSV row exceeds maximum row size");
            }
            continue;  // need more data to close a row
          } else {
            cut = s.boundary + 1;
            rows = s.rows;
            carry_quote = false;  // a block cut always sits just after an unquoted LF
          }

          Block block;
          block.index = block_index++;
          block.bytes.assign(buf, 0, cut);
          block.shape = shape;
          block.first_ordinal = ordinal;
          block.row_count = rows;
          ordinal += rows;
          buf.erase(0, cut);
          if (!work.push(std::move(block))) return;  // queue closed on error
          if (member_eof && buf.empty()) break;
        }
        if (ts.undecodable_bytes() > 0) {
          reader_stats.per_error_counts["undecodable_bytes"] += ts.undecodable_bytes();
        }
      }
      work.close();
    } catch (...) {
      record_error(std::current_exception());
    }
  });

  std::vector<std::thread> pool;
  std::ptrdiff_t active_workers = workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        while (auto block = work.pop()) {
          BlockResult r = process_block(*block, shared);
          {
            std::lock_guard lock(result_mu);
            pending.emplace(r.index, std::move(r));
          }
          result_cv.notify_all();
        }
      } catch (...) {
        record_error(std::current_exception());
      }
      {
        std::lock_guard lock(result_mu);
        if (--active_workers == 0) producers_done = true;
      }
      result_cv.notify_all();
    });
  }

  // ordered merge
  std::vector<std::pair<std::size_t, std::string>> removals;
  std::uint64_t next_index = 0;
  while (true) {
    BlockResult r;
    {
      std::unique_lock lock(result_mu);
      result_cv.wait(lock, [&] {
        return aborted || pending.count(next_index) > 0 ||
               (producers_done && pending.empty());
      });
      if (aborted) break;
      auto it = pending.find(next_index);
      if (it == pending.end()) {
        if (producers_done && pending.empty()) break;
        continue;
      }
      r = std::move(it->second);
      pending.erase(it);
    }
    result.ingest.rows_read += r.stats.rows_read;
    result.ingest.rows_emitted += r.stats.rows_emitted;
    result.ingest.rows_skipped_malformed += r.stats.rows_skipped_malformed;
    for (const auto& [k, v] : r.stats.per_error_counts) result.ingest.per_error_counts[k] += v;
    for (std::size_t i = 0; i < result.stage_counts.size(); ++i) {
      result.stage_counts[i] += r.stage_counts[i];
    }
    for (auto& m : r.members) result.devices.push_back(std::move(m));
    for (auto& rem : r.removals) removals.push_back(std::move(rem));
    ++next_index;
  }

  reader.join();
  for (auto& t : pool) t.join();
  {
    std::lock_guard lock(error_mu);
    if (error) std::rethrow_exception(error);
  }
  for (const auto& [k, v] : reader_stats.per_error_counts) {
    result.ingest.per_error_counts[k] += v;
  }

  // exclusion report
  std::vector<bool> entry_used(in.exclusions.entries().size(), false);
  for (const auto& [idx, record_id] : removals) {
    const ExclusionEntry& e = in.exclusions.entries()[idx];
    result.exclusion_report.removals.push_back({e.key, e.reason, record_id});
    entry_used[idx] = true;
  }
  for (std::size_t i = 0; i < entry_used.size(); ++i) {
    if (!entry_used[i]) {
      result.exclusion_report.stale_entries.push_back(in.exclusions.entries()[i]);
    }
  }

  // sidecar
  result.sidecar_outcome = apply_sidecar(result.devices, in.sidecar);

  // totals
  std::vector<const AnnotatedDevice*> mdsw_set;
  std::vector<AnnotatedDevice> mdsw_copy;  // spans need contiguous values
  for (const auto& d : result.devices) {
    bool in_mdsw = shared.mdsw_stage >= 0 ? ((d.stage_bits >> shared.mdsw_stage) & 1) != 0
                                          : true;
    if (in_mdsw) mdsw_set.push_back(&d);
  }
  mdsw_copy.reserve(mdsw_set.size());
  std::vector<AnnotatedDevice> aimd_copy;
  for (const AnnotatedDevice* d : mdsw_set) mdsw_copy.push_back(*d);
  for (const auto& d : result.devices) {
    if (d.ai_flag) aimd_copy.push_back(d);
  }
  result.mdsw_total = mdsw_copy.size();
  result.aimd_final_total = aimd_copy.size();

  if (options.dedup_by_di) {
    result.stage_distinct_di.assign(result.stage_counts.size(), 0);
    for (std::size_t i = 0; i < result.stage_counts.size(); ++i) {
      std::set<std::string_view> ids;
      for (const auto& d : result.devices) {
        if ((d.stage_bits >> i) & 1) ids.insert(d.record.record_id);
      }
      result.stage_distinct_di[i] = ids.size();
    }
  }

  // audit counters
  AuditTrail audit;
  audit.exclusions_applied = result.exclusion_report.removals;
  audit.exclusions_stale = result.exclusion_report.stale_entries;
  audit.overrides = result.sidecar_outcome.applied;
  audit.sidecar_stale = result.sidecar_outcome.stale;
  for (const auto& d : result.devices) {
    if (d.origin.ok() && d.origin.value.from_fallback) ++audit.origin_fallback_count;
    if (!d.origin.ok()) ++audit.origin_undetermined_count;
    if (d.technique_defaulted) ++audit.technique_defaulted_count;
    if (!d.regnum.ok() && !d.record.registration_number_raw.empty()) {
      ++audit.regnum_parse_failures;
    }
    if (regnum_code_inconsistent(d)) {
      ++audit.regnum_code_inconsistencies;
      if (audit.inconsistent_record_ids.size() < 1000) {
        audit.inconsistent_record_ids.push_back(d.record.record_id);
      }
    }
  }

  // analytics + bundle
  ReportBundle bundle;
  bundle.metadata.tool_version = mdsw_version_string();
  bundle.metadata.dataset_path = options.dataset_path;
  bundle.metadata.dataset_fingerprint = text::file_fingerprint(options.dataset_path);
  bundle.metadata.pipeline_name = in.spec.name;
  bundle.metadata.pipeline_fingerprint = in.spec.fingerprint();
  bundle.metadata.asset_fingerprints = in.asset_fingerprints;
  for (std::size_t i = 0; i < result.stage_names.size(); ++i) {
    bundle.stage_counts.emplace_back(result.stage_names[i], result.stage_counts[i]);
  }
  if (options.dedup_by_di) {
    for (std::size_t i = 0; i < result.stage_names.size(); ++i) {
      bundle.stage_distinct_di.emplace_back(result.stage_names[i],
                                            result.stage_distinct_di[i]);
    }
  }
  bundle.mdsw_total = result.mdsw_total;
  bundle.aimd_final_total = result.aimd_final_total;
  bundle.ingest = result.ingest;

  static const Dim kCross[] = {Dim::Origin, Dim::SoftwareKind, Dim::AiFlag};
  bundle.origin_kind_ai = crosstab(mdsw_copy, kCross);
  bundle.distributions.emplace_back("dist_class_mdsw",
                                    distribution(mdsw_copy, Dim::DeviceClass));
  bundle.distributions.emplace_back("dist_technique_aimd",
                                    distribution(aimd_copy, Dim::Technique));
  bundle.distributions.emplace_back("dist_specialty_aimd",
                                    distribution(aimd_copy, Dim::Specialty));
  bundle.distributions.emplace_back("dist_function_aimd",
                                    distribution(aimd_copy, Dim::FunctionCategory));
  bundle.distributions.emplace_back("dist_pathway_aimd",
                                    distribution(aimd_copy, Dim::Pathway));
  bundle.geo = geo_rollup(mdsw_copy);
  bundle.alluvial = alluvial_flows(aimd_copy);
  bundle.audit = std::move(audit);
  result.bundle = std::move(bundle);

  result.scan_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.ingest.elapsed_seconds = result.scan_seconds;

  if (!options.out_dir.empty()) {
    nlohmann::ordered_json volatile_meta;
    volatile_meta["timestamp_utc"] = iso8601_now_utc();
    volatile_meta["scan_seconds"] = result.scan_seconds;
    volatile_meta["workers"] = workers;
    volatile_meta["dedup_by_di"] = options.dedup_by_di;
    volatile_meta["peak_rss_bytes"] = peak_rss_bytes();
    emit_report(result.bundle, ReportFormat::All, options.out_dir,
                volatile_meta.dump(2) + "\n");
    write_members_csv(options.out_dir, result, result.stage_names);
    write_annotated_csv(options.out_dir, result);
  } else {
    result.bundle.validate();
  }
  return result;
}

VerifyResult verify_dataset(const ScanOptions& options, const std::string& answer_key_path) {
  LoadedInputs in = load_inputs(options);
  VerifyResult out;

  std::map<std::string, std::vector<std::string>> key;
  std::set<std::string> key_seen;
  bool have_key = !answer_key_path.empty();
  if (have_key) key = load_answer_key(answer_key_path);

  IngestOptions ingest_options{options.delimiter, options.encoding};
  DatasetReader reader(options.dataset_path, in.schema, ingest_options);
  RulePipeline::EvalScratch scratch;
  RecordView view;
  while (reader.next(view)) {
    ++out.records;
    std::uint32_t compiled = in.pipeline.evaluate(view, scratch, nullptr);
    std::uint32_t naive = naive_stage_bits(in.spec, in.keywords, view);
    if (compiled != naive) {
      ++out.route_mismatches;
      if (out.samples.size() < 10) {
        out.samples.push_back("record " + std::string(view.record_id) +
                              ": compiled=" + std::to_string(compiled) +
                              " naive=" + std::to_string(naive));
      }
    }
    if (have_key) {
      auto it = key.find(std::string(view.record_id));
      if (it == key.end()) {
        ++out.key_mismatches;
        if (out.samples.size() < 10) {
          out.samples.push_back("record " + std::string(view.record_id) + ": not in key");
        }
      } else {
        key_seen.insert(it->first);
        std::uint32_t key_bits = 0;
        bool unknown_stage = false;
        for (const auto& s : it->second) {
          int idx = in.pipeline.stage_index(s);
          if (idx < 0) unknown_stage = true;
          else key_bits |= 1u << idx;
        }
        if (unknown_stage || key_bits != compiled) {
          ++out.key_mismatches;
          if (out.samples.size() < 10) {
            out.samples.push_back("record " + std::string(view.record_id) +
                                  ": key=" + std::to_string(key_bits) +
                                  " compiled=" + std::to_string(compiled));
          }
        }
      }
    }
  }
  if (have_key) {
    out.key_entries_unseen = key.size() - key_seen.size();
  }
  out.pass = out.route_mismatches == 0 && out.key_mismatches == 0 && out.key_entries_unseen == 0;
  return out;
}

BenchResult run_bench(std::uint64_t rows, const std::string& workdir, int workers) {
  std::error_code ec;
  fs::create_directories(workdir, ec);
  if (ec) fail(Errc::IoError, "cannot create bench workdir: " + workdir);
  fs::path root(workdir);

  CorpusRecipe recipe;
  recipe.rows = rows;
  // dump-like prevalence: survivors stay rare so the scan cost is the
  // streaming itself, as with the real registry
  recipe.samd = 0.0001;
  recipe.simd_kw = 0.0004;
  recipe.ai_kw = 0.00002;
  recipe.seed = 20240801;

  BenchResult bench;
  bench.rows = rows;

  auto t0 = std::chrono::steady_clock::now();
  synthesize_corpus(recipe, (root / "bench_corpus.zip").string(),
                    (root / "bench_corpus.key.tsv").string());
  bench.synth_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ScanOptions scan_options;
  scan_options.dataset_path = (root / "bench_corpus.zip").string();
  scan_options.out_dir = (root / "report").string();
  scan_options.workers = workers;
  ScanResult scan = run_scan(scan_options);
  bench.scan_seconds = scan.scan_seconds;
  bench.rows_per_second =
      scan.scan_seconds > 0 ? static_cast<double>(rows) / scan.scan_seconds : 0;
  bench.peak_rss_bytes = peak_rss_bytes();
  for (std::size_t i = 0; i < scan.stage_names.size(); ++i) {
    bench.stage_counts.emplace_back(scan.stage_names[i], scan.stage_counts[i]);
  }
  return bench;
}

}  // namespace mdsw
