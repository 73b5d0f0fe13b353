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

#include "mdsw/zip.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "mdsw/error.hpp"

namespace mdsw {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::uint32_t kDescriptorSig = 0x08074b50;
constexpr std::uint64_t kMax32 = 0xFFFFFFFFull;

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v & 0xFFFF));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

std::uint16_t get16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t file_size_of(std::FILE* f) {
  if (std::fseek(f, 0, SEEK_END) != 0) return 0;
  long n = std::ftell(f);
  return n < 0 ? 0 : static_cast<std::uint64_t>(n);
}

}  // namespace

// ---------------------------------------------------------------- reader

ZipReader::ZipReader(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) fail(Errc::ArchiveUnreadable, "cannot open archive: " + path);

  std::uint64_t fsize = file_size_of(file_);
  if (fsize < 22) fail(Errc::ArchiveUnreadable, "not a zip archive (too small): " + path);

  // EOCD: scan backwards over at most 64K of comment
  std::uint64_t scan = std::min<std::uint64_t>(fsize, 22 + 65535);
  std::string tail(scan, '\0');
  std::fseek(file_, static_cast<long>(fsize - scan), SEEK_SET);
  if (std::fread(tail.data(), 1, scan, file_) != scan) {
    fail(Errc::ArchiveUnreadable, "cannot read archive tail: " + path);
  }
  const auto* t = reinterpret_cast<const unsigned char*>(tail.data());
  std::int64_t eocd = -1;
  for (std::int64_t i = static_cast<std::int64_t>(scan) - 22; i >= 0; --i) {
    if (get32(t + i) == kEocdSig) {
      eocd = i;
      break;
    }
  }
  if (eocd < 0) fail(Errc::ArchiveUnreadable, "zip end-of-central-directory not found: " + path);

  std::uint16_t total_entries = get16(t + eocd + 10);
  std::uint32_t cd_size = get32(t + eocd + 12);
  std::uint32_t cd_offset = get32(t + eocd + 16);
  if (cd_offset == kMax32 || total_entries == 0xFFFF) {
    fail(Errc::ArchiveUnreadable, "zip64 archives are not supported: " + path);
  }

  std::string cd(cd_size, '\0');
  std::fseek(file_, static_cast<long>(cd_offset), SEEK_SET);
  if (std::fread(cd.data(), 1, cd_size, file_) != cd_size) {
    fail(Errc::ArchiveUnreadable, "cannot read central directory: " + path);
  }
  const auto* c = reinterpret_cast<const unsigned char*>(cd.data());
  std::size_t off = 0;
  for (std::uint16_t i = 0; i < total_entries; ++i) {
    if (off + 46 > cd.size() || get32(c + off) != kCentralSig) {
      fail(Errc::ArchiveUnreadable, "corrupt central directory: " + path);
    }
    ZipEntry e;
    std::uint16_t flags = get16(c + off + 8);
    e.method = get16(c + off + 10);
    e.crc32 = get32(c + off + 16);
    e.compressed_size = get32(c + off + 20);
    e.uncompressed_size = get32(c + off + 24);
    std::uint16_t name_len = get16(c + off + 28);
    std::uint16_t extra_len = get16(c + off + 30);
    std::uint16_t comment_len = get16(c + off + 32);
    e.local_header_offset = get32(c + off + 42);
    if (off + 46 + name_len > cd.size()) {
      fail(Errc::ArchiveUnreadable, "corrupt central directory entry: " + path);
    }
    e.name.assign(cd.data() + off + 46, name_len);
    off += 46 + name_len + extra_len + comment_len;
    if (e.method != 0 && e.method != 8) {
      fail(Errc::ArchiveUnreadable,
           "unsupported compression method in member '" + e.name + "': " + path);
    }
    (void)flags;
    if (!e.name.empty() && e.name.back() == '/') continue;  // directory entry
    entries_.push_back(std::move(e));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });
}

ZipReader::~ZipReader() {
  if (file_) std::fclose(file_);
}

struct ZipReader::MemberStream::Impl {
  ZipReader* owner = nullptr;
  ZipEntry entry;
  std::uint64_t data_offset = 0;
  std::uint64_t compressed_left = 0;
  std::uint64_t produced = 0;
  std::uint32_t crc = 0;
  bool inflating = false;
  bool done = false;
  z_stream zs{};
  std::string inbuf;
  std::size_t in_pos = 0, in_len = 0;

  ~Impl() {
    if (inflating) inflateEnd(&zs);
  }
};

ZipReader::MemberStream::MemberStream(ZipReader* owner, const ZipEntry& entry)
    : impl_(std::make_unique<Impl>()) {
  impl_->owner = owner;
  impl_->entry = entry;
  impl_->compressed_left = entry.compressed_size;
  impl_->inbuf.resize(1 << 16);

  std::FILE* f = owner->file_;
  unsigned char hdr[30];
  std::fseek(f, static_cast<long>(entry.local_header_offset), SEEK_SET);
  if (std::fread(hdr, 1, 30, f) != 30 || get32(hdr) != kLocalSig) {
    fail(Errc::ArchiveUnreadable, "corrupt local header for member '" + entry.name + "'");
  }
  std::uint16_t name_len = get16(hdr + 26);
  std::uint16_t extra_len = get16(hdr + 28);
  impl_->data_offset = entry.local_header_offset + 30 + name_len + extra_len;

  if (entry.method == 8) {
    impl_->zs.zalloc = Z_NULL;
    impl_->zs.zfree = Z_NULL;
    impl_->zs.opaque = Z_NULL;
    if (inflateInit2(&impl_->zs, -15) != Z_OK) {
      fail(Errc::Internal, "inflateInit2 failed");
    }
    impl_->inflating = true;
  }
  std::fseek(f, static_cast<long>(impl_->data_offset), SEEK_SET);
}

ZipReader::MemberStream::~MemberStream() = default;
ZipReader::MemberStream::MemberStream(MemberStream&&) noexcept = default;

std::size_t ZipReader::MemberStream::read(char* dst, std::size_t cap) {
  Impl& im = *impl_;
  if (im.done || cap == 0) return 0;
  std::FILE* f = im.owner->file_;

  auto refill_input = [&]() -> bool {
    if (im.compressed_left == 0) return false;
    std::size_t want =
        static_cast<std::size_t>(std::min<std::uint64_t>(im.inbuf.size(), im.compressed_left));
    // reposition: another stream may have moved the shared handle
    std::fseek(f, static_cast<long>(im.data_offset + (im.entry.compressed_size - im.compressed_left)),
               SEEK_SET);
    std::size_t got = std::fread(im.inbuf.data(), 1, want, f);
    if (got == 0) fail(Errc::ArchiveUnreadable, "truncated member '" + im.entry.name + "'");
    im.compressed_left -= got;
    im.in_pos = 0;
    im.in_len = got;
    return true;
  };

  std::size_t out_n = 0;
  if (im.entry.method == 0) {
    std::uint64_t left = im.entry.uncompressed_size - im.produced;
    std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(cap, left));
    if (want > 0) {
      if (im.in_pos == im.in_len && !refill_input()) {
        fail(Errc::ArchiveUnreadable, "truncated member '" + im.entry.name + "'");
      }
      std::size_t take = std::min(want, im.in_len - im.in_pos);
      std::memcpy(dst, im.inbuf.data() + im.in_pos, take);
      im.in_pos += take;
      out_n = take;
    }
  } else {
    im.zs.next_out = reinterpret_cast<Bytef*>(dst);
    im.zs.avail_out = static_cast<uInt>(cap);
    while (im.zs.avail_out > 0) {
      if (im.zs.avail_in == 0) {
        if (im.in_pos == im.in_len && !refill_input()) {
          // no more input: stream must be at end
          break;
        }
        im.zs.next_in = reinterpret_cast<Bytef*>(im.inbuf.data() + im.in_pos);
        im.zs.avail_in = static_cast<uInt>(im.in_len - im.in_pos);
        im.in_pos = im.in_len;
      }
      int rc = inflate(&im.zs, Z_NO_FLUSH);
      if (rc == Z_STREAM_END) {
        im.done = true;
        break;
      }
      if (rc != Z_OK && rc != Z_BUF_ERROR) {
        fail(Errc::ArchiveUnreadable, "corrupt deflate stream in member '" + im.entry.name + "'");
      }
      if (rc == Z_BUF_ERROR && im.zs.avail_in == 0 && im.compressed_left == 0) break;
    }
    out_n = cap - im.zs.avail_out;
  }

  im.produced += out_n;
  im.crc = static_cast<std::uint32_t>(
      ::crc32(im.crc, reinterpret_cast<const Bytef*>(dst), static_cast<uInt>(out_n)));
  if (out_n == 0) im.done = true;
  if (im.done || im.produced == im.entry.uncompressed_size) {
    im.done = true;
    if (im.produced != im.entry.uncompressed_size || im.crc != im.entry.crc32) {
      fail(Errc::ArchiveUnreadable, "CRC or size mismatch in member '" + im.entry.name + "'");
    }
  }
  return out_n;
}

ZipReader::MemberStream ZipReader::open(const ZipEntry& entry) {
  return MemberStream(this, entry);
}

// ---------------------------------------------------------------- writer

struct ZipWriter::Impl {
  std::FILE* file = nullptr;
  std::string path;
  struct Done {
    std::string name;
    std::uint32_t crc;
    std::uint64_t comp, uncomp, offset;
    std::uint16_t method;
  };
  std::vector<Done> members;

  bool member_open = false;
  bool finished = false;
  std::string cur_name;
  std::uint16_t cur_method = 8;
  std::uint64_t cur_offset = 0;
  std::uint64_t cur_comp = 0, cur_uncomp = 0;
  std::uint32_t cur_crc = 0;
  bool deflating = false;
  z_stream zs{};
  std::string outbuf;

  void write_raw(std::string_view d) {
    if (std::fwrite(d.data(), 1, d.size(), file) != d.size()) {
      fail(Errc::IoError, "write failed: " + path);
    }
  }
};

ZipWriter::ZipWriter(const std::string& path) : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->file = std::fopen(path.c_str(), "wb");
  if (!impl_->file) fail(Errc::IoError, "cannot create archive: " + path);
  impl_->outbuf.resize(1 << 16);
}

ZipWriter::~ZipWriter() {
  if (impl_->deflating) deflateEnd(&impl_->zs);
  if (impl_->file) std::fclose(impl_->file);
}

void ZipWriter::begin_member(const std::string& name, bool deflate_member, int level) {
  Impl& im = *impl_;
  if (im.member_open) fail(Errc::Internal, "previous zip member still open");
  if (im.finished) fail(Errc::Internal, "zip writer already finished");
  im.member_open = true;
  im.cur_name = name;
  im.cur_method = deflate_member ? 8 : 0;
  im.cur_comp = im.cur_uncomp = 0;
  im.cur_crc = 0;
  im.cur_offset = static_cast<std::uint64_t>(std::ftell(im.file));

  // local header with bit 3 set: sizes/crc follow in the data descriptor
  std::string hdr;
  put32(hdr, kLocalSig);
  put16(hdr, 20);       // version needed
  put16(hdr, 0x0808);   // bit 3 (descriptor) + bit 11 (UTF-8 names)
  put16(hdr, im.cur_method);
  put16(hdr, 0);        // mod time
  put16(hdr, 0x5081);   // fixed mod date, keeps output byte-stable
  put32(hdr, 0);        // crc
  put32(hdr, 0);        // comp size
  put32(hdr, 0);        // uncomp size
  put16(hdr, static_cast<std::uint16_t>(name.size()));
  put16(hdr, 0);        // extra len
  hdr += name;
  im.write_raw(hdr);

  if (im.cur_method == 8) {
    im.zs = z_stream{};
    if (deflateInit2(&im.zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
      fail(Errc::Internal, "deflateInit2 failed");
    }
    im.deflating = true;
  }
}

void ZipWriter::write(std::string_view data) {
  Impl& im = *impl_;
  if (!im.member_open) fail(Errc::Internal, "no zip member open");
  if (im.cur_uncomp + data.size() > kMax32) {
    fail(Errc::IoError, "zip member exceeds 4 GiB: " + im.cur_name);
  }
  im.cur_crc = static_cast<std::uint32_t>(
      ::crc32(im.cur_crc, reinterpret_cast<const Bytef*>(data.data()),
              static_cast<uInt>(data.size())));
  im.cur_uncomp += data.size();

  if (im.cur_method == 0) {
    im.write_raw(data);
    im.cur_comp += data.size();
    return;
  }
  im.zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  im.zs.avail_in = static_cast<uInt>(data.size());
  while (im.zs.avail_in > 0) {
    im.zs.next_out = reinterpret_cast<Bytef*>(im.outbuf.data());
    im.zs.avail_out = static_cast<uInt>(im.outbuf.size());
    if (deflate(&im.zs, Z_NO_FLUSH) != Z_OK) fail(Errc::Internal, "deflate failed");
    std::size_t produced = im.outbuf.size() - im.zs.avail_out;
    if (produced > 0) {
      im.write_raw(std::string_view(im.outbuf.data(), produced));
      im.cur_comp += produced;
    }
  }
}

void ZipWriter::end_member() {
  Impl& im = *impl_;
  if (!im.member_open) fail(Errc::Internal, "no zip member open");
  if (im.cur_method == 8) {
    while (true) {
      im.zs.next_out = reinterpret_cast<Bytef*>(im.outbuf.data());
      im.zs.avail_out = static_cast<uInt>(im.outbuf.size());
      int rc = deflate(&im.zs, Z_FINISH);
      std::size_t produced = im.outbuf.size() - im.zs.avail_out;
      if (produced > 0) {
        im.write_raw(std::string_view(im.outbuf.data(), produced));
        im.cur_comp += produced;
      }
      if (rc == Z_STREAM_END) break;
      if (rc != Z_OK) fail(Errc::Internal, "deflate finish failed");
    }
    deflateEnd(&im.zs);
    im.deflating = false;
  }
  if (im.cur_comp > kMax32) fail(Errc::IoError, "zip member exceeds 4 GiB: " + im.cur_name);

  std::string desc;
  put32(desc, kDescriptorSig);
  put32(desc, im.cur_crc);
  put32(desc, static_cast<std::uint32_t>(im.cur_comp));
  put32(desc, static_cast<std::uint32_t>(im.cur_uncomp));
  im.write_raw(desc);

  im.members.push_back({im.cur_name, im.cur_crc, im.cur_comp, im.cur_uncomp, im.cur_offset,
                        im.cur_method});
  im.member_open = false;
}

void ZipWriter::finish() {
  Impl& im = *impl_;
  if (im.member_open) end_member();
  if (im.finished) return;
  std::uint64_t cd_start = static_cast<std::uint64_t>(std::ftell(im.file));
  std::string cd;
  for (const auto& m : im.members) {
    put32(cd, kCentralSig);
    put16(cd, 20);      // version made by
    put16(cd, 20);      // version needed
    put16(cd, 0x0808);  // flags
    put16(cd, m.method);
    put16(cd, 0);
    put16(cd, 0x5081);
    put32(cd, m.crc);
    put32(cd, static_cast<std::uint32_t>(m.comp));
    put32(cd, static_cast<std::uint32_t>(m.uncomp));
    put16(cd, static_cast<std::uint16_t>(m.name.size()));
    put16(cd, 0);  // extra
    put16(cd, 0);  // comment
    put16(cd, 0);  // disk
    put16(cd, 0);  // internal attrs
    put32(cd, 0);  // external attrs
    put32(cd, static_cast<std::uint32_t>(m.offset));
    cd += m.name;
  }
  im.write_raw(cd);
  std::string eocd;
  put32(eocd, kEocdSig);
  put16(eocd, 0);
  put16(eocd, 0);
  put16(eocd, static_cast<std::uint16_t>(im.members.size()));
  put16(eocd, static_cast<std::uint16_t>(im.members.size()));
  put32(eocd, static_cast<std::uint32_t>(cd.size()));
  put32(eocd, static_cast<std::uint32_t>(cd_start));
  put16(eocd, 0);  // comment length
  im.write_raw(eocd);
  if (std::fflush(im.file) != 0) fail(Errc::IoError, "flush failed: " + im.path);
  im.finished = true;
}

}  // namespace mdsw
