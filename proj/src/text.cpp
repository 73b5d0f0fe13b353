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

#include "mdsw/text.hpp"

#include <errno.h>
#include <iconv.h>

#include <cstdio>
#include <cstring>

#include "mdsw/error.hpp"

namespace mdsw::text {

namespace {

// Decodes one UTF-8 sequence at in[i..]; returns the code point and advances
// i. Returns -1 on malformed input (i advanced by one byte).
inline std::int32_t decode_utf8(const unsigned char* p, std::size_t n, std::size_t& i) {
  unsigned char b0 = p[i];
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto cont = [&](std::size_t k) { return i + k < n && (p[i + k] & 0xC0) == 0x80; };
  if ((b0 & 0xE0) == 0xC0) {
    if (!cont(1)) { ++i; return -1; }
    std::int32_t cp = ((b0 & 0x1F) << 6) | (p[i + 1] & 0x3F);
    if (cp < 0x80) { ++i; return -1; }  // overlong
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0) {
    if (!cont(1) || !cont(2)) { ++i; return -1; }
    std::int32_t cp = ((b0 & 0x0F) << 12) | ((p[i + 1] & 0x3F) << 6) | (p[i + 2] & 0x3F);
    if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) { ++i; return -1; }
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0) {
    if (!cont(1) || !cont(2) || !cont(3)) { ++i; return -1; }
    std::int32_t cp = ((b0 & 0x07) << 18) | ((p[i + 1] & 0x3F) << 12) |
                      ((p[i + 2] & 0x3F) << 6) | (p[i + 3] & 0x3F);
    if (cp < 0x10000 || cp > 0x10FFFF) { ++i; return -1; }
    i += 4;
    return cp;
  }
  ++i;
  return -1;
}

inline void encode_utf8(std::int32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::int32_t fold_codepoint(std::int32_t cp) {
  if (cp == 0x3000) return 0x20;                       // ideographic space
  if (cp >= 0xFF01 && cp <= 0xFF5E) cp -= 0xFEE0;      // fullwidth ASCII block
  switch (cp) {
    case 0xFF61: return 0x3002;  // halfwidth ideographic full stop
    case 0xFF62: return 0x300C;
    case 0xFF63: return 0x300D;
    case 0xFF64: return 0x3001;
    default: break;
  }
  if (cp >= 'A' && cp <= 'Z') cp += 32;
  return cp;
}

}  // namespace

}  // namespace mdsw::text

namespace mdsw {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::Ok: return "ok";
    case Errc::InvalidArgument: return "invalid_argument";
    case Errc::SpecError: return "spec_error";
    case Errc::ArchiveUnreadable: return "archive_unreadable";
    case Errc::HeaderMismatch: return "header_mismatch";
    case Errc::EncodingError: return "encoding_error";
    case Errc::ParseError: return "parse_error";
    case Errc::IoError: return "io_error";
    case Errc::Internal: return "internal";
  }
  return "unknown";
}

const char* parse_errc_name(ParseErrc e) {
  switch (e) {
    case ParseErrc::None: return "none";
    case ParseErrc::MalformedCode: return "malformed_code";
    case ParseErrc::MalformedRegistration: return "malformed_registration";
    case ParseErrc::UnknownClassDigit: return "unknown_class_digit";
    case ParseErrc::EmptyInput: return "empty_input";
    case ParseErrc::BadCheckDigit: return "bad_check_digit";
    case ParseErrc::BadDate: return "bad_date";
    case ParseErrc::NotFourteenDigits: return "not_fourteen_digits";
    case ParseErrc::MalformedUdi: return "malformed_udi";
    case ParseErrc::OriginUndetermined: return "origin_undetermined";
  }
  return "unknown";
}

}  // namespace mdsw

namespace mdsw::text {

bool normalize_append(std::string_view in, std::string& out) {
  const auto* p = reinterpret_cast<const unsigned char*>(in.data());
  const std::size_t n = in.size();
  bool clean = true;
  std::size_t i = 0;
  while (i < n) {
    // fast path: run of plain ASCII without uppercase letters
    unsigned char b = p[i];
    if (b < 0x80) {
      if (b >= 'A' && b <= 'Z') {
        out.push_back(static_cast<char>(b + 32));
      } else {
        out.push_back(static_cast<char>(b));
      }
      ++i;
      continue;
    }
    std::size_t start = i;
    std::int32_t cp = decode_utf8(p, n, i);
    if (cp < 0) {
      out.append(in.substr(start, i - start));
      clean = false;
      continue;
    }
    std::int32_t folded = fold_codepoint(cp);
    if (folded == cp) {
      out.append(in.substr(start, i - start));
    } else {
      encode_utf8(folded, out);
    }
  }
  return clean;
}

std::string normalize(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  normalize_append(in, out);
  return out;
}

bool utf8_valid(std::string_view in) {
  bool saw_invalid = false;
  std::size_t ok = utf8_valid_prefix(in, &saw_invalid);
  return !saw_invalid && ok == in.size();
}

std::size_t utf8_valid_prefix(std::string_view in, bool* saw_invalid) {
  const auto* p = reinterpret_cast<const unsigned char*>(in.data());
  const std::size_t n = in.size();
  std::size_t i = 0;
  if (saw_invalid) *saw_invalid = false;
  while (i < n) {
    if (p[i] < 0x80) {
      ++i;
      continue;
    }
    std::size_t need = (p[i] & 0xE0) == 0xC0 ? 2 : (p[i] & 0xF0) == 0xE0 ? 3
                       : (p[i] & 0xF8) == 0xF0                           ? 4
                                                                         : 0;
    if (need == 0) {
      if (saw_invalid) *saw_invalid = true;
      return i;
    }
    if (i + need > n) return i;  // truncated tail, not invalid
    std::size_t j = i;
    if (decode_utf8(p, n, j) < 0) {
      if (saw_invalid) *saw_invalid = true;
      return i;
    }
    i = j;
  }
  return i;
}

GbkDecoder::GbkDecoder() {
  cd_ = iconv_open("UTF-8", "GBK");
  if (cd_ == reinterpret_cast<void*>(-1)) {
    fail(Errc::EncodingError, "iconv does not support GBK on this system");
  }
}

GbkDecoder::~GbkDecoder() {
  if (cd_ != reinterpret_cast<void*>(-1)) iconv_close(static_cast<iconv_t>(cd_));
}

void GbkDecoder::reset() {
  iconv(static_cast<iconv_t>(cd_), nullptr, nullptr, nullptr, nullptr);
  pending_len_ = 0;
  bad_bytes_ = 0;
}

void GbkDecoder::convert(std::string_view in, std::string& out, bool flush) {
  char stack_in[4096];
  const char* src_data = in.data();
  std::size_t src_len = in.size();

  // Re-prepend bytes held over from the previous chunk.
  std::string carry;
  if (pending_len_ > 0) {
    if (pending_len_ + src_len <= sizeof(stack_in)) {
      std::memcpy(stack_in, pending_, pending_len_);
      std::memcpy(stack_in + pending_len_, src_data, src_len);
      src_data = stack_in;
      src_len += pending_len_;
    } else {
      carry.assign(pending_, pending_len_);
      carry.append(in);
      src_data = carry.data();
      src_len = carry.size();
    }
    pending_len_ = 0;
  }

  char buf[65536];
  char* inptr = const_cast<char*>(src_data);
  std::size_t inleft = src_len;
  while (inleft > 0) {
    char* outptr = buf;
    std::size_t outleft = sizeof(buf);
    std::size_t rc = iconv(static_cast<iconv_t>(cd_), &inptr, &inleft, &outptr, &outleft);
    out.append(buf, sizeof(buf) - outleft);
    if (rc != static_cast<std::size_t>(-1)) break;
    if (errno == E2BIG) continue;
    if (errno == EINVAL) {
      // incomplete multibyte tail
      if (!flush && inleft <= sizeof(pending_)) {
        std::memcpy(pending_, inptr, inleft);
        pending_len_ = inleft;
        return;
      }
      bad_bytes_ += inleft;
      out.append("\xEF\xBF\xBD");
      return;
    }
    // EILSEQ: skip one byte, emit replacement char
    ++bad_bytes_;
    ++inptr;
    --inleft;
    out.append("\xEF\xBF\xBD");
  }
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

std::string file_fingerprint(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(Errc::IoError, "cannot open for fingerprint: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 20];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) {
    h = fnv1a64(std::string_view(buf, n), h);
  }
  bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) fail(Errc::IoError, "read error while fingerprinting: " + path);
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

}  // namespace mdsw::text
