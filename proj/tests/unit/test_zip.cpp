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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "mdsw/error.hpp"
#include "mdsw/zip.hpp"

using namespace mdsw;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* tag) {
  static std::mt19937_64 rng(std::random_device{}());
  return fs::temp_directory_path() / (std::string("mdsw_zip_") + tag + "_" +
                                      std::to_string(rng()) + ".zip");
}

std::string read_member(ZipReader& reader, const ZipEntry& entry) {
  auto stream = reader.open(entry);
  std::string out;
  char buf[1024];
  std::size_t n;
  while ((n = stream.read(buf, sizeof(buf))) > 0) out.append(buf, n);
  return out;
}

}  // namespace

TEST_CASE("writer and reader round trip, stored and deflated") {
  fs::path path = temp_file("roundtrip");
  std::string big;
  std::mt19937 rng(3);
  for (int i = 0; i < 20000; ++i) big += static_cast<char>('a' + rng() % 26);

  {
    ZipWriter writer(path.string());
    writer.begin_member("z-last.txt", /*deflate=*/true);
    writer.write("tail member\n");
    writer.end_member();
    writer.begin_member("a-first.txt", /*deflate=*/false);
    writer.write("stored ");
    writer.write("content");
    writer.end_member();
    writer.begin_member("m-middle.bin", /*deflate=*/true, 6);
    writer.write(big);
    writer.end_member();
    writer.finish();
  }

  ZipReader reader(path.string());
  REQUIRE(reader.entries().size() == 3);
  // entries come back sorted by name
  CHECK(reader.entries()[0].name == "a-first.txt");
  CHECK(reader.entries()[1].name == "m-middle.bin");
  CHECK(reader.entries()[2].name == "z-last.txt");
  CHECK(read_member(reader, reader.entries()[0]) == "stored content");
  CHECK(read_member(reader, reader.entries()[1]) == big);
  CHECK(read_member(reader, reader.entries()[2]) == "tail member\n");
  fs::remove(path);
}

TEST_CASE("empty member and empty archive") {
  fs::path path = temp_file("empty");
  {
    ZipWriter writer(path.string());
    writer.begin_member("empty.txt");
    writer.end_member();
    writer.finish();
  }
  ZipReader reader(path.string());
  REQUIRE(reader.entries().size() == 1);
  CHECK(read_member(reader, reader.entries()[0]).empty());
  fs::remove(path);
}

TEST_CASE("missing or corrupt archives are rejected") {
  CHECK_THROWS_AS(ZipReader("/nonexistent/archive.zip"), Error);
  fs::path path = temp_file("corrupt");
  std::ofstream(path) << "this is not a zip archive at all, just text";
  try {
    ZipReader reader(path.string());
    FAIL("expected ArchiveUnreadable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ArchiveUnreadable);
  }
  fs::remove(path);
}

TEST_CASE("crc corruption is detected on read") {
  fs::path path = temp_file("crc");
  {
    ZipWriter writer(path.string());
    writer.begin_member("data.txt", /*deflate=*/false);
    writer.write("0123456789abcdef");
    writer.end_member();
    writer.finish();
  }
  // flip one payload byte (stored member: payload starts after the 30-byte
  // header + 8-byte name)
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(30 + 8 + 4);
  f.put('X');
  f.close();
  ZipReader reader(path.string());
  char buf[64];
  auto stream = reader.open(reader.entries()[0]);
  CHECK_THROWS_AS(
      [&] {
        while (stream.read(buf, sizeof(buf)) > 0) {
        }
      }(),
      Error);
  fs::remove(path);
}

TEST_CASE("archives from another zip implementation read back") {
  // created with Python's zipfile: a.txt deflated, b.txt stored
  static const unsigned char kInterop[] = {
      0x50, 0x4b, 0x03, 0x04, 0x14, 0x00, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x21, 0x00, 0xad,
      0x38, 0x90, 0xe8, 0x1a, 0x00, 0x00, 0x00, 0x18, 0x00, 0x00, 0x00, 0x05, 0x00, 0x00, 0x00,
      0x61, 0x2e, 0x74, 0x78, 0x74, 0xcb, 0x48, 0xcd, 0xc9, 0xc9, 0xd7, 0x29, 0xcf, 0x2f, 0xca,
      0x49, 0xe1, 0x2a, 0x4e, 0x4d, 0xce, 0xcf, 0x4b, 0x51, 0xc8, 0xc9, 0xcc, 0x4b, 0xe5, 0x02,
      0x00, 0x50, 0x4b, 0x03, 0x04, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x21, 0x00,
      0xea, 0x24, 0xc6, 0x56, 0x0d, 0x00, 0x00, 0x00, 0x0d, 0x00, 0x00, 0x00, 0x05, 0x00, 0x00,
      0x00, 0x62, 0x2e, 0x74, 0x78, 0x74, 0xe8, 0xbd, 0xaf, 0xe4, 0xbb, 0xb6, 0xe6, 0xb5, 0x8b,
      0xe8, 0xaf, 0x95, 0x0a, 0x50, 0x4b, 0x01, 0x02, 0x14, 0x03, 0x14, 0x00, 0x00, 0x00, 0x08,
      0x00, 0x00, 0x00, 0x21, 0x00, 0xad, 0x38, 0x90, 0xe8, 0x1a, 0x00, 0x00, 0x00, 0x18, 0x00,
      0x00, 0x00, 0x05, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80,
      0x01, 0x00, 0x00, 0x00, 0x00, 0x61, 0x2e, 0x74, 0x78, 0x74, 0x50, 0x4b, 0x01, 0x02, 0x14,
      0x03, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x21, 0x00, 0xea, 0x24, 0xc6, 0x56,
      0x0d, 0x00, 0x00, 0x00, 0x0d, 0x00, 0x00, 0x00, 0x05, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
      0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x01, 0x3d, 0x00, 0x00, 0x00, 0x62, 0x2e, 0x74, 0x78,
      0x74, 0x50, 0x4b, 0x05, 0x06, 0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x02, 0x00, 0x66, 0x00,
      0x00, 0x00, 0x6d, 0x00, 0x00, 0x00, 0x00, 0x00};
  fs::path path = temp_file("interop");
  std::ofstream(path, std::ios::binary)
      .write(reinterpret_cast<const char*>(kInterop), sizeof(kInterop));
  ZipReader reader(path.string());
  REQUIRE(reader.entries().size() == 2);
  CHECK(read_member(reader, reader.entries()[0]) == "hello,world\nsecond line\n");
  CHECK(read_member(reader, reader.entries()[1]) == "软件测试\n");
  fs::remove(path);
}
