/*
 * Copyright 2026 The Voidscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <zlib.h>

#include <fstream>

#include "voidscope/crawl.hpp"
#include "voidscope/error.hpp"
#include "voidscope/hash.hpp"
#include "voidscope/io.hpp"
#include "voidscope/json_io.hpp"

namespace voidscope {

std::string GzipCompress(std::string_view data) {
  z_stream zs{};
  // 15 window bits + 16 selects the gzip wrapper; mtime stays 0.
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kStorage, "deflateInit2 failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto written = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kStorage, "gzip compression failed");
  out.resize(written);
  return out;
}

std::string GzipDecompress(std::string_view data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) {
    throw Error(ErrorCode::kStorage, "inflateInit2 failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::kStorage, "corrupt gzip blob");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(ErrorCode::kStorage, "truncated gzip blob");
    }
  }
  inflateEnd(&zs);
  return out;
}

BlobStore::BlobStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot create " + root_.string());
}

std::filesystem::path BlobStore::PathFor(std::string_view id) const {
  return root_ / (std::string(id) + ".html.gz");
}

bool BlobStore::Contains(std::string_view id) const {
  return std::filesystem::exists(PathFor(id));
}

std::string BlobStore::Put(std::string_view html) {
  std::string id = Sha256Hex(html);
  if (!Contains(id)) WriteFileAtomic(PathFor(id), GzipCompress(html));
  return id;
}

std::string BlobStore::Get(std::string_view id) const {
  const auto path = PathFor(id);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kStorage, "missing blob " + std::string(id));
  }
  std::string html = GzipDecompress(ReadTextFile(path));
  if (Sha256Hex(html) != id) {
    throw Error(ErrorCode::kStorage, "blob hash mismatch for " + std::string(id));
  }
  return html;
}

CrawlManifest::CrawlManifest(std::filesystem::path path) : path_(std::move(path)) {}

std::vector<CrawlRecord> CrawlManifest::Load() const {
  std::vector<CrawlRecord> out;
  if (!std::filesystem::exists(path_)) return out;
  std::string content = ReadTextFile(path_);
  const auto last_newline = content.rfind('\n');
  content.resize(last_newline == std::string::npos ? 0 : last_newline + 1);
  for (const Json& j : ParseNdjson(content)) out.push_back(j.get<CrawlRecord>());
  return out;
}

void CrawlManifest::RepairTail() {
  if (!std::filesystem::exists(path_)) return;
  const std::string content = ReadTextFile(path_);
  if (content.empty() || content.back() == '\n') return;
  const auto last_newline = content.rfind('\n');
  const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  WriteFileAtomic(path_, std::string_view(content).substr(0, keep));
}

void CrawlManifest::Append(const CrawlRecord& record) {
  AppendDurable(path_, DumpLine(Json(record)) + "\n");
}

CrawlStore::CrawlStore(const std::filesystem::path& dir)
    : blobs(dir / "blobs"), manifest(dir / "manifest.ndjson") {}

}  // namespace voidscope
