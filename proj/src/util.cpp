#include "kgwalk/util.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace kgwalk {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string to_hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf, 16);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("Rng::below: empty range");
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  std::uint64_t x;
  do {
    x = next() & mask;
  } while (x >= n);
  return x;
}

namespace {

std::string escape_impl(std::string_view in, bool spaces) {
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case ' ':
        if (spaces) {
          out += "\\s";
        } else {
          out += c;
        }
        break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_impl(std::string_view in, bool spaces) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (i + 1 >= in.size()) throw Error("dangling escape in token: " + std::string(in));
    char e = in[++i];
    switch (e) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 's':
        if (!spaces) throw Error("bad escape \\s in token: " + std::string(in));
        out += ' ';
        break;
      default: throw Error(std::string("bad escape \\") + e + " in token: " + std::string(in));
    }
  }
  return out;
}

}  // namespace

std::string escape_token(std::string_view token) { return escape_impl(token, false); }
std::string unescape_token(std::string_view token) { return unescape_impl(token, false); }
std::string escape_header_value(std::string_view value) { return escape_impl(value, true); }
std::string unescape_header_value(std::string_view value) { return unescape_impl(value, true); }

std::vector<std::string> split(std::string_view text, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool is_gzip(std::string_view bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
         static_cast<unsigned char>(bytes[1]) == 0x8b;
}

std::string gunzip(std::string_view bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw Error("gunzip: inflateInit failed");
  std::string out;
  std::vector<char> buf(1 << 16);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());
  int ret = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf.data());
    zs.avail_out = static_cast<uInt>(buf.size());
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error("gunzip: corrupt gzip stream");
    }
    out.append(buf.data(), buf.size() - zs.avail_out);
  } while (ret != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  if (ret != Z_STREAM_END) throw Error("gunzip: truncated gzip stream");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string bytes = ss.str();
  if (is_gzip(bytes)) return gunzip(bytes);
  return bytes;
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed: " + path);
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
  if (n == 0) return;
  std::size_t w = workers <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (w == 1) {
    chunk_fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w);
  std::size_t chunk = (n + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&chunk_fn, begin, end] { chunk_fn(begin, end); });
  }
  for (auto& th : threads) th.join();
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  double parsed = 0;
  std::sscanf(buf, "%lf", &parsed);
  if (parsed == value) {
    // try shorter representations that still round-trip
    for (int prec = 1; prec <= 16; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, value);
      std::sscanf(shorter, "%lf", &parsed);
      if (parsed == value) return std::string(shorter);
    }
  }
  return std::string(buf);
}

}  // namespace kgwalk
