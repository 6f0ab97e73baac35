#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kgwalk {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what, std::string_view text)
      : Error("line " + std::to_string(line) + ": " + what + ": " + std::string(text)),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for an independent stream (per root, per worker, per repetition).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

std::string to_hex16(std::uint64_t value);

// mt19937_64 core with hand-rolled draws: std::uniform_*_distribution output is
// implementation-defined, which would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // [0, n), unbiased via power-of-two rejection
  std::uint64_t below(std::uint64_t n);

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Corpus token escaping: TAB -> \t, newline -> \n, backslash -> \\ .
std::string escape_token(std::string_view token);
std::string unescape_token(std::string_view token);

// Header values additionally escape spaces (\s) so `key=value` fields stay
// single space-separated words.
std::string escape_header_value(std::string_view value);
std::string unescape_header_value(std::string_view value);

std::vector<std::string> split(std::string_view text, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_gzip(std::string_view bytes);
std::string gunzip(std::string_view bytes);

// Reads a whole file; transparently inflates gzip input (magic bytes 1f 8b).
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

// Runs chunk_fn(begin, end) over [0, n) split across `workers` threads.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn);

std::string format_double(double value);  // shortest round-trip decimal

}  // namespace kgwalk
