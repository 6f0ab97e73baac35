#include "kgwalk/corpus.hpp"

#include <charconv>

#include "kgwalk/util.hpp"

namespace kgwalk {

void WalkCorpus::add_parameter(std::string key, std::string value) {
  parameters.emplace_back(std::move(key), std::move(value));
}

const std::string* WalkCorpus::parameter(std::string_view key) const {
  for (const auto& [k, v] : parameters) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::uint64_t WalkCorpus::config_hash() const {
  std::uint64_t h = fnv1a64(strategy);
  h = fnv1a64("\x1f" + std::to_string(depth), h);
  h = fnv1a64("\x1f" + std::to_string(seed), h);
  for (const auto& [k, v] : parameters) {
    h = fnv1a64("\x1f" + k + "=" + v, h);
  }
  return h;
}

std::string WalkCorpus::header_line() const {
  std::string line = "# strategy=" + escape_header_value(strategy);
  line += " depth=" + std::to_string(depth);
  line += " seed=" + std::to_string(seed);
  for (const auto& [k, v] : parameters) {
    line += " " + escape_header_value(k) + "=" + escape_header_value(v);
  }
  line += " config=" + to_hex16(config_hash());
  return line;
}

WalkCorpus WalkCorpus::derive(std::string_view transform_name) const {
  WalkCorpus out;
  out.strategy = strategy + "+" + std::string(transform_name);
  out.depth = depth;
  out.seed = seed;
  out.parameters = parameters;
  return out;
}

std::string corpus_to_string(const WalkCorpus& corpus) {
  std::string body;
  for (const auto& walk : corpus.walks) {
    if (walk.empty()) throw Error("corpus contains an empty walk");
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) body += '\t';
      body += escape_token(walk[i]);
    }
    body += '\n';
  }
  return corpus.header_line() + " body=" + to_hex16(fnv1a64(body)) + "\n" + body;
}

void save_corpus(const WalkCorpus& corpus, const std::string& path) {
  write_file(path, corpus_to_string(corpus));
}

namespace {

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("corpus header: bad " + std::string(what) + ": " + std::string(text));
  }
  return value;
}

std::uint64_t parse_hex64(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("corpus header: bad " + std::string(what) + ": " + std::string(text));
  }
  return value;
}

}  // namespace

WalkCorpus corpus_from_string(std::string_view text) {
  std::size_t eol = text.find('\n');
  if (eol == std::string_view::npos) throw Error("corpus: missing header line");
  std::string_view header = text.substr(0, eol);
  std::string_view body = text.substr(eol + 1);
  if (!header.starts_with("# ")) throw Error("corpus: first line is not a header comment");

  WalkCorpus corpus;
  bool have_strategy = false, have_config = false, have_body_hash = false;
  std::uint64_t config = 0, body_hash = 0;
  for (const std::string& field : split(std::string(header.substr(2)), ' ')) {
    if (field.empty()) continue;
    std::size_t eq = field.find('=');
    if (eq == std::string::npos) throw Error("corpus header: bad field: " + field);
    std::string key = field.substr(0, eq);
    std::string raw = field.substr(eq + 1);
    if (key == "strategy") {
      corpus.strategy = unescape_header_value(raw);
      have_strategy = true;
    } else if (key == "depth") {
      corpus.depth = static_cast<int>(parse_u64(raw, "depth"));
    } else if (key == "seed") {
      corpus.seed = parse_u64(raw, "seed");
    } else if (key == "config") {
      config = parse_hex64(raw, "config hash");
      have_config = true;
    } else if (key == "body") {
      body_hash = parse_hex64(raw, "body hash");
      have_body_hash = true;
    } else {
      corpus.add_parameter(unescape_header_value(key), unescape_header_value(raw));
    }
  }
  if (!have_strategy) throw Error("corpus header: missing strategy");
  if (have_config && config != corpus.config_hash()) {
    throw Error("corpus header: config hash mismatch (header was edited)");
  }
  if (!have_body_hash) throw Error("corpus header: missing body hash");
  if (body_hash != fnv1a64(body)) {
    throw Error("corpus: body hash mismatch (file was edited or truncated)");
  }

  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> tokens;
    for (const std::string& t : split(std::string(line), '\t')) {
      tokens.push_back(unescape_token(t));
    }
    corpus.walks.push_back(std::move(tokens));
  }
  return corpus;
}

WalkCorpus load_corpus(const std::string& path) { return corpus_from_string(read_file(path)); }

}  // namespace kgwalk
