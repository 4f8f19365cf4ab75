#include "polyscope/model_io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace polyscope {

namespace {

std::string located(const std::string& what, std::size_t line) {
  if (line == 0) return what;
  return "line " + std::to_string(line) + ": " + what;
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

struct Header {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
};

Header parse_header(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = split_fields(line);
  Header h;
  if (fields.size() != 2 || !parse_number(fields[0], h.vocab_size) ||
      !parse_number(fields[1], h.dim)) {
    throw ModelFormatError("malformed header, expected \"vocab_size dim\"", 1);
  }
  if (h.dim == 0) throw ModelFormatError("dimension must be positive", 1);
  return h;
}

// Per-entry checks shared by both readers so errors carry the location.
void check_entry(std::string_view token, std::span<const float> vec,
                 std::unordered_set<std::string>& seen, std::size_t line) {
  if (token.empty()) throw ModelFormatError("empty token", line);
  bool nonzero = false;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    if (!std::isfinite(vec[i])) {
      throw ModelFormatError("non-finite value in component " + std::to_string(i + 1) +
                                 " of token \"" + std::string(token) + "\"",
                             line);
    }
    nonzero = nonzero || vec[i] != 0.0f;
  }
  if (!nonzero) {
    throw ModelFormatError("zero vector for token \"" + std::string(token) + "\"", line);
  }
  if (!seen.emplace(token).second) {
    throw ModelFormatError("duplicate token \"" + std::string(token) + "\"", line);
  }
}

void check_writable_token(const std::string& token) {
  if (token.empty() || std::any_of(token.begin(), token.end(), is_blank)) {
    throw std::invalid_argument("token \"" + token +
                                "\" cannot be written in word2vec format");
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

float float_from_le(const unsigned char* p) {
  std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                       (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void float_to_le(float value, char* p) {
  auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) p[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
}

}  // namespace

ModelFormatError::ModelFormatError(const std::string& what, std::size_t line)
    : std::runtime_error(located(what, line)), line_(line) {}

UnknownTokenError::UnknownTokenError(std::string_view token)
    : std::out_of_range("unknown token \"" + std::string(token) + "\"") {}

EmbeddingModel::EmbeddingModel(std::vector<std::string> tokens,
                               std::vector<float> values, std::size_t dim)
    : tokens_(std::move(tokens)), values_(std::move(values)), dim_(dim) {
  if (dim_ == 0) throw ModelFormatError("dimension must be positive", 0);
  if (values_.size() != tokens_.size() * dim_) {
    throw ModelFormatError("value count does not match vocab_size * dim", 0);
  }
  std::unordered_set<std::string> seen;
  norms_.reserve(tokens_.size());
  index_.reserve(tokens_.size());
  for (std::size_t r = 0; r < tokens_.size(); ++r) {
    auto vec = vector(r);
    check_entry(tokens_[r], vec, seen, 0);
    double sq = 0.0;
    for (float x : vec) sq += double(x) * double(x);
    norms_.push_back(std::sqrt(sq));
    index_.emplace(tokens_[r], r);
  }
}

std::optional<std::size_t> EmbeddingModel::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingModel::rank_of(std::string_view token) const {
  auto r = find(token);
  if (!r) throw UnknownTokenError(token);
  return *r;
}

EmbeddingModel EmbeddingModel::reranked(
    const std::unordered_map<std::string, std::uint64_t>& counts) const {
  std::vector<std::uint64_t> count(vocab_size(), 0);
  for (std::size_t r = 0; r < vocab_size(); ++r) {
    if (auto it = counts.find(tokens_[r]); it != counts.end()) count[r] = it->second;
  }
  std::vector<std::size_t> order(vocab_size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return count[a] > count[b]; });
  std::vector<std::string> tokens;
  std::vector<float> values;
  tokens.reserve(vocab_size());
  values.reserve(values_.size());
  for (std::size_t r : order) {
    tokens.push_back(tokens_[r]);
    auto vec = vector(r);
    values.insert(values.end(), vec.begin(), vec.end());
  }
  return EmbeddingModel(std::move(tokens), std::move(values), dim_);
}

ModelFormat parse_model_format(std::string_view name) {
  if (name == "text") return ModelFormat::kText;
  if (name == "binary") return ModelFormat::kBinary;
  if (name == "auto") return ModelFormat::kAuto;
  throw std::invalid_argument("unknown model format \"" + std::string(name) + "\"");
}

EmbeddingModel read_text_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError("missing header", 1);
  const Header header = parse_header(line);

  std::vector<std::string> tokens;
  std::vector<float> values;
  tokens.reserve(header.vocab_size);
  values.reserve(header.vocab_size * header.dim);
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (tokens.size() == header.vocab_size) {
      throw ModelFormatError("more entries than the header declares (" +
                                 std::to_string(header.vocab_size) + ")",
                             line_no);
    }
    if (fields.size() != header.dim + 1) {
      throw ModelFormatError("expected token and " + std::to_string(header.dim) +
                                 " values, found " + std::to_string(fields.size()) +
                                 " fields",
                             line_no);
    }
    std::vector<float> vec(header.dim);
    for (std::size_t i = 0; i < header.dim; ++i) {
      if (!parse_number(fields[i + 1], vec[i])) {
        throw ModelFormatError("unparsable value \"" + std::string(fields[i + 1]) + "\"",
                               line_no);
      }
    }
    check_entry(fields[0], vec, seen, line_no);
    tokens.emplace_back(fields[0]);
    values.insert(values.end(), vec.begin(), vec.end());
  }
  if (in.bad()) throw std::runtime_error("read error");
  if (tokens.size() != header.vocab_size) {
    throw ModelFormatError("header declares " + std::to_string(header.vocab_size) +
                               " entries, file has " + std::to_string(tokens.size()),
                           line_no + 1);
  }
  return EmbeddingModel(std::move(tokens), std::move(values), header.dim);
}

EmbeddingModel read_binary_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError("missing header", 1);
  const Header header = parse_header(line);

  std::vector<std::string> tokens;
  std::vector<float> values;
  tokens.reserve(header.vocab_size);
  values.reserve(header.vocab_size * header.dim);
  std::unordered_set<std::string> seen;
  std::vector<unsigned char> raw(header.dim * sizeof(float));
  std::vector<float> vec(header.dim);

  for (std::size_t e = 0; e < header.vocab_size; ++e) {
    const std::size_t record = e + 2;
    std::string token;
    // Token runs up to a single space. Newline bytes (the optional separator
    // after the previous vector) are dropped, as the reference reader does.
    for (;;) {
      int c = in.get();
      if (c == std::char_traits<char>::eof()) {
        throw ModelFormatError("truncated file: expected " +
                                   std::to_string(header.vocab_size) +
                                   " entries, found " + std::to_string(e),
                               record);
      }
      if (c == ' ') break;
      if (c != '\n') token.push_back(static_cast<char>(c));
    }
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw ModelFormatError("truncated vector for token \"" + token + "\"", record);
    }
    for (std::size_t i = 0; i < header.dim; ++i) vec[i] = float_from_le(&raw[i * 4]);
    check_entry(token, vec, seen, record);
    tokens.push_back(std::move(token));
    values.insert(values.end(), vec.begin(), vec.end());
  }
  for (int c = in.get(); c != std::char_traits<char>::eof(); c = in.get()) {
    if (c != '\n' && c != '\r') {
      throw ModelFormatError("trailing data after " + std::to_string(header.vocab_size) +
                                 " entries",
                             header.vocab_size + 2);
    }
  }
  return EmbeddingModel(std::move(tokens), std::move(values), header.dim);
}

EmbeddingModel load_text_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_text_model(in);
}

EmbeddingModel load_binary_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_binary_model(in);
}

ModelFormat sniff_model_format(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError("missing header", 1);
  const Header header = parse_header(line);
  if (!std::getline(in, line)) return ModelFormat::kText;  // empty vocabulary
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool printable = std::all_of(line.begin(), line.end(), [](char c) {
    return c == '\t' || (c >= 0x20 && c < 0x7f);
  });
  if (printable && split_fields(line).size() == header.dim + 1) return ModelFormat::kText;
  return ModelFormat::kBinary;
}

EmbeddingModel load_model(const std::filesystem::path& path, ModelFormat format) {
  if (format == ModelFormat::kAuto) format = sniff_model_format(path);
  return format == ModelFormat::kText ? load_text_model(path) : load_binary_model(path);
}

void write_text_model(std::ostream& out, const EmbeddingModel& model) {
  out << model.vocab_size() << ' ' << model.dim() << '\n';
  char buf[32];
  for (std::size_t r = 0; r < model.vocab_size(); ++r) {
    check_writable_token(model.token(r));
    out << model.token(r);
    for (float x : model.vector(r)) {
      auto res = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write error");
}

void write_binary_model(std::ostream& out, const EmbeddingModel& model) {
  out << model.vocab_size() << ' ' << model.dim() << '\n';
  std::vector<char> raw(model.dim() * sizeof(float));
  for (std::size_t r = 0; r < model.vocab_size(); ++r) {
    check_writable_token(model.token(r));
    out << model.token(r) << ' ';
    auto vec = model.vector(r);
    for (std::size_t i = 0; i < vec.size(); ++i) float_to_le(vec[i], &raw[i * 4]);
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write error");
}

void save_text_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  auto out = open_output(path);
  write_text_model(out, model);
}

void save_binary_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  auto out = open_output(path);
  write_binary_model(out, model);
}

std::unordered_map<std::string, std::uint64_t> read_count_file(std::istream& in) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw ModelFormatError("count file: expected \"token<TAB>count\"", line_no);
    }
    std::string_view key(line.data(), tab);
    if (key.find(' ') != std::string_view::npos) continue;
    std::uint64_t n = 0;
    if (key.empty() || !parse_number(std::string_view(line).substr(tab + 1), n)) {
      throw ModelFormatError("count file: malformed entry", line_no);
    }
    counts[std::string(key)] = n;
  }
  return counts;
}

std::unordered_map<std::string, std::uint64_t> load_count_file(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_count_file(in);
}

std::vector<std::string> stable_set(const EmbeddingModel& model, std::size_t limit) {
  if (limit == 0 || limit > model.vocab_size()) {
    throw std::invalid_argument("limit must be in [1, " +
                                std::to_string(model.vocab_size()) + "], got " +
                                std::to_string(limit));
  }
  return {model.tokens().begin(), model.tokens().begin() + static_cast<std::ptrdiff_t>(limit)};
}

}  // namespace polyscope
