#include "polyscope/corpus_stats.h"

#include <algorithm>
#include <thread>
#include <vector>

namespace polyscope {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

void fold_ascii(std::string& s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
}

class Counter {
 public:
  explicit Counter(bool lowercase) : lowercase_(lowercase) {}

  void add(std::string token) {
    if (lowercase_) fold_ascii(token);
    ++table_.unigram[token];
    ++table_.total_tokens;
    if (table_.total_tokens == 1) {
      table_.first_token = token;
    } else {
      ++table_.bigram[{table_.last_token, token}];
    }
    table_.last_token = std::move(token);
  }

  FrequencyTable take() { return std::move(table_); }

 private:
  bool lowercase_;
  FrequencyTable table_;
};

FrequencyTable count_range(std::string_view text, bool lowercase) {
  Counter counter(lowercase);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) counter.add(std::string(text.substr(start, i - start)));
  }
  return counter.take();
}

template <typename Map>
auto sorted_entries(const Map& map) {
  std::vector<std::pair<typename Map::key_type, std::uint64_t>> v(map.begin(), map.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return v;
}

}  // namespace

std::uint64_t FrequencyTable::count(std::string_view token) const {
  auto it = unigram.find(std::string(token));
  return it == unigram.end() ? 0 : it->second;
}

std::uint64_t FrequencyTable::count(std::string_view first, std::string_view second) const {
  auto it = bigram.find({std::string(first), std::string(second)});
  return it == bigram.end() ? 0 : it->second;
}

void FrequencyTable::append(const FrequencyTable& other) {
  if (other.total_tokens == 0) return;
  for (const auto& [tok, n] : other.unigram) unigram[tok] += n;
  for (const auto& [pair, n] : other.bigram) bigram[pair] += n;
  if (total_tokens > 0) {
    ++bigram[{last_token, other.first_token}];
  } else {
    first_token = other.first_token;
  }
  last_token = other.last_token;
  total_tokens += other.total_tokens;
}

FrequencyTable count_corpus(std::istream& in, bool lowercase) {
  Counter counter(lowercase);
  std::string token;
  while (in >> token) counter.add(std::move(token));
  if (in.bad()) throw std::runtime_error("read error while counting corpus");
  return counter.take();
}

FrequencyTable count_buffer(std::string_view text, bool lowercase, unsigned threads) {
  threads = std::max(1u, threads);
  // Chunk boundaries are moved forward to the next whitespace so no token is
  // split; the seam bigrams are restored by append().
  std::vector<std::size_t> cuts{0};
  for (unsigned c = 1; c < threads; ++c) {
    std::size_t pos = std::max(cuts.back(), text.size() * c / threads);
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    cuts.push_back(pos);
  }
  cuts.push_back(text.size());

  std::vector<FrequencyTable> parts(cuts.size() - 1);
  if (parts.size() == 1) {
    parts[0] = count_range(text, lowercase);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t c = 0; c < parts.size(); ++c) {
      workers.emplace_back([&, c] {
        parts[c] = count_range(text.substr(cuts[c], cuts[c + 1] - cuts[c]), lowercase);
      });
    }
  }
  FrequencyTable merged = std::move(parts[0]);
  for (std::size_t c = 1; c < parts.size(); ++c) merged.append(parts[c]);
  return merged;
}

PairRatio followed_by_ratio(const FrequencyTable& table, std::string_view name,
                            std::string_view follower) {
  PairRatio r;
  r.name_count = table.count(name);
  r.pair_count = table.count(name, follower);
  r.ratio = r.name_count == 0 ? 0.0 : double(r.pair_count) / double(r.name_count);
  return r;
}

void write_unigram_tsv(std::ostream& out, const FrequencyTable& table) {
  for (const auto& [tok, n] : sorted_entries(table.unigram)) out << tok << '\t' << n << '\n';
}

void write_bigram_tsv(std::ostream& out, const FrequencyTable& table) {
  for (const auto& [pair, n] : sorted_entries(table.bigram)) {
    out << pair.first << ' ' << pair.second << '\t' << n << '\n';
  }
}

}  // namespace polyscope
